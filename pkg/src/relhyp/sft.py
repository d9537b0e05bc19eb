"""Subshifts of finite type over concrete groups, checked on finite windows.

A cylinder is a finite window ``F`` with a set ``M`` of allowed patterns (or
a predicate on patterns).  A configuration on a finite window is *locally
admissible* when every translate ``gF`` contained in the window carries an
allowed pattern.  The shift acts by ``(g.s)(x) = s(g^{-1} x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .groups import Group, Integers

NO_SYMBOL = "no-symbol-in-window"


class BudgetExceeded(RuntimeError):
    pass


class PresentationViolation(ValueError):
    pass


def fmt_letter(a) -> str:
    if isinstance(a, tuple):
        return "(" + ",".join(fmt_letter(x) for x in a) + ")"
    if hasattr(a, "serialize"):
        return a.serialize()
    return str(a)


@dataclass(frozen=True)
class Alphabet:
    letters: tuple
    specials: frozenset = frozenset()

    def __post_init__(self):
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("duplicate letters")
        if not self.specials <= set(self.letters):
            raise ValueError("special letter not in the alphabet")

    def __len__(self):
        return len(self.letters)

    def __contains__(self, a):
        return a in self._index

    @property
    def _index(self) -> dict:
        d = self.__dict__.get("_idx")
        if d is None:
            d = {a: i for i, a in enumerate(self.letters)}
            object.__setattr__(self, "_idx", d)
        return d

    def index(self, a) -> int:
        return self._index[a]


@dataclass(frozen=True)
class Cylinder:
    """Window ``F`` (a tuple fixing the pattern order) and allowed patterns.

    Either ``M`` (a set of tuples aligned with ``F``) or ``predicate`` (a
    callable on such tuples) is given.
    """

    F: tuple
    M: frozenset | None = None
    predicate: Callable | None = None

    def __post_init__(self):
        if not self.F:
            raise ValueError("cylinder window must be nonempty")
        if (self.M is None) == (self.predicate is None):
            raise ValueError("give exactly one of M or predicate")
        if self.M is not None:
            for m in self.M:
                if len(m) != len(self.F):
                    raise ValueError(f"pattern {m!r} is not total on F")

    def allows(self, pattern: tuple) -> bool:
        if self.M is not None:
            return pattern in self.M
        return bool(self.predicate(pattern))


class Configuration:
    """A finite window of group elements with a letter at each position."""

    __slots__ = ("assignment",)

    def __init__(self, assignment: Mapping):
        self.assignment = dict(assignment)

    @property
    def window(self):
        return self.assignment.keys()

    def __getitem__(self, g):
        return self.assignment[g]

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.assignment == other.assignment

    def __hash__(self):
        return hash(frozenset(self.assignment.items()))

    def restrict(self, window: Iterable) -> "Configuration":
        return Configuration({g: self.assignment[g] for g in window})

    def word(self, group: Group | None = None) -> list:
        keys = sorted(self.assignment, key=group.sort_key if group else None)
        return [self.assignment[k] for k in keys]

    def __repr__(self):
        items = sorted(self.assignment.items(), key=lambda kv: repr(kv[0]))
        return "Configuration(" + ", ".join(f"{k!r}:{fmt_letter(v)}" for k, v in items) + ")"


def from_word(word: Sequence, start: int = 0) -> Configuration:
    """A configuration over Z from a word, ``word[i]`` placed at ``start + i``."""
    return Configuration({start + i: a for i, a in enumerate(word)})


def _check_window(group: Group, window: Iterable):
    for g in window:
        if not group.contains(g):
            raise ValueError(f"window element {g!r} is not representable in {group.name}")


def translates_in(cyl: Cylinder, group: Group, window: Iterable) -> list:
    """Bases ``g`` with ``gF`` contained in the window, in canonical order."""
    win = set(window)
    finv = [group.inv(f) for f in cyl.F]
    bases = {group.mul(w, fi) for w in win for fi in finv}
    out = [g for g in bases if all(group.mul(g, f) in win for f in cyl.F)]
    return sorted(out, key=group.sort_key)


def translate_union(cyl: Cylinder, group: Group, bases: Iterable) -> list:
    """The window ``union of gF`` over ``bases``: every position lies in a full translate."""
    out = {group.mul(g, f) for g in bases for f in cyl.F}
    return sorted(out, key=group.sort_key)


def is_locally_admissible(cyl: Cylinder, group: Group, cfg: Configuration) -> bool:
    _check_window(group, cfg.window)
    a = cfg.assignment
    for g in translates_in(cyl, group, a):
        if not cyl.allows(tuple(a[group.mul(g, f)] for f in cyl.F)):
            return False
    return True


def first_violation(cyl: Cylinder, group: Group, cfg: Configuration):
    a = cfg.assignment
    for g in translates_in(cyl, group, a):
        pat = tuple(a[group.mul(g, f)] for f in cyl.F)
        if not cyl.allows(pat):
            return g, pat
    return None


def enumerate_admissible(cyl: Cylinder, group: Group, window: Iterable, alphabet: Alphabet | Sequence,
                         budget: int = 5_000_000, fixed: Mapping | None = None,
                         limit: int | None = None) -> list[Configuration]:
    """All locally admissible configurations on ``window``, in canonical order.

    Canonical order is lexicographic in the letter indices, positions taken in
    the group's sorted order.  ``fixed`` pins letters at some positions.  The
    search is a depth-first backtrack; ``budget`` bounds the number of visited
    nodes and ``limit`` stops after that many results.
    """
    letters = tuple(alphabet.letters if isinstance(alphabet, Alphabet) else alphabet)
    win = sorted(set(window), key=group.sort_key)
    _check_window(group, win)
    pos = {g: i for i, g in enumerate(win)}
    # each translate is checked once its last position is assigned
    checks: list[list] = [[] for _ in win]
    # with explicit patterns, partially filled translates are pruned by projections of M
    partial: list[list] = [[] for _ in win]
    proj: dict = {}
    for g in translates_in(cyl, group, win):
        idxs = tuple(pos[group.mul(g, f)] for f in cyl.F)
        checks[max(idxs)].append(idxs)
        if cyl.M is None:
            continue
        order = sorted(range(len(idxs)), key=idxs.__getitem__)
        for step in range(1, len(order)):
            slots = tuple(sorted(order[:step]))
            if slots not in proj:
                proj[slots] = frozenset(tuple(m[k] for k in slots) for m in cyl.M)
            partial[idxs[order[step - 1]]].append((tuple(idxs[k] for k in slots), proj[slots]))
    fixed = dict(fixed or {})
    choices = [[fixed[g]] if g in fixed else letters for g in win]
    out: list[Configuration] = []
    cur: list = [None] * len(win)
    visited = 0

    def rec(i):
        nonlocal visited
        if i == len(win):
            out.append(Configuration(dict(zip(win, cur))))
            return
        for a in choices[i]:
            if limit is not None and len(out) >= limit:
                return
            visited += 1
            if visited > budget:
                raise BudgetExceeded(f"search exceeded {budget} nodes (window {len(win)}, "
                                     f"{len(letters)} letters; naive bound {len(letters)}^{len(win)})")
            cur[i] = a
            if all(tuple(cur[j] for j in idxs) in seen for idxs, seen in partial[i]) and \
                    all(cyl.allows(tuple(cur[j] for j in idxs)) for idxs in checks[i]):
                rec(i + 1)
        cur[i] = None

    rec(0)
    return out


def count_admissible(cyl: Cylinder, group: Group, window: Iterable, alphabet, budget: int = 5_000_000) -> int:
    return len(enumerate_admissible(cyl, group, window, alphabet, budget))


def act(group: Group, gamma, cfg: Configuration) -> Configuration:
    """``(gamma . cfg)(gamma x) = cfg(x)``: translate the window by ``gamma``."""
    if not group.contains(gamma):
        raise ValueError(f"{gamma!r} is not representable in {group.name}")
    out = {}
    for g, a in cfg.assignment.items():
        h = group.mul(gamma, g)
        if not group.contains(h):
            raise ValueError(f"translate {h!r} is not representable")
        out[h] = a
    return Configuration(out)


def special_symbol_count(cfg: Configuration, special) -> int:
    specials = special if isinstance(special, (set, frozenset)) else {special}
    return sum(1 for a in cfg.assignment.values() if a in specials)


@dataclass(frozen=True)
class Presentation:
    """A special-symbol presentation: family, alphabet, cylinder.

    ``alphabet.specials`` is the set of letters that count as the special
    symbol; it is a singleton except for lossless renamings.
    """

    family: Group
    alphabet: Alphabet
    cylinder: Cylinder
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def specials(self) -> frozenset:
        return self.alphabet.specials

    def admissible(self, cfg: Configuration) -> bool:
        return all(a in self.alphabet for a in cfg.assignment.values()) and \
            is_locally_admissible(self.cylinder, self.family, cfg)

    def enumerate(self, window, budget: int = 5_000_000, fixed=None) -> list[Configuration]:
        return enumerate_admissible(self.cylinder, self.family, window, self.alphabet, budget, fixed)

    def pi_window(self, cfg: Configuration):
        return pi_window(self, cfg)


def pi_window(p: Presentation, cfg: Configuration):
    """The position of the special symbol, or ``NO_SYMBOL``."""
    hits = [g for g, a in cfg.assignment.items() if a in p.specials]
    if len(hits) > 1:
        raise PresentationViolation(f"{len(hits)} special symbols at {sorted(hits, key=p.family.sort_key)[:4]!r}")
    return hits[0] if hits else NO_SYMBOL


def z_example_subshift() -> Presentation:
    """The Z example: words a...a$b...b, constant a, constant b."""
    M = frozenset({("a", "a"), ("a", "$"), ("$", "b"), ("b", "b")})
    return Presentation(Integers(), Alphabet(("a", "b", "$"), frozenset({"$"})), Cylinder((0, 1), M),
                        name="z-example")


def interval(n: int, start: int = 0) -> list[int]:
    return list(range(start, start + n))


@dataclass
class UniquenessReport:
    windows: int = 0
    configurations: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def uniqueness_sweep(p: Presentation, windows: Iterable[Iterable], budget: int = 5_000_000) -> UniquenessReport:
    """Check that admissible configurations carry at most one special symbol."""
    rep = UniquenessReport()
    for w in windows:
        rep.windows += 1
        for cfg in p.enumerate(w, budget):
            rep.configurations += 1
            if special_symbol_count(cfg, p.specials) > 1:
                rep.violations.append(cfg)
    return rep


def realize(p: Presentation, window: Iterable, at=None, budget: int = 5_000_000) -> Configuration | None:
    """First admissible configuration (canonical order) with its special symbol exactly at ``at``.

    With ``at=None`` the configuration carries no special symbol.  Returns
    ``None`` when there is none on this window.
    """
    win = sorted(set(window) | ({at} if at is not None else set()), key=p.family.sort_key)
    plain = [a for a in p.alphabet.letters if a not in p.specials]
    pos = {g: i for i, g in enumerate(win)}
    cyl, fam = p.cylinder, p.family
    checks: list[list] = [[] for _ in win]
    for g in translates_in(cyl, fam, win):
        idxs = tuple(pos[fam.mul(g, f)] for f in cyl.F)
        checks[max(idxs)].append(idxs)
    cur: list = [None] * len(win)
    visited = 0

    def rec(i):
        nonlocal visited
        if i == len(win):
            return True
        opts = [a for a in p.alphabet.letters if a in p.specials] if win[i] == at else plain
        for a in opts:
            visited += 1
            if visited > budget:
                raise BudgetExceeded(f"realize exceeded {budget} nodes")
            cur[i] = a
            if all(cyl.allows(tuple(cur[j] for j in idxs)) for idxs in checks[i]) and rec(i + 1):
                return True
        return False

    if not rec(0):
        return None
    return Configuration(dict(zip(win, cur)))


def extends(p: Presentation, cfg: Configuration, pad: Iterable, budget: int = 5_000_000) -> bool:
    """Bounded-extension search: does ``cfg`` extend to an admissible configuration on ``window | pad``?"""
    win = set(cfg.window) | set(pad)
    sols = enumerate_admissible(p.cylinder, p.family, win, p.alphabet, budget, fixed=cfg.assignment, limit=1)
    return bool(sols)
