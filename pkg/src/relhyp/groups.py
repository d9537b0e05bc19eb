"""Concrete group families with decidable normal forms.

Each family exposes the same small interface: ``identity``, ``mul``, ``inv``,
``key`` (a sort key used for canonical ordering), ``length`` (word length for
the standard generators), ``ball`` and text ``format``/``parse``.  Elements
are plain hashable Python values:

* ``Integers``: ``int``
* ``Lattice(n)``: ``tuple`` of ``n`` ints
* ``Cyclic(k)`` and ``TableGroup``: ``int`` indices
* ``FreeProduct``: tuples of ``(factor, exponent)`` syllables in reduced form
* ``InfiniteDihedral``: pairs ``(n, s)`` for ``Z x| C2``
* ``Subgroup``: elements of the parent family passing a membership test
"""
from __future__ import annotations

import re
from collections import deque
from typing import Callable, Hashable, Iterable, Sequence


class Group:
    """Base class; subclasses override the arithmetic."""

    name = "group"
    identity: Hashable = None

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def generators(self) -> list:
        raise NotImplementedError

    def contains(self, x) -> bool:
        return True

    def key(self, x):
        return x

    def length(self, x) -> int:
        # generic fallback: BFS in the Cayley graph
        for r, layer in enumerate(self._spheres()):
            if x in layer:
                return r
        raise ValueError(f"element {x!r} not reachable")

    def _spheres(self, limit: int = 10_000):
        gens = self.generators()
        steps = list(gens) + [self.inv(s) for s in gens]
        seen = {self.identity}
        layer = [self.identity]
        yield set(layer)
        for _ in range(limit):
            nxt = []
            for g in layer:
                for s in steps:
                    h = self.mul(g, s)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            if not nxt:
                return
            layer = nxt
            yield set(layer)

    def ball(self, r: int) -> list:
        """Elements of word length at most ``r``, sorted by (length, key)."""
        out = []
        for k, layer in enumerate(self._spheres()):
            if k > r:
                break
            out.extend(layer)
        return sorted(out, key=self.sort_key)

    def sort_key(self, x):
        return (self.length(x), self.key(x))

    def check(self, x):
        if not self.contains(x):
            raise ValueError(f"{x!r} is not an element of {self.name}")
        return x

    def power(self, x, n: int):
        y = self.identity
        base = x if n >= 0 else self.inv(x)
        for _ in range(abs(n)):
            y = self.mul(y, base)
        return y

    def from_word(self, word: Sequence[int]):
        """Evaluate a word of signed 1-based generator indices."""
        gens = self.generators()
        g = self.identity
        for i in word:
            if i == 0 or abs(i) > len(gens):
                raise ValueError(f"generator index {i} out of range for {self.name}")
            s = gens[abs(i) - 1]
            g = self.mul(g, s if i > 0 else self.inv(s))
        return g

    def format(self, x) -> str:
        return str(x)

    def parse(self, text: str):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class Integers(Group):
    name = "Z"
    identity = 0

    def mul(self, x, y):
        return x + y

    def inv(self, x):
        return -x

    def generators(self):
        return [1]

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def length(self, x):
        return abs(x)

    def key(self, x):
        return x

    def ball(self, r):
        return list(range(-r, r + 1))

    def sort_key(self, x):
        return x

    def parse(self, text):
        return int(text)


class Lattice(Group):
    """The free abelian group Z^n with coordinate vectors."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("rank must be positive")
        self.n = n
        self.name = f"Z^{n}"
        self.identity = (0,) * n

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def inv(self, x):
        return tuple(-a for a in x)

    def generators(self):
        return [tuple(int(i == j) for j in range(self.n)) for i in range(self.n)]

    def contains(self, x):
        return isinstance(x, tuple) and len(x) == self.n and all(isinstance(a, int) for a in x)

    def length(self, x):
        return sum(abs(a) for a in x)

    def sort_key(self, x):
        return x

    def format(self, x):
        return ",".join(str(a) for a in x)

    def parse(self, text):
        parts = text.strip("()").split(",")
        if len(parts) != self.n:
            raise ValueError(f"expected {self.n} coordinates in {text!r}")
        return tuple(int(p) for p in parts)


class TableGroup(Group):
    """A finite group given by its multiplication table on ``0..n-1``."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = "finite"):
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise ValueError("multiplication table must be square and nonempty")
        self.table = tuple(tuple(row) for row in table)
        self.order = n
        self.name = name
        ids = [e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n))]
        if len(ids) != 1:
            raise ValueError("table has no two-sided identity")
        self.identity = ids[0]
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise ValueError("table rows are not permutations")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError(f"table is not associative at ({a},{b},{c})")
        self._inv = {a: next(b for b in range(n) if self.table[a][b] == self.identity) for a in range(n)}

    def mul(self, x, y):
        return self.table[x][y]

    def inv(self, x):
        return self._inv[x]

    def generators(self):
        return [x for x in range(self.order) if x != self.identity]

    def contains(self, x):
        return isinstance(x, int) and 0 <= x < self.order

    def length(self, x):
        return 0 if x == self.identity else 1

    def ball(self, r):
        return list(range(self.order)) if r >= 1 else [self.identity]

    def sort_key(self, x):
        return x

    def parse(self, text):
        return self.check(int(text))


def cyclic_table(k: int) -> list[list[int]]:
    return [[(a + b) % k for b in range(k)] for a in range(k)]


class Cyclic(TableGroup):
    def __init__(self, k: int):
        if k < 1:
            raise ValueError("order must be positive")
        super().__init__(cyclic_table(k), name=f"C{k}")
        self.k = k

    def length(self, x):
        return min(x, self.k - x)

    def ball(self, r):
        return sorted((x for x in range(self.k) if self.length(x) <= r), key=self.sort_key)

    def sort_key(self, x):
        return (self.length(x), x)


_LETTERS = "abcdefgh"


class FreeProduct(Group):
    """Free product of copies of Z and finite cyclic groups.

    ``factors`` is a sequence of orders, ``0`` meaning infinite cyclic.
    Syllable ``(f, e)`` is the ``e``-th power of the generator of factor
    ``f``; for a cyclic factor of order ``k`` exponents lie in ``1..k-1``.
    """

    def __init__(self, factors: Sequence[int]):
        if not factors:
            raise ValueError("need at least one factor")
        if any(k < 0 or k == 1 for k in factors):
            raise ValueError("factor orders must be 0 (infinite) or at least 2")
        self.factors = tuple(factors)
        self.identity = ()
        self.name = "*".join("Z" if k == 0 else f"C{k}" for k in factors)

    # -- syllable arithmetic
    def _norm(self, f, e):
        k = self.factors[f]
        return e % k if k else e

    def mul(self, x, y):
        out = list(x)
        for f, e in y:
            if out and out[-1][0] == f:
                e2 = self._norm(f, out[-1][1] + e)
                out.pop()
                if e2:
                    out.append((f, e2))
            else:
                out.append((f, self._norm(f, e)))
        return tuple(out)

    def inv(self, x):
        return tuple((f, self._norm(f, -e)) for f, e in reversed(x))

    def generators(self):
        return [((f, 1),) for f in range(len(self.factors))]

    def factor_element(self, f: int, e: int):
        e = self._norm(f, e)
        return ((f, e),) if e else ()

    def contains(self, x):
        if not isinstance(x, tuple):
            return False
        prev = None
        for s in x:
            if not (isinstance(s, tuple) and len(s) == 2):
                return False
            f, e = s
            if not (0 <= f < len(self.factors)) or f == prev or e == 0:
                return False
            k = self.factors[f]
            if k and not (0 < e < k):
                return False
            prev = f
        return True

    def _syl_len(self, f, e):
        k = self.factors[f]
        return abs(e) if k == 0 else min(e, k - e)

    def length(self, x):
        return sum(self._syl_len(f, e) for f, e in x)

    def key(self, x):
        return x

    def sort_key(self, x):
        return (self.length(x), x)

    def ball(self, r):
        out = [()]
        frontier = [()]
        # extend normal forms syllable by syllable
        while frontier:
            nxt = []
            for g in frontier:
                used = self.length(g)
                last = g[-1][0] if g else None
                for f, k in enumerate(self.factors):
                    if f == last:
                        continue
                    exps = [e for m in range(1, r - used + 1) for e in (m, -m)] if k == 0 else range(1, k)
                    for e in exps:
                        if used + self._syl_len(f, e) <= r:
                            h = g + ((f, e),)
                            out.append(h)
                            nxt.append(h)
            frontier = nxt
        return sorted(set(out), key=self.sort_key)

    def coset(self, x, f: int):
        """Split ``x = rep * t`` with ``t`` in factor ``f`` and ``rep`` minimal."""
        if x and x[-1][0] == f:
            return x[:-1], x[-1][1]
        return x, 0

    def format(self, x):
        if not x:
            return "1"
        return "".join(_LETTERS[f] + ("" if e == 1 else str(e)) for f, e in x)

    def parse(self, text):
        text = text.strip()
        if text in ("1", "e", ""):
            return ()
        g = ()
        pos = 0
        for m in re.finditer(r"([a-h])(-?\d+)?", text):
            if m.start() != pos:
                raise ValueError(f"cannot parse {text!r} at position {pos}")
            pos = m.end()
            f = _LETTERS.index(m.group(1))
            if f >= len(self.factors):
                raise ValueError(f"letter {m.group(1)!r} out of range for {self.name}")
            e = int(m.group(2)) if m.group(2) else 1
            g = self.mul(g, self.factor_element(f, e))
        if pos != len(text):
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        return g

    # -- action on coned-off Cayley graph labels
    def act_label(self, gamma, label):
        kind = label[0]
        if kind == "e":
            return ("e", self.mul(gamma, label[1]))
        _, f, rep = label
        return ("c", f, self.coset(self.mul(gamma, rep), f)[0])

    def format_label(self, label) -> str:
        if label[0] == "e":
            return self.format(label[1])
        _, f, rep = label
        return "c:" + (self.format(rep) if rep else "") + _LETTERS[f].upper()


class InfiniteDihedral(Group):
    """``Z x| C2`` with elements ``(n, s)``; ``(n,s)(m,t) = (n + (-1)^s m, s+t)``."""

    name = "Z:C2"
    identity = (0, 0)

    def mul(self, x, y):
        n, s = x
        m, t = y
        return (n + (-m if s else m), (s + t) % 2)

    def inv(self, x):
        n, s = x
        return ((n if s else -n), s)

    def generators(self):
        return [(1, 0), (0, 1)]

    def contains(self, x):
        return isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], int) and x[1] in (0, 1)

    def length(self, x):
        n, s = x
        return abs(n) + s

    def sort_key(self, x):
        return (self.length(x), x)

    def ball(self, r):
        return sorted(((n, s) for s in (0, 1) for n in range(-r, r + 1) if abs(n) + s <= r), key=self.sort_key)

    def format(self, x):
        return f"{x[0]},{x[1]}"

    def parse(self, text):
        n, s = text.strip("()").split(",")
        return self.check((int(n), int(s)))


class Subgroup(Group):
    """A subgroup of a concrete family given by generators and a membership test."""

    def __init__(self, parent: Group, generators: Sequence, contains: Callable[[object], bool], name: str = "G"):
        self.parent = parent
        self._gens = list(generators)
        self._contains = contains
        self.identity = parent.identity
        self.name = name
        if not contains(parent.identity):
            raise ValueError("membership test rejects the identity")

    def mul(self, x, y):
        return self.parent.mul(x, y)

    def inv(self, x):
        return self.parent.inv(x)

    def generators(self):
        return list(self._gens)

    def contains(self, x):
        return self.parent.contains(x) and self._contains(x)

    def key(self, x):
        return self.parent.key(x)

    def sort_key(self, x):
        return self.parent.sort_key(x)

    def format(self, x):
        return self.parent.format(x)

    def parse(self, text):
        return self.check(self.parent.parse(text))


def multiples(k: int) -> Subgroup:
    """The subgroup kZ of Z."""
    return Subgroup(Integers(), [k], lambda x: x % k == 0, name=f"{k}Z")


def parse_family(text: str) -> Group:
    """Parse a family descriptor such as ``Z``, ``Z^2``, ``C3``, ``Z*Z``, ``Z*C2``, ``D_inf``."""
    t = text.replace(" ", "")
    if t == "Z":
        return Integers()
    if t in ("D_inf", "Z:C2"):
        return InfiniteDihedral()
    m = re.fullmatch(r"Z\^(\d+)", t)
    if m:
        return Lattice(int(m.group(1)))
    m = re.fullmatch(r"C(\d+)", t)
    if m:
        return Cyclic(int(m.group(1)))
    if "*" in t:
        orders = []
        for part in t.split("*"):
            if part == "Z":
                orders.append(0)
            elif re.fullmatch(r"C\d+", part):
                orders.append(int(part[1:]))
            else:
                raise ValueError(f"unknown free factor {part!r} in {text!r}")
        return FreeProduct(orders)
    m = re.fullmatch(r"(\d+)Z", t)
    if m:
        return multiples(int(m.group(1)))
    raise ValueError(f"unknown group family {text!r}")


def orbit_ball(group: Group, seeds: Iterable, r: int) -> list:
    """Elements reachable from ``seeds`` by at most ``r`` generator steps."""
    steps = group.generators() + [group.inv(s) for s in group.generators()]
    seen = set(seeds)
    q = deque((s, 0) for s in seen)
    while q:
        g, d = q.popleft()
        if d == r:
            continue
        for s in steps:
            h = group.mul(g, s)
            if h not in seen:
                seen.add(h)
                q.append((h, d + 1))
    return sorted(seen, key=group.sort_key)
