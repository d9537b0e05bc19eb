"""Constructors for special-symbol presentations.

Finite groups, products along split extensions, lifts to finite-index
subgroups, poly-hyperbolic chains, and the finite-generation (nerve) check.
The hyperbolic-group construction lives in :mod:`relhyp.boundary` and is
re-exported here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .groups import Group, Integers, InfiniteDihedral, Lattice, Subgroup, TableGroup, Cyclic
from .sft import (NO_SYMBOL, Alphabet, Configuration, Cylinder, Presentation, enumerate_admissible, realize,
                  special_symbol_count, z_example_subshift)

BLANK = "_"


def finite_group_presentation(table) -> Presentation:
    """Alphabet {$, _}, F = the whole group, M = patterns with exactly one $."""
    grp = table if isinstance(table, TableGroup) else TableGroup(table)
    F = tuple(range(grp.order))
    M = frozenset(tuple("$" if j == i else BLANK for j in F) for i in F)
    return Presentation(grp, Alphabet((BLANK, "$"), frozenset({"$"})), Cylinder(F, M), name=f"finite {grp.name}")


def trivial_presentation() -> Presentation:
    return finite_group_presentation([[0]])


# ----------------------------------------------------------------------------
# products along extensions

@dataclass
class ExtensionData:
    """A split extension ``1 -> N -> Gamma -> H -> 1`` given by explicit maps.

    ``embed`` sends N-elements into Gamma, ``section`` picks a lift of each
    H-element, ``quotient`` projects Gamma onto H.
    """

    gamma: Group
    n_family: Group
    h_family: Group
    embed: Callable
    section: Callable
    quotient: Callable

    def validate(self, hs: Sequence, ns: Sequence):
        g = self.gamma
        if self.section(self.h_family.identity) != g.identity:
            raise ValueError("section(1_H) must be 1_Gamma")
        for h in hs:
            for n in ns:
                x = g.mul(self.section(h), self.embed(n))
                if self.quotient(x) != h:
                    raise ValueError(f"quotient of section({h!r}).{n!r} is {self.quotient(x)!r}, not {h!r}")
                if self.quotient(self.embed(n)) != self.h_family.identity:
                    raise ValueError(f"embedded {n!r} does not lie in the kernel")


def lattice_extension(n: int) -> ExtensionData:
    """Z^n as an extension of Z (first coordinate) by Z^(n-1) (the others)."""
    if n < 2:
        raise ValueError("need n >= 2")
    nfam = Integers() if n == 2 else Lattice(n - 1)
    as_tuple = (lambda x: (x,)) if n == 2 else (lambda x: tuple(x))
    return ExtensionData(Lattice(n), nfam, Integers(),
                         embed=lambda x: (0,) + as_tuple(x),
                         section=lambda h: (h,) + (0,) * (n - 1),
                         quotient=lambda x: x[0])


def dihedral_extension() -> ExtensionData:
    """The infinite dihedral group Z x| C2 over the quotient C2."""
    return ExtensionData(InfiniteDihedral(), Integers(), Cyclic(2),
                         embed=lambda n: (n, 0),
                         section=lambda h: (0, h),
                         quotient=lambda x: x[1])


def generates(family: Group, F: Sequence, radius: int = 6) -> bool:
    """Do the differences ``f^-1 f'`` of ``F`` generate the family (checked on a ball)?"""
    steps = {family.mul(family.inv(a), b) for a in F for b in F} - {family.identity}
    if not steps:
        return len(family.ball(radius)) == 1
    reach = {family.identity}
    frontier = [family.identity]
    targets = set(family.generators())
    for _ in range(radius * max(1, len(F))):
        nxt = []
        for x in frontier:
            for s in steps:
                y = family.mul(x, s)
                if y not in reach and family.length(y) <= radius * max(1, len(F)):
                    reach.add(y)
                    nxt.append(y)
        frontier = nxt
        if targets <= reach:
            return True
    return targets <= reach


def product_presentation(presN: Presentation, presH: Presentation, ext: ExtensionData) -> Presentation:
    """Presentation of Gamma from presentations of N and H.

    Letters are pairs ``(a_H, a_N)``.  ``F = {section(h) . n}``; a pattern is
    allowed when the first coordinate reads one H-pattern along every
    N-direction and the second coordinate reads an N-pattern along each
    ``h``.  The alphabet keeps the pairs that occur in some allowed pattern;
    the special letters are the pairs in ``S_H x S_N``.
    """
    FH, FN = presH.cylinder.F, presN.cylinder.F
    if presH.cylinder.M is None or presN.cylinder.M is None:
        raise ValueError("product needs explicit pattern sets")
    if not generates(presN.family, FN):
        raise ValueError("F_N does not generate N; enlarge the N-cylinder first")
    ext.validate(FH, FN)
    G = ext.gamma
    cells = [(h, n) for h in FH for n in FN]
    F = tuple(G.mul(ext.section(h), ext.embed(n)) for h, n in cells)
    if len(set(F)) != len(F):
        raise ValueError("section inconsistency: the window elements section(h).n collide")
    MH, MN = sorted(presH.cylinder.M), sorted(presN.cylinder.M)
    M = set()
    for mh in MH:
        for mns in itertools.product(MN, repeat=len(FH)):
            M.add(tuple((mh[i], mns[i][j]) for i in range(len(FH)) for j in range(len(FN))))
    # letters outside every allowed pattern never occur in a global configuration
    used = {x for m in M for x in m}
    letters = tuple((a, b) for a in presH.alphabet.letters for b in presN.alphabet.letters if (a, b) in used)
    specials = frozenset((a, b) for a in presH.specials for b in presN.specials if (a, b) in used)
    return Presentation(G, Alphabet(letters, specials), Cylinder(F, frozenset(M)),
                        name=f"product({presH.name},{presN.name})",
                        meta={"kind": "product", "cells": cells})


def poly_hyperbolic_compose(chain: Sequence) -> Presentation:
    """Iterate ``product_presentation`` along ``[pres_0, (presH_1, ext_1), ...]``."""
    if not chain:
        raise ValueError("empty chain")
    cur = chain[0]
    for step in chain[1:]:
        presH, ext = step
        cur = product_presentation(cur, presH, ext)
    return cur


# ----------------------------------------------------------------------------
# finite index

@dataclass
class CosetData:
    """Representatives of the cosets ``G gamma_i`` of a finite-index subgroup."""

    gamma: Group
    subgroup: Subgroup
    reps: tuple

    def coset_of(self, x) -> tuple[object, int]:
        """Write ``x = g . gamma_i`` with ``g`` in the subgroup."""
        hits = [(self.gamma.mul(x, self.gamma.inv(r)), i) for i, r in enumerate(self.reps)
                if self.subgroup.contains(self.gamma.mul(x, self.gamma.inv(r)))]
        if len(hits) != 1:
            raise ValueError(f"{x!r} lies in {len(hits)} of the given cosets")
        return hits[0]

    def validate(self, radius: int = 6):
        for x in self.gamma.ball(radius):
            self.coset_of(x)


def multiples_cosets(k: int) -> CosetData:
    from .groups import multiples
    return CosetData(Integers(), multiples(k), tuple(range(k)))


def finite_index_presentation(presG: Presentation, cosets: CosetData, literal: bool = False) -> Presentation:
    """Presentation of a finite-index subgroup from one of the ambient group.

    A subgroup configuration ``s`` encodes ``s_Gamma(g gamma_i) = s(g)_i``.

    With ``literal=True`` the window is ``{f gamma_i^-1} & G`` for ``f`` in the
    ambient window, i.e. only the ambient translates based in ``G`` are
    encoded, and the alphabet is the full product.  This reproduces the bare
    formulas but does not encode translates based in the other cosets.

    By default every ambient translate ``g gamma_j F`` is encoded: the window
    collects ``gamma_j f gamma_i^-1`` over all ``j``, the patterns are the
    encodings of locally admissible ambient configurations on the union of the
    blocks ``g gamma_1 .. g gamma_n``, and the alphabet is the set of letters
    that occur in some pattern.
    """
    Gam = cosets.gamma
    cosets.validate()
    n = len(cosets.reps)
    FG = presG.cylinder.F
    specials_g = presG.specials
    if literal:
        cells = {}
        for f in FG:
            g, i = cosets.coset_of(f)
            cells[(g, i)] = f
        F = tuple(sorted({g for g, _ in cells}, key=Gam.sort_key))
        M = set()
        # fill the constrained coordinates from one ambient pattern; others free
        for mg in presG.cylinder.M:
            val = dict(zip(FG, mg))
            free = [(g, i) for g in F for i in range(n) if (g, i) not in cells]
            for fill in itertools.product(presG.alphabet.letters, repeat=len(free)):
                grid = {(g, i): val[f] for (g, i), f in cells.items()}
                grid.update(zip(free, fill))
                M.add(tuple(tuple(grid[(g, i)] for i in range(n)) for g in F))
        letters = tuple(itertools.product(presG.alphabet.letters, repeat=n))
        kind = "finite-index-literal"
    else:
        Fset = set()
        for r in cosets.reps:
            for f in FG:
                g, _ = cosets.coset_of(Gam.mul(r, f))
                Fset.add(g)
        F = tuple(sorted(Fset, key=Gam.sort_key))
        block = [Gam.mul(g, r) for g in F for r in cosets.reps]
        M = set()
        for cfg in enumerate_admissible(presG.cylinder, Gam, block, presG.alphabet):
            M.add(tuple(tuple(cfg[Gam.mul(g, r)] for r in cosets.reps) for g in F))
        used = {a for m in M for a in m}
        letters = tuple(a for a in itertools.product(presG.alphabet.letters, repeat=n) if a in used)
        kind = "finite-index"
    specials = frozenset(a for a in letters if any(x in specials_g for x in a))
    return Presentation(cosets.subgroup, Alphabet(letters, specials), Cylinder(F, frozenset(M)),
                        name=f"{kind}({presG.name})", meta={"kind": kind, "cosets": cosets})


def fi_encode(cosets: CosetData, cfg: Configuration) -> Configuration:
    """Ambient configuration -> subgroup configuration on the full blocks inside its window."""
    blocks: dict = {}
    for x in cfg.window:
        g, i = cosets.coset_of(x)
        blocks.setdefault(g, {})[i] = cfg[x]
    n = len(cosets.reps)
    return Configuration({g: tuple(b[i] for i in range(n)) for g, b in blocks.items() if len(b) == n})


def fi_decode(cosets: CosetData, cfg: Configuration) -> Configuration:
    Gam = cosets.gamma
    out = {}
    for g, letter in cfg.assignment.items():
        for i, r in enumerate(cosets.reps):
            out[Gam.mul(g, r)] = letter[i]
    return Configuration(out)


def fi_pi(cosets: CosetData, pres: Presentation, cfg: Configuration):
    """Ambient position of the special symbol of a subgroup configuration, or ``NO_SYMBOL``."""
    for g, letter in cfg.assignment.items():
        for i, a in enumerate(letter):
            if a in pres.meta.get("ambient_specials", {"$"}):
                return cosets.gamma.mul(g, cosets.reps[i])
    return NO_SYMBOL


# ----------------------------------------------------------------------------
# finite generation (nerve connectivity)

@dataclass
class GenerationReport:
    connected: bool
    components: list
    witness: Configuration | None = None
    witness_admissible: bool | None = None
    witness_specials: int | None = None
    seeds: tuple = ()


def check_generation(pres: Presentation, radius: int = 6) -> GenerationReport:
    """Connectivity of the nerve of the translates of F, restricted to a ball.

    When it is disconnected, build the contradiction witness: configurations
    with the special symbol at a point of each of two components, glued along
    the components, which is still admissible and carries two special symbols.
    """
    fam = pres.family
    ball = fam.ball(radius)
    inball = set(ball)
    parent = {x: x for x in ball}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    finv = [fam.inv(f) for f in pres.cylinder.F]
    bases = {fam.mul(w, fi) for w in ball for fi in finv}
    for g in bases:
        members = [fam.mul(g, f) for f in pres.cylinder.F]
        members = [m for m in members if m in inball]
        for a, b in zip(members, members[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    comps: dict = {}
    for x in ball:
        comps.setdefault(find(x), []).append(x)
    components = sorted((sorted(c, key=fam.sort_key) for c in comps.values()), key=lambda c: fam.sort_key(c[0]))
    if len(components) == 1:
        return GenerationReport(True, components)
    c1, c2 = components[0], components[1]
    g1, g2 = c1[0], c2[0]
    s1 = realize(pres, ball, at=g1)
    s2 = realize(pres, ball, at=g2)
    if s1 is None or s2 is None:
        return GenerationReport(False, components, seeds=(g1, g2))
    in2 = set(c2)
    glued = Configuration({x: (s2[x] if x in in2 else s1[x]) for x in ball})
    return GenerationReport(False, components, glued, pres.admissible(glued),
                            special_symbol_count(glued, pres.specials), (g1, g2))


def artificial_even_presentation() -> Presentation:
    """The Z-example pattern set placed on F = {0, 2}: its translates never meet odd steps."""
    z = z_example_subshift()
    return Presentation(Integers(), z.alphabet, Cylinder((0, 2), z.cylinder.M), name="artificial F={0,2}")


def hyperbolic_presentation(*args, **kwargs):
    from .boundary import hyperbolic_presentation as hp
    return hp(*args, **kwargs)
