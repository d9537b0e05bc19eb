"""Boundary coding of a relatively hyperbolic group by a subshift of finite type.

Everything here works in *label space*: vertices of the (coned-off) Cayley
graph are labels ``("e", g)`` and ``("c", f, rep)`` of a
:class:`~relhyp.graphs.ConedCayleySpace`, so the group acts exactly and finite
graphs are only materialised on demand.

Conventions
-----------
``C`` is the base cone ``Cone_{R,Theta}(e0, v0)``, stored as a sorted tuple of
labels.  A letter of ``A'`` is a :class:`~relhyp.cocycles.RestrictionLetter`
over ``C``; the letter ``psi_0(g)`` of a configuration is the cocycle on the
translate ``g C`` pulled back to ``C``, i.e. ``psi_0(g)(u, u') =
phi(g u, g u')``.  A full letter is the tuple ``(psi_0, psi_1, ..., psi_m)``
with ``psi_i`` a letter of the i-th parabolic presentation.
"""
from __future__ import annotations

import itertools
import logging
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .cocycles import Cocycle, GradientLine, RestrictionLetter, busemann_cocycle, gradient_lines, is_geodesic
from .geometry import angle_lower_bound, cone, nbr_angle
from .graphs import INF, ConedCayleySpace, Graph, ResourceError, delta_estimate, first_geodesic
from .groups import FreeProduct, Group, Integers, parse_family
from .sft import Alphabet, Configuration, Cylinder, Presentation, realize, z_example_subshift

log = logging.getLogger(__name__)


# ----------------------------------------------------------------------------
# parameters and data

@dataclass(frozen=True)
class BoundaryParams:
    """Constants of the construction.

    ``containment`` is the radius/angle ``rho`` for which
    ``Cone_{rho,rho}(e_i, p_i)`` must lie inside the base cone.  The
    asymptotic regime asks for ``theta >= 2000 delta`` and ``rho = 10 theta``;
    desk instances run with small constants and record ``asymptotic_regime=False``.
    """

    delta: float
    theta: int
    R: int
    Theta: float
    base_vertex: tuple
    base_edge: tuple
    containment: int = 1

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.base_vertex not in self.base_edge:
            raise ValueError("the base edge must contain the base vertex")

    @property
    def asymptotic_regime(self) -> bool:
        return self.theta >= 2000 * self.delta and self.containment >= 10 * self.theta

    @property
    def scale_note(self) -> str:
        if self.asymptotic_regime:
            return "asymptotic constants"
        return (f"scaled: theta={self.theta} (delta={self.delta}, theta/delta="
                f"{self.theta / self.delta if self.delta else math.inf:.1f}), containment radius {self.containment}")


@dataclass
class ParabolicDatum:
    """A representative parabolic vertex with its stabiliser's presentation.

    ``embed`` maps elements of the parabolic family (the presentation's
    group) into the ambient group; ``coordinate`` splits an ambient element
    as ``(coset label, parabolic coordinate)``.
    """

    index: int
    vertex: tuple
    edge: tuple
    presentation: Presentation
    embed: Callable
    coordinate: Callable

    @property
    def far(self):
        return self.edge[1] if self.edge[0] == self.vertex else self.edge[0]

    @property
    def F(self) -> tuple:
        return self.presentation.cylinder.F


@dataclass
class FPrime:
    members: tuple
    angles: dict
    partial: bool


@dataclass
class AlphabetPrime:
    letters: tuple
    radial_sources: int
    busemann_sources: int
    excluded: list = field(default_factory=list)

    def __len__(self):
        return len(self.letters)

    def __contains__(self, a):
        return a in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_s")
        if s is None:
            s = set(self.letters)
            self.__dict__["_s"] = s
        return s


@dataclass
class BoundaryConfiguration:
    """Letters on a finite window of group elements."""

    window: tuple
    letters: dict
    source: object = None

    def psi0(self, g) -> RestrictionLetter:
        return self.letters[g][0]

    def psi(self, i: int, g):
        return self.letters[g][i + 1]

    def as_configuration(self) -> Configuration:
        return Configuration(self.letters)


@dataclass
class GlobalCocycle:
    h: dict
    consistent: bool
    checked_pairs: int
    uncovered_edges: int
    witness: dict | None = None

    def __call__(self, w, v) -> int:
        return self.h[v] - self.h[w]


@dataclass
class PiResult:
    kind: str  # "vertex", "ray", "undetermined", "violation", "inconsistent"
    value: object
    lines: list
    starts: list
    geodesic: bool = True
    candidates: dict = field(default_factory=dict)


@dataclass
class ExpansivityResult:
    found: bool
    gamma: object = None
    kind: str = ""
    detail: str = ""


# ----------------------------------------------------------------------------
# domains

class Domain:
    """The finite graph ``union of g C`` over a window of group elements."""

    def __init__(self, space: ConedCayleySpace, cone_labels: Sequence, window: Iterable):
        self.window = tuple(window)
        labels = {space.act(g, c) for g in self.window for c in cone_labels}
        self.graph = space.induced(labels)
        self.id = {lab: v for v, lab in self.graph.labels.items()}
        self.space = space

    def label(self, v):
        return self.graph.labels[v]


def _is_label(x) -> bool:
    return isinstance(x, tuple) and bool(x) and isinstance(x[0], str)


# ----------------------------------------------------------------------------
# F'_i, A', cylinder

def compute_f_prime(g: Graph, datum: ParabolicDatum, theta) -> FPrime:
    """Parabolic elements ``gamma`` with ``Ang_{p_i}(e_i, gamma e_i) <= theta/2``.

    Angles are read in the finite graph ``g`` (labels), which can only
    overestimate them; an excluded element whose angle is not certified, or
    a member at the edge of the visible range, makes the result partial.
    """
    fam = datum.presentation.family
    space = g.space
    p = g.vertex_of(datum.vertex)
    v = g.vertex_of(datum.far)
    members, angles = [], {}
    partial = False
    for r in itertools.count():
        ring = [x for x in fam.ball(r) if fam.length(x) == r] if r else [fam.identity]
        visible = False
        for x in ring:
            lab = space.act(datum.embed(x), datum.far)
            if not g.has_label(lab):
                continue
            visible = True
            w = g.vertex_of(lab)
            a = nbr_angle(g, p, v, w) if w != v else 0
            angles[x] = a
            if a <= theta / 2:
                members.append(x)
                if r and w in g.incomplete and not any(
                        g.has_label(space.act(datum.embed(fam.mul(x, s)), datum.far)) for s in fam.generators()):
                    partial = True
            elif angle_lower_bound(g, p, (p, v), (p, w)) <= theta / 2:
                partial = True
        if not visible:
            # the whole ring is outside; membership beyond it is unknown if the last ring had members
            if any(fam.length(x) == r - 1 for x in members):
                partial = True
            break
    members = tuple(sorted(members, key=fam.sort_key))
    missing = [f for f in datum.F if f not in members]
    if missing:
        raise ValueError(f"F_{datum.index} is not contained in F'_{datum.index}: {missing!r} (theta too small)")
    return FPrime(members, angles, partial)


def _ref_distances_from(g: Graph, labels: Sequence) -> list[dict]:
    return [g.bfs(g.vertex_of(lab)) for lab in labels]


def build_alphabet_prime(g: Graph, cone_labels: Sequence, centers: Iterable | None = None,
                         rays: Sequence = (), sources: Sequence[Cocycle] = ()) -> AlphabetPrime:
    """Distinct restrictions to ``C`` of radial and Busemann cocycles.

    ``centers`` are the labels of the radial sources (default: every vertex
    of ``g``); ``rays`` are label sequences giving Busemann cocycles; extra
    ``sources`` are cocycles on ``g`` given directly.  Busemann sources that
    do not stabilise on ``C`` are excluded with a warning.
    """
    cone_labels = tuple(cone_labels)
    ids = [g.vertex_of(c) for c in cone_labels]
    dists = _ref_distances_from(g, cone_labels)
    seen: dict = {}
    radial = 0
    centers = list(g.vertices) if centers is None else [g.vertex_of(c) for c in centers]
    for p in centers:
        if any(p not in d for d in dists):
            continue
        radial += 1
        base = dists[0][p]
        off = tuple(d[p] - base for d in dists)
        seen.setdefault(off, None)
    cocycles = list(sources)
    excluded = []
    bus = 0
    for ray in rays:
        rid = [g.vertex_of(x) for x in ray]
        c = busemann_cocycle(g, rid, region=ids)
        if not c.stabilized:
            log.warning("Busemann source along %r is not stabilised on the cone; excluded", ray[:3])
            excluded.append(tuple(ray))
            continue
        bus += 1
        cocycles.append(c)
    for c in cocycles:
        if any(v not in c.h for v in ids):
            continue
        off = tuple(c.h[v] - c.h[ids[0]] for v in ids)
        seen.setdefault(off, None)
    diam = max(dists[i][j] for i in range(len(ids)) for j in ids)
    letters = tuple(RestrictionLetter(cone_labels, off) for off in sorted(seen))
    for a in letters:
        if max(a.offsets) - min(a.offsets) > diam:
            raise AssertionError("letter exceeds the cone diameter")
    return AlphabetPrime(letters, radial, bus, excluded)


@dataclass
class BoundaryInstance:
    """All data of one run of the construction."""

    space: ConedCayleySpace
    params: BoundaryParams
    reference: Graph
    cone_labels: tuple
    parabolics: list
    f_prime: dict
    alphabet_prime: AlphabetPrime
    F: tuple
    F_overlap: tuple
    witnesses: dict
    presentation: Presentation
    window: tuple
    _domains: dict = field(default_factory=dict, repr=False)

    @property
    def family(self) -> Group:
        return self.space.family

    def domain(self, window: Iterable | None = None) -> Domain:
        win = tuple(sorted(set(self.window if window is None else window), key=self.family.sort_key))
        d = self._domains.get(win)
        if d is None:
            d = Domain(self.space, self.cone_labels, win)
            self._domains[win] = d
        return d

    def cone_index(self, lab) -> int:
        return self.cone_labels.index(lab)

    def datum_for_factor(self, f: int) -> ParabolicDatum | None:
        for d in self.parabolics:
            if d.vertex[0] == "c" and d.vertex[1] == f:
                return d
        return None


def _overlap_elements(space: ConedCayleySpace, cone_labels: Sequence) -> list:
    """Non-trivial ``gamma`` with ``|gamma C & C| >= 2``."""
    fam = space.family
    cset = set(cone_labels)
    elems = [lab[1] for lab in cone_labels if lab[0] == "e"]
    cands = {fam.mul(x, fam.inv(y)) for x in elems for y in elems}
    out = []
    for gm in cands:
        if gm == fam.identity:
            continue
        if sum(1 for c in cone_labels if space.act(gm, c) in cset) >= 2:
            out.append(gm)
    return sorted(out, key=fam.sort_key)


def _bullet3_witnesses(ref: Graph, space, datum: ParabolicDatum, gamma, cone_labels, theta) -> list:
    """Pairs ``(u, d)``: ``u = gamma^-1 w`` in ``C`` for the segments ``[w, p_i]`` through ``gamma e_i``.

    The segment must be geodesic with length and maximal angle below theta.
    """
    p = ref.vertex_of(datum.vertex)
    g_elem = datum.embed(gamma)
    v = ref.vertex_of(space.act(g_elem, datum.far))
    inv = space.family.inv(g_elem)
    cset = set(cone_labels)
    dp = ref.bfs(p)
    out = set()
    stack = [[v, p]]
    while stack:
        seg = stack.pop()
        u = space.act(inv, ref.labels[seg[0]])
        if u in cset:
            out.add((u, len(seg) - 1))
        if len(seg) >= theta:
            continue
        head = seg[0]
        for x in ref.neighbors(head):
            if dp.get(x) != dp[head] + 1:
                continue
            if nbr_angle(ref, head, x, seg[1]) >= theta:
                continue
            stack.append([x] + seg)
    return sorted(out, key=lambda t: (space.label_key(t[0]), t[1]))


def build_cylinder(inst_parts: dict) -> tuple[tuple, Callable]:
    """Window and predicate encoding the three conditions.

    (1) ``psi_0`` letters agree on overlaps of translates of ``C``;
    (2) each ``psi_i`` reads an allowed pattern on ``F_i``;
    (3) for ``gamma`` in ``F_i`` and a witness segment ``[w, p_i]`` through
    ``gamma e_i``: ``psi_0(gamma)(gamma^-1 w, p_i) >= 1 - d(w, p_i)`` only if
    ``psi_i`` carries the special symbol somewhere on ``gamma F'_i``.
    Every position must also carry a ``psi_0`` letter of ``A'``.
    """
    space = inst_parts["space"]
    fam = space.family
    C = inst_parts["cone_labels"]
    cpos = {c: i for i, c in enumerate(C)}
    overlap = inst_parts["F_overlap"]
    parabolics = inst_parts["parabolics"]
    fprime = inst_parts["f_prime"]
    witnesses = inst_parts["witnesses"]
    aprime = inst_parts["alphabet_prime"]
    elems = {fam.identity} | set(inst_parts["F"]) | set(overlap)
    for d in parabolics:
        for f in d.F:
            elems.add(d.embed(f))
            for fp in fprime[d.index].members:
                elems.add(d.embed(d.presentation.family.mul(f, fp)))
    window = tuple(sorted(elems, key=fam.sort_key))
    pos = {g: k for k, g in enumerate(window)}
    one = pos[fam.identity]
    # bullet 1: for gamma in overlap, pairs (index in C of v, index in C of gamma^-1 v)
    b1 = []
    for gm in overlap:
        inv = fam.inv(gm)
        pairs = [(cpos[v], cpos[space.act(inv, v)]) for v in C if space.act(inv, v) in cpos]
        b1.append((pos[gm], pairs))
    b2 = []
    b3 = []
    for d in parabolics:
        k = d.index + 1
        b2.append((k, tuple(pos[d.embed(f)] for f in d.F), d.presentation.cylinder))
        pi_idx = cpos[d.vertex]
        specials = d.presentation.specials
        for f in d.F:
            gpos = pos[d.embed(f)]
            targets = tuple(pos[d.embed(d.presentation.family.mul(f, fp))] for fp in fprime[d.index].members)
            for u, dist in witnesses[(d.index, f)]:
                b3.append((k, gpos, cpos[u], pi_idx, dist, targets, specials))

    def predicate(pattern: tuple) -> bool:
        for letter in pattern:
            if letter[0] not in aprime:
                return False
        base = pattern[one][0].offsets
        for gp, pairs in b1:
            off = pattern[gp][0].offsets
            i0, j0 = pairs[0]
            for i, j in pairs[1:]:
                if base[i] - base[i0] != off[j] - off[j0]:
                    return False
        for k, idxs, cyl in b2:
            if not cyl.allows(tuple(pattern[t][k] for t in idxs)):
                return False
        for k, gpos, ui, pi_idx, dist, targets, specials in b3:
            off = pattern[gpos][0].offsets
            if off[pi_idx] - off[ui] >= 1 - dist:
                if not any(pattern[t][k] in specials for t in targets):
                    return False
        return True

    return window, predicate


def build_instance(space: ConedCayleySpace, params: BoundaryParams, parabolics: Sequence[ParabolicDatum],
                   window_radius: int = 4, ref_radius: int = 5, rays: Sequence = (),
                   specials_from_center: bool = False) -> BoundaryInstance:
    """Assemble the base cone, ``A'``, the cylinder and the presentation."""
    fam = space.family
    ref = space.induced(space.ball_labels(ref_radius), radius=ref_radius)
    ref.space = space
    v0 = ref.vertex_of(params.base_vertex)
    e0 = tuple(ref.vertex_of(x) for x in params.base_edge)
    C_ids = cone(ref, e0, v0, params.R, params.Theta).members
    C = tuple(sorted((ref.labels[v] for v in C_ids), key=space.label_key))
    d0 = ref.bfs(v0)
    for v in C_ids:
        lab = ref.labels[v]
        if lab[0] == "e" and fam.length(lab[1]) >= ref_radius:
            raise ResourceError("the base cone reaches the reference ball boundary; raise ref_radius")
        if v in ref.infinite and d0[v] < params.R:
            raise ResourceError(f"the base cone passes through the infinite-valence vertex {lab!r}")
    cset = set(C)
    for d in parabolics:
        if d.vertex not in cset or d.far not in cset:
            raise ValueError(f"parabolic datum {d.index}: e_i is not inside the base cone")
        for f in d.F:
            far = space.act(d.embed(f), d.far)
            a = nbr_angle(ref, ref.vertex_of(d.vertex), ref.vertex_of(d.far), ref.vertex_of(far)) \
                if far != d.far else 0
            if a > 1:
                raise ValueError(f"parabolic datum {d.index}: Ang(e_i, gamma e_i) = {a} > 1 for gamma = {f!r}")
        rho = params.containment
        pc = cone(ref, tuple(ref.vertex_of(x) for x in d.edge), ref.vertex_of(d.vertex), rho, rho)
        outside = [ref.labels[v] for v in pc.members if ref.labels[v] not in cset]
        if outside:
            raise ValueError(f"Cone_{{{rho},{rho}}}(e_{d.index}, p_{d.index}) is not inside the base cone: "
                             f"{outside[:3]!r}")
    fprime = {d.index: compute_f_prime(ref, d, params.theta) for d in parabolics}
    aprime = build_alphabet_prime(ref, C, rays=rays)
    bv, bw = params.base_edge
    F = sorted((lab[1] for lab in C if lab[0] == "e"
                and space.act(lab[1], bv) in cset and space.act(lab[1], bw) in cset), key=fam.sort_key)
    overlap = _overlap_elements(space, C)
    witnesses = {(d.index, f): _bullet3_witnesses(ref, space, d, f, C, params.theta)
                 for d in parabolics for f in d.F}
    parts = dict(space=space, cone_labels=C, F=tuple(F), F_overlap=tuple(overlap), parabolics=list(parabolics),
                 f_prime=fprime, witnesses=witnesses, alphabet_prime=aprime)
    window, predicate = build_cylinder(parts)
    letters = tuple(itertools.product(aprime.letters, *[d.presentation.alphabet.letters for d in parabolics]))
    specials = frozenset()
    if specials_from_center:
        center = radial_letter(ref, C, params.base_vertex)
        specials = frozenset(a for a in letters if a[0] == center)
    pres = Presentation(fam, Alphabet(letters, specials), Cylinder(window, predicate=predicate),
                        name=f"boundary {fam.name}", meta={"kind": "boundary"})
    return BoundaryInstance(space, params, ref, C, list(parabolics), fprime, aprime, tuple(F), tuple(overlap),
                            witnesses, pres, tuple(fam.ball(window_radius)))


def radial_letter(g: Graph, cone_labels: Sequence, center) -> RestrictionLetter:
    d = g.bfs(g.vertex_of(center))
    vals = [d[g.vertex_of(c)] for c in cone_labels]
    return RestrictionLetter(tuple(cone_labels), tuple(x - vals[0] for x in vals))


# ----------------------------------------------------------------------------
# encode, act, admissibility

def _potential(inst: BoundaryInstance, xi, dom: Domain) -> tuple[dict, str]:
    space = inst.space
    if _is_label(xi):
        if xi not in dom.id:
            raise ValueError(f"{xi!r} is not representable in the domain of the window")
        dist = dom.graph.bfs(dom.id[xi])
        return {dom.label(v): d for v, d in dist.items()}, "radial"
    ray = [tuple(x) for x in xi]
    g2 = space.induced(set(dom.id) | set(ray))
    rid = [g2.vertex_of(x) for x in ray]
    region = [g2.vertex_of(lab) for lab in dom.id]
    c = busemann_cocycle(g2, rid, region=region)
    if not c.stabilized:
        raise ValueError("the Busemann cocycle of this ray prefix has not stabilised on the window; extend the ray")
    return {g2.labels[v]: c.h[v] for v in region}, "busemann"


def _psi_i(inst: BoundaryInstance, datum: ParabolicDatum, h: dict, dom: Domain, window) -> dict:
    """Parabolic coordinate: the special symbol at the exit of each cone, realised along the coset."""
    pres = datum.presentation
    pfam = pres.family
    cosets: dict = {}
    for g in window:
        lab, k = datum.coordinate(g)
        cosets.setdefault(lab, []).append((g, k))
    out = {}
    for lab, members in cosets.items():
        cv = dom.id[lab]
        hc = h[lab]
        exits = [w for w in dom.graph.neighbors(cv) if h[dom.label(w)] == hc - 1]
        at = None
        if exits:
            ks = sorted(datum.coordinate(dom.label(w)[1])[1] for w in exits)
            at = ks[0]
        coords = [k for _, k in members]
        if isinstance(pfam, Integers):
            lo = min(coords + ([at] if at is not None else []))
            hi = max(coords + ([at] if at is not None else []))
            win = range(lo, hi + 1)
        else:
            win = coords
        cfg = realize(pres, win, at=at)
        if cfg is None:
            raise ValueError(f"parabolic presentation {pres.name} cannot realise its special symbol at {at!r}")
        for g, k in members:
            out[g] = cfg[k]
    return out


def encode(inst: BoundaryInstance, xi, window: Iterable | None = None) -> BoundaryConfiguration:
    """The configuration of a radial (``xi`` a vertex label) or Busemann (``xi`` a ray) cocycle."""
    dom = inst.domain(window)
    W = dom.window
    h, kind = _potential(inst, xi, dom)
    space = inst.space
    C = inst.cone_labels
    interned: dict = {}
    psi0 = {}
    for g in W:
        vals = [h[space.act(g, c)] for c in C]
        off = tuple(x - vals[0] for x in vals)
        letter = interned.get(off)
        if letter is None:
            letter = interned[off] = RestrictionLetter(C, off)
        psi0[g] = letter
    coords = [_psi_i(inst, d, h, dom, W) for d in inst.parabolics]
    letters = {g: (psi0[g],) + tuple(c[g] for c in coords) for g in W}
    return BoundaryConfiguration(W, letters, (kind, xi))


def act(inst: BoundaryInstance, gamma, psi: BoundaryConfiguration) -> BoundaryConfiguration:
    """Shift action: ``(gamma psi)(gamma g) = psi(g)``."""
    fam = inst.family
    letters = {fam.mul(gamma, g): a for g, a in psi.letters.items()}
    src = psi.source
    if src is not None and src[0] == "radial":
        src = ("radial", inst.space.act(gamma, src[1]))
    elif src is not None and src[0] == "busemann":
        src = ("busemann", tuple(inst.space.act(gamma, x) for x in src[1]))
    return BoundaryConfiguration(tuple(sorted(letters, key=fam.sort_key)), letters, src)


def is_admissible(inst: BoundaryInstance, psi: BoundaryConfiguration) -> bool:
    return inst.presentation.admissible(psi.as_configuration())


# ----------------------------------------------------------------------------
# globalisation and gradient lines

def globalise(inst: BoundaryInstance, psi: BoundaryConfiguration) -> GlobalCocycle:
    """Integrate the ``psi_0`` letters into a potential on the domain.

    Translates are visited along a spanning tree (neighbouring translates
    share vertices); then every translate is re-checked against the
    potential.  A mismatch reports the cycle of translates through which the
    two conflicting values were propagated.
    """
    fam, space = inst.family, inst.space
    C = inst.cone_labels
    W = [g for g in psi.window]
    wset = set(W)
    steps = space.steps
    h: dict = {}
    setter: dict = {}
    parent: dict = {}
    root = W[0]
    seen = {root}
    queue = deque([root])
    parent[root] = None
    comps = 0
    pending = list(W)
    while True:
        while queue:
            g = queue.popleft()
            off = psi.letters[g][0].offsets
            labs = [space.act(g, c) for c in C]
            anchor = next((i for i, lab in enumerate(labs) if lab in h), None)
            base = 0 if anchor is None else h[labs[anchor]] - off[anchor]
            for lab, o in zip(labs, off):
                if lab not in h:
                    h[lab] = base + o
                    setter[lab] = g
            for s in steps:
                x = fam.mul(g, s)
                if x in wset and x not in seen:
                    seen.add(x)
                    parent[x] = g
                    queue.append(x)
        comps += 1
        rest = next((g for g in pending if g not in seen), None)
        if rest is None:
            break
        seen.add(rest)
        parent[rest] = None
        queue.append(rest)

    def path(g):
        out = []
        while g is not None:
            out.append(g)
            g = parent[g]
        return out[::-1]

    checked = 0
    witness = None
    for g in W:
        off = psi.letters[g][0].offsets
        labs = [space.act(g, c) for c in C]
        base = h[labs[0]]
        for lab, o in zip(labs, off):
            checked += 1
            if h[lab] - base != o:
                witness = {"translate": g, "vertex": lab, "letter": o, "potential": h[lab] - base,
                           "cycle": path(g) + path(setter[lab])[::-1]}
                break
        if witness:
            break
    dom = inst.domain(psi.window)
    uncovered = 0
    for u, v in dom.graph.edges():
        a, b = dom.label(u), dom.label(v)
        if abs(h[a] - h[b]) > 1:
            uncovered += 1
    # anchor the potential at its minimum so equal cocycles give equal potentials
    m = min(h.values())
    h = {k: x - m for k, x in h.items()}
    consistent = witness is None and comps == 1
    if comps > 1 and witness is None:
        witness = {"disconnected_window": comps}
    return GlobalCocycle(h, consistent, checked, uncovered, witness)


def _coset_has_special(inst: BoundaryInstance, psi: BoundaryConfiguration, lab) -> bool:
    d = inst.datum_for_factor(lab[1])
    if d is None:
        return False
    specials = d.presentation.specials
    for g in psi.window:
        if d.coordinate(g)[0] == lab and psi.letters[g][d.index + 1] in specials:
            return True
    return False


def trace_gradient(inst: BoundaryInstance, psi: BoundaryConfiguration, start, cap: int = 64,
                   glob: GlobalCocycle | None = None) -> list[GradientLine]:
    """Maximal gradient lines of the globalised cocycle from ``start`` (labels).

    Terminals: ``"dead-end"`` at a complete vertex, or at a truncated
    parabolic vertex whose coset shows no special symbol in the window;
    ``"exits"`` at other truncated vertices; ``"capped"`` after ``cap`` steps.
    """
    glob = glob or globalise(inst, psi)
    dom = inst.domain(psi.window)
    g = dom.graph
    hid = {dom.id[lab]: x for lab, x in glob.h.items()}
    lines = gradient_lines(g, Cocycle(hid, "global"), dom.id[start], cap=cap)
    out = []
    for ln in lines:
        last = ln.vertices[-1]
        term = ln.terminal
        if term != "capped":
            lab = dom.label(last)
            if last in g.infinite:
                term = "exits" if _coset_has_special(inst, psi, lab) else "dead-end"
            elif last in g.incomplete:
                term = "exits"
            else:
                term = "dead-end"
        out.append(GradientLine(tuple(dom.label(v) for v in ln.vertices), term))
    return out


def default_starts(inst: BoundaryInstance, psi: BoundaryConfiguration, n: int = 10, seed: int = 0) -> list:
    dom = inst.domain(psi.window)
    labs = sorted(dom.id, key=inst.space.label_key)
    rng = random.Random(seed)
    return labs if len(labs) <= n else rng.sample(labs, n)


def pi_map(inst: BoundaryInstance, psi: BoundaryConfiguration, starts: Sequence | None = None, cap: int = 64,
           base=None, n_starts: int = 10, seed: int = 0) -> PiResult:
    """The point all gradient lines converge to, as far as the window can tell.

    Returns a vertex when every line stops at the same vertex, the common
    prefix (from ``base``) of geodesics to the exit points when every line
    leaves the domain, ``"undetermined"`` otherwise, and ``"violation"``
    when two lines stop at different vertices.
    """
    glob = globalise(inst, psi)
    if starts is None:
        starts = default_starts(inst, psi, n_starts, seed)
    if not glob.consistent:
        return PiResult("inconsistent", glob.witness, [], list(starts), True)
    dom = inst.domain(psi.window)
    lines = []
    for s in starts:
        lines.extend(trace_gradient(inst, psi, s, cap, glob))
    geo = all(is_geodesic(dom.graph, [dom.id[x] for x in ln.vertices]) for ln in lines)
    ends = {ln.vertices[-1] for ln in lines if ln.terminal == "dead-end"}
    exits = {ln.vertices[-1] for ln in lines if ln.terminal == "exits"}
    capped = any(ln.terminal == "capped" for ln in lines)
    cands = {"terminals": sorted(ends, key=inst.space.label_key), "exits": sorted(exits, key=inst.space.label_key)}
    if len(ends) > 1:
        return PiResult("violation", cands["terminals"], lines, list(starts), geo, cands)
    if ends and not exits and not capped:
        return PiResult("vertex", next(iter(ends)), lines, list(starts), geo, cands)
    if exits and not ends and not capped:
        if base is None:
            base = _window_base(inst, psi)
        paths = [first_geodesic(dom.graph, dom.id[base], dom.id[x]) for x in sorted(exits, key=inst.space.label_key)]
        prefix = []
        for col in zip(*paths):
            if all(c == col[0] for c in col):
                prefix.append(dom.label(col[0]))
            else:
                break
        return PiResult("ray", tuple(prefix), lines, list(starts), geo, cands)
    return PiResult("undetermined", None, lines, list(starts), geo, cands)


def _window_base(inst: BoundaryInstance, psi: BoundaryConfiguration):
    """Default base point: the translate of ``v0`` by the window's shortest element."""
    fam = inst.family
    g = min(psi.window, key=lambda x: (fam.length(x), fam.sort_key(x)))
    return inst.space.act(g, inst.params.base_vertex)


# ----------------------------------------------------------------------------
# expansivity

def _projection(fam: FreeProduct, f: int, lab) -> int:
    """Coordinate of the projection of a label onto the factor-``f`` coset of the identity."""
    x = lab[1] if lab[0] == "e" else lab[2]
    if x and x[0][0] == f:
        return x[0][1]
    return 0


def expansivity_witness(inst: BoundaryInstance, p1, p2, search_cap: int = 4) -> ExpansivityResult:
    """Search for ``gamma`` moving the pair ``(p1, p2)`` into the distinguished set.

    If one point is a parabolic vertex, ``gamma`` sends it to a representative
    ``p_i`` and its partner into the fundamental domain of the stabiliser
    (projection onto ``p_i``'s coset at the identity).  Otherwise ``gamma``
    makes some geodesic between the two pass through a representative edge.
    Only elements of length at most ``search_cap`` are tried.
    """
    if p1 == p2:
        raise ValueError("expansivity needs two distinct points")
    space, fam = inst.space, inst.family
    ref = inst.reference
    for lab in (p1, p2):
        if not ref.has_label(lab):
            raise ValueError(f"{lab!r} is not representable in the reference ball")
    candidates = sorted(fam.ball(search_cap), key=fam.sort_key)
    par = {d.vertex: d for d in inst.parabolics}

    def is_par(lab):
        return lab[0] == "c" and space.is_infinite(lab)

    if is_par(p1) or is_par(p2):
        a, b = (p1, p2) if is_par(p1) else (p2, p1)
        for gm in candidates:
            img = space.act(gm, a)
            if img not in par:
                continue
            d = par[img]
            q = space.act(gm, b)
            k = _projection(fam, d.vertex[1], q)
            g2 = fam.mul(d.embed(-k), gm)
            if fam.length(g2) <= 2 * search_cap:
                return ExpansivityResult(True, g2, "Y",
                                         f"sends {space.format_label(a)} to p_{d.index} and the partner to "
                                         f"{space.format_label(space.act(g2, b))}")
        return ExpansivityResult(False, None, "Y", f"not found at cap {search_cap}")
    u, v = ref.vertex_of(p1), ref.vertex_of(p2)
    du, dv = ref.bfs(u), ref.bfs(v)
    total = du[v]
    gens = set(fam.generators())
    found = []
    for x, y in ref.edges():
        if du.get(x, INF) + 1 + dv.get(y, INF) != total and du.get(y, INF) + 1 + dv.get(x, INF) != total:
            continue
        lx, ly = ref.labels[x], ref.labels[y]
        if lx[0] == "e" and ly[0] == "e":
            # orient so that the edge reads g -- g s with s a positive generator
            g1, g2 = (lx[1], ly[1]) if fam.mul(fam.inv(lx[1]), ly[1]) in gens else (ly[1], lx[1])
            found.append(fam.inv(g1))
        else:
            elem = lx if lx[0] == "e" else ly
            found.append(fam.inv(elem[1]))
    found = [gm for gm in found if fam.length(gm) <= search_cap]
    if not found:
        return ExpansivityResult(False, None, "X", f"not found at cap {search_cap}")
    gm = min(found, key=fam.sort_key)
    return ExpansivityResult(True, gm, "X", "a geodesic between the images crosses a representative edge")


# ----------------------------------------------------------------------------
# desk instances

def free_product_instance(spec="Z*Z", window_radius: int = 4, theta: int | None = None, ref_radius: int = 5,
                          containment: int = 1, delta: float | None = None) -> BoundaryInstance:
    """Coned-off Cayley graph of a free product with its infinite cyclic factors as parabolics.

    The base cone is the closed star of the identity (``R = 1``, ``Theta`` =
    oo), ``e_0`` joins the identity to the first generator, ``p_i`` is the
    cone vertex of the i-th infinite factor and ``e_i`` joins it to the
    identity.  Each parabolic is presented by the Z example with
    ``F_i = {0, 1}``.  ``theta`` defaults to ``ceil(5 delta)``.
    """
    fam = parse_family(spec) if isinstance(spec, str) else spec
    space = ConedCayleySpace(fam)
    if delta is None:
        delta = float(delta_estimate(space.induced(space.ball_labels(window_radius))).value)
    if theta is None:
        theta = max(1, math.ceil(5 * delta))
    one = ("e", fam.identity)
    base_edge = (one, ("e", fam.generators()[0]))
    params = BoundaryParams(delta, theta, 1, INF, one, base_edge, containment)
    z = z_example_subshift()
    pars = []
    for f, k in enumerate(fam.factors):
        if k != 0:
            continue
        pars.append(ParabolicDatum(
            len(pars), ("c", f, fam.identity), (("c", f, fam.identity), one), z,
            embed=(lambda n, f=f: fam.factor_element(f, n)),
            coordinate=(lambda g, f=f: (("c", f, fam.coset(g, f)[0]), fam.coset(g, f)[1]))))
    return build_instance(space, params, pars, window_radius, ref_radius)


def hyperbolic_instance(spec="Z", window_radius: int = 4, theta: int | None = None,
                        ref_radius: int | None = None) -> BoundaryInstance:
    """A hyperbolic group seen relative to the trivial subgroup: plain Cayley graph, no parabolics."""
    fam = parse_family(spec) if isinstance(spec, str) else spec
    space = ConedCayleySpace(fam, coned=False)
    ref_radius = ref_radius or window_radius + 2
    delta = float(delta_estimate(space.induced([("e", x) for x in fam.ball(window_radius)])).value)
    if theta is None:
        theta = max(1, math.ceil(5 * delta))
    one = ("e", fam.identity)
    params = BoundaryParams(delta, theta, 1, INF, one, (one, ("e", fam.generators()[0])))
    return build_instance(space, params, [], window_radius, ref_radius, specials_from_center=True)


def hyperbolic_presentation(spec="Z", window_radius: int = 4, theta: int | None = None) -> Presentation:
    """Special-symbol presentation of a hyperbolic group.

    The alphabet consists of restrictions of radial and Busemann cocycles to
    the closed star of the identity; the special letter is the restriction of
    the radial cocycle centred at the identity.
    """
    return hyperbolic_instance(spec, window_radius, theta).presentation


def alternating_ray(fam: FreeProduct, length: int, first: int = 0) -> list:
    """The geodesic ray ``1, s_0, s_0 s_1, ...`` through single letters of alternating factors."""
    out = [("e", fam.identity)]
    g = fam.identity
    f = first
    for _ in range(length):
        g = fam.mul(g, fam.factor_element(f, 1))
        out.append(("e", g))
        f = (f + 1) % len(fam.factors)
    return out
