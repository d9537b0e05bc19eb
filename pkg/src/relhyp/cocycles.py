"""Radial and Busemann cocycles stored as integer potentials, and gradient lines.

A potential ``h`` represents the cocycle ``phi(w, v) = h(v) - h(w)``.  A
gradient line is a vertex sequence along which ``h`` drops by exactly one at
each step, i.e. ``phi(v_{i+1}, v_i) = 1``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .geometry import nbr_angle
from .graphs import Graph, distance


@dataclass(frozen=True)
class Cocycle:
    """A cocycle given by its potential.

    ``flavor`` is ``"radial"`` (``source`` is the center), ``"busemann"``
    (``source`` is the ray) or ``"global"`` (integrated from letters).
    """

    h: Mapping
    flavor: str
    source: object = None
    horizon: int | None = None
    stabilized: bool = True
    region: frozenset | None = None

    def __call__(self, w, v) -> int:
        return self.h[v] - self.h[w]

    @property
    def domain(self):
        return self.h.keys()

    @property
    def center(self):
        return self.source if self.flavor == "radial" else None


def radial_cocycle(g: Graph, p) -> Cocycle:
    """The radial cocycle of ``p``: potential ``h = d(., p)`` on p's component."""
    h = dict(g.bfs(p))
    return Cocycle(h, "radial", p)


def _check_ray(g: Graph, ray: Sequence):
    d0 = g.bfs(ray[0])
    for i, v in enumerate(ray):
        if d0.get(v) != i:
            raise ValueError(f"ray is not geodesic at index {i}")
        if i and not g.has_edge(ray[i - 1], v):
            raise ValueError(f"ray is not a path at index {i}")


def busemann_cocycle(g: Graph, ray: Sequence, horizon: int | None = None,
                     region: Iterable | None = None) -> Cocycle:
    """Busemann cocycle evaluated at a fixed horizon.

    ``h(v) = d(v, ray[n]) - n`` with ``n = horizon``.  The stabilisation flag
    compares with ``n - 1`` on ``region``, by default the vertices within
    distance ``n - 1`` of ``ray[0]`` (values near the tip of a finite ray are
    never stable).
    """
    ray = list(ray)
    if horizon is None:
        horizon = len(ray) - 1
    if horizon < 1 or horizon > len(ray) - 1:
        raise ValueError(f"horizon {horizon} outside 1..{len(ray) - 1}")
    _check_ray(g, ray)
    dn = g.bfs(ray[horizon])
    dm = g.bfs(ray[horizon - 1])
    h = {v: dv - horizon for v, dv in dn.items()}
    if region is None:
        d0 = g.bfs(ray[0])
        region = [v for v in h if d0[v] <= horizon - 1]
    region = frozenset(region)
    stable = all(dm[v] - (horizon - 1) == h[v] for v in region)
    return Cocycle(h, "busemann", tuple(ray), horizon, stable, region)


@dataclass(frozen=True)
class GradientLine:
    vertices: tuple
    terminal: str  # "center", "dead-end", "exits", "capped"

    def __len__(self):
        return len(self.vertices) - 1


def descending(g: Graph, h: Mapping, v) -> list:
    hv = h[v]
    return [w for w in g.neighbors(v) if h.get(w) == hv - 1]


def classify_stop(g: Graph, c: Cocycle, v) -> str:
    if c.flavor == "radial" and v == c.source:
        return "center"
    if v in g.incomplete:
        return "exits"
    return "dead-end"


def gradient_lines(g: Graph, c: Cocycle, v, cap: int = 64, limit: int = 10_000) -> list[GradientLine]:
    """All maximal gradient lines from ``v``, each at most ``cap`` steps long."""
    if v not in c.h:
        raise KeyError(f"{v!r} not in the cocycle's domain")
    out: list[GradientLine] = []
    path = [v]

    def walk(x):
        if len(out) >= limit:
            return
        nxt = descending(g, c.h, x)
        if not nxt:
            out.append(GradientLine(tuple(path), classify_stop(g, c, x)))
            return
        if len(path) - 1 >= cap:
            out.append(GradientLine(tuple(path), "capped"))
            return
        for w in nxt:
            path.append(w)
            walk(w)
            path.pop()

    walk(v)
    return out


@dataclass
class AxiomReport:
    integral: bool = True
    cocycle: bool = True
    extension: bool = True
    exits: bool = True
    witnesses: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.integral and self.cocycle and self.extension and self.exits


def _segments_into(g: Graph, v, theta) -> list[list]:
    """Geodesic segments [x, v] with length < theta and MaxAng < theta."""
    out = []
    dv = g.bfs(v)
    # grow backwards from v; a segment is stored as [x, ..., v]
    stack = [[v]]
    while stack:
        seg = stack.pop()
        if len(seg) > 1:
            out.append(seg)
        if len(seg) >= theta:  # length len(seg)-1 must stay below theta
            continue
        head = seg[0]
        for x in g.neighbors(head):
            if dv.get(x) != dv[head] + 1:
                continue
            if len(seg) >= 2 and nbr_angle(g, head, x, seg[1]) >= theta:
                continue
            stack.append([x] + seg)
    return out


def verify_cocycle_axioms(g: Graph, c: Cocycle, theta, samples: int = 2000, seed: int = 0) -> AxiomReport:
    """Check the four cocycle axioms on the graph.

    (1) adjacent values in {-1,0,1}; (2) cocycle identity on sampled triples;
    (3) geodesic extension: a segment [x, v] of length and MaxAng below theta
    meeting a gradient line at v with angle at least theta extends it;
    (4) every complete vertex other than a radial center has an exit.
    """
    rep = AxiomReport()
    h = c.h
    dom = [v for v in g.vertices if v in h]
    for v in dom:
        for w in g.neighbors(v):
            if w in h and abs(h[w] - h[v]) > 1:
                rep.integral = False
                rep.witnesses.setdefault("integral", (v, w))
    rng = random.Random(seed)
    triples = (list(itertools.product(dom, repeat=3)) if len(dom) ** 3 <= samples
               else [tuple(rng.choice(dom) for _ in range(3)) for _ in range(samples)])
    for x, y, z in triples:
        if c(x, y) + c(y, z) + c(z, x) != 0:
            rep.cocycle = False
            rep.witnesses.setdefault("cocycle", (x, y, z))
    checked = 0
    for v in dom:
        firsts = descending(g, h, v)
        if not firsts:
            continue
        for seg in _segments_into(g, v, theta):
            if any(x not in h for x in seg):
                continue
            last = seg[-2]
            for w in firsts:
                if nbr_angle(g, v, last, w) < theta:
                    continue
                checked += 1
                if h[seg[0]] - h[v] != len(seg) - 1:
                    rep.extension = False
                    rep.witnesses.setdefault("extension", (seg, w))
    rep.counts["extension"] = checked
    skipped = 0
    for v in dom:
        if c.flavor == "radial" and v == c.source:
            continue
        if v in g.incomplete:
            skipped += 1
            continue
        if not descending(g, h, v):
            rep.exits = False
            rep.witnesses.setdefault("exits", v)
    rep.counts["exits_skipped_incomplete"] = skipped
    return rep


@dataclass(frozen=True)
class RestrictionLetter:
    """Canonical restriction of a cocycle to a finite region.

    ``offsets[i] = h(domain[i]) - h(domain[0])`` over the sorted domain; the
    pair value is ``letter(u, v) = phi(u, v)``.
    """

    domain: tuple
    offsets: tuple

    def __call__(self, u, v) -> int:
        i, j = self.domain.index(u), self.domain.index(v)
        return self.offsets[j] - self.offsets[i]

    def value(self, u) -> int:
        return self.offsets[self.domain.index(u)]

    def serialize(self) -> str:
        return "[" + ",".join(str(o) for o in self.offsets) + "]"

    def __repr__(self):
        return f"Letter{self.serialize()}"


def restrict(c: Cocycle, region: Iterable, key=None) -> RestrictionLetter:
    dom = tuple(sorted(region, key=key))
    missing = [v for v in dom if v not in c.h]
    if missing:
        raise KeyError(f"region leaves the domain at {missing[:3]!r}")
    if not dom:
        return RestrictionLetter((), ())
    base = c.h[dom[0]]
    return RestrictionLetter(dom, tuple(c.h[v] - base for v in dom))


def is_geodesic(g: Graph, path: Sequence) -> bool:
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:])) and \
        distance(g, path[0], path[-1]) == len(path) - 1
