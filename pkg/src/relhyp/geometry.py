"""Angles, circuits, fineness, cones and the large-angle triangle lemma.

The angle at ``v`` between edges ``(v, a)`` and ``(v, b)`` is the distance
from ``a`` to ``b`` once ``v`` is deleted.  On truncated balls this value can
only be too large (the ball is a subgraph); ``angle_reliable`` certifies when
no detour through the truncation sphere could be shorter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graphs import INF, Graph, canon_edge, distance, first_geodesic


def _far(v, e) -> object:
    u, w = e
    if u == v:
        return w
    if w == v:
        return u
    raise ValueError(f"edge {e!r} is not incident on {v!r}")


def _check_edge(g: Graph, e):
    if len(e) != 2 or not g.has_edge(*e):
        raise ValueError(f"{e!r} is not an edge")


def angle(g: Graph, v, e1, e2):
    """Ang_v(e1, e2): distance between the far endpoints in ``g - v``."""
    _check_edge(g, e1)
    _check_edge(g, e2)
    a, b = _far(v, e1), _far(v, e2)
    if a == b:
        return 0
    return g.punctured(v)[a].get(b, INF)


def nbr_angle(g: Graph, v, a, b):
    """Angle at ``v`` between the edges to neighbours ``a`` and ``b`` (no checks)."""
    if a == b:
        return 0
    return g.punctured(v)[a].get(b, INF)


def angle_reliable(g: Graph, v, e1, e2) -> bool:
    """True when the ball value equals the angle in every graph containing the ball.

    Any avoiding path that leaves the ball exits at an incomplete vertex x and
    re-enters at an incomplete vertex y, costing at least d'(a,x) + 2 + d'(y,b).
    """
    val = angle(g, v, e1, e2)
    a, b = _far(v, e1), _far(v, e2)
    if a == b:
        return True
    da, db = g.punctured(v)[a], g.punctured(v)[b]
    exits = [x for x in g.incomplete if x != v]
    if not exits:
        return True
    ea = min((da.get(x, INF) for x in exits), default=INF)
    eb = min((db.get(x, INF) for x in exits), default=INF)
    return ea + 2 + eb >= val


def angle_lower_bound(g: Graph, v, e1, e2):
    """A lower bound on the angle in every graph containing the ball (same argument as above)."""
    val = angle(g, v, e1, e2)
    a, b = _far(v, e1), _far(v, e2)
    if a == b:
        return 0
    da, db = g.punctured(v)[a], g.punctured(v)[b]
    exits = [x for x in g.incomplete if x != v]
    ea = min((da.get(x, INF) for x in exits), default=INF)
    eb = min((db.get(x, INF) for x in exits), default=INF)
    return min(val, ea + 2 + eb)


def _check_simple_path(g: Graph, path: Sequence):
    if len(set(path)) != len(path):
        raise ValueError("path is not simple")
    for x, y in zip(path, path[1:]):
        if not g.has_edge(x, y):
            raise ValueError(f"({x!r},{y!r}) is not an edge")


def path_max_angle(g: Graph, path: Sequence):
    """MaxAng of a simple path; 0 for paths with fewer than two edges."""
    _check_simple_path(g, path)
    best = 0
    for a, v, b in zip(path, path[1:], path[2:]):
        best = max(best, nbr_angle(g, v, a, b))
    return best


def loop_max_angle(g: Graph, loop: Sequence):
    """MaxAng of a circuit, consecutive edges taken cyclically."""
    n = len(loop)
    return max(nbr_angle(g, loop[i], loop[i - 1], loop[(i + 1) % n]) for i in range(n))


# ----------------------------------------------------------------------------
# circuits

def _canon_loop(loop: Sequence) -> tuple:
    n = len(loop)
    i = min(range(n), key=lambda k: loop[k])
    fwd = tuple(loop[i:] + loop[:i]) if isinstance(loop, list) else tuple(list(loop[i:]) + list(loop[:i]))
    bwd = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, bwd)


def circuits_through(g: Graph, e, L: int) -> list[tuple]:
    """Circuits (simple loops, length >= 3) of length at most ``L`` through ``e``.

    Loops are returned in canonical form: rotated to start at the least vertex,
    oriented towards the smaller of its two neighbours; sorted.
    """
    _check_edge(g, e)
    u, v = e
    if L < 3:
        return []
    # distances to u avoiding the edge (u, v) bound the remaining search
    dist_u = _bfs_without_edge(g, u, (u, v))
    out = set()
    path = [v]
    on_path = {v, u}

    def walk(x, used):
        for w in g.neighbors(x):
            if w == u:
                if used >= 1:  # at least one intermediate vertex
                    out.add(_canon_loop([u] + path))
                continue
            if w in on_path:
                continue
            # need used+1 edges to reach w, then dist to u, plus the edge (u, v)
            if used + 1 + dist_u.get(w, INF) + 1 > L:
                continue
            on_path.add(w)
            path.append(w)
            walk(w, used + 1)
            path.pop()
            on_path.discard(w)

    if dist_u.get(v, INF) + 1 <= L:
        walk(v, 0)
    return sorted(out)


def _bfs_without_edge(g: Graph, source, edge) -> dict:
    a, b = edge
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for x in frontier:
            for w in g.neighbors(x):
                if (x == a and w == b) or (x == b and w == a):
                    continue
                if w not in dist:
                    dist[w] = dist[x] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def all_circuits(g: Graph, L: int) -> list[tuple]:
    seen = set()
    for e in g.edges():
        seen.update(circuits_through(g, e, L))
    return sorted(seen)


@dataclass
class FinenessCertificate:
    L: int
    counts: dict
    max: int


def fineness_certificate(g: Graph, L: int) -> FinenessCertificate:
    counts = {e: len(circuits_through(g, e, L)) for e in g.edges()}
    return FinenessCertificate(L, counts, max(counts.values(), default=0))


@dataclass
class CircuitAngleReport:
    L: int
    checked: int
    violations: list = field(default_factory=list)
    tight: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def circuit_angle_bound_check(g: Graph, L: int) -> CircuitAngleReport:
    """Check MaxAng(c) <= len(c) - 2 for every circuit of length at most ``L``."""
    rep = CircuitAngleReport(L, 0)
    for c in all_circuits(g, L):
        rep.checked += 1
        m = loop_max_angle(g, c)
        if m > len(c) - 2:
            rep.violations.append((c, m))
        elif m == len(c) - 2:
            rep.tight += 1
    return rep


# ----------------------------------------------------------------------------
# cones

@dataclass(frozen=True)
class Cone:
    center_edge: tuple
    apex: object
    radius: int
    angle_bound: object
    members: frozenset

    def __contains__(self, w):
        return w in self.members

    def __len__(self):
        return len(self.members)


def cone(g: Graph, e, v, d: int, theta) -> Cone:
    """Cone_{d,theta}(e, v).

    Built one radius at a time: a vertex at distance ``k+1`` joins when it is
    in the radius-1 cone, at angle ``theta``, of an edge ``(u, t)`` through
    which some admissible geodesic of length ``k`` reaches ``u``.  At ``k = 0``
    the role of ``(u, t)`` is played by ``e`` itself.
    """
    _check_edge(g, e)
    start = _far(v, e)
    dist = g.bfs(v)
    members = {v}
    # arrivals[u] = predecessors t through which an admissible geodesic reaches u
    arrivals = {v: None}
    layer = [v]
    for k in range(d):
        nxt: dict = {}
        for u in layer:
            preds = arrivals[u]
            pu = g.punctured(u)
            for w in g.neighbors(u):
                if dist.get(w) != k + 1:
                    continue
                if preds is None:
                    ok = w == start or pu[start].get(w, INF) <= theta
                else:
                    ok = any(t == w or pu[t].get(w, INF) <= theta for t in preds)
                if ok:
                    nxt.setdefault(w, set()).add(u)
        if not nxt:
            break
        arrivals.update(nxt)
        members.update(nxt)
        layer = sorted(nxt)
    return Cone(canon_edge(*e), v, d, theta, frozenset(members))


def cone_bound(fineness: dict[int, int], d: int, theta) -> int:
    """Upper bound on |Cone_{d,theta}| from per-edge circuit counts.

    ``fineness[L]`` is the maximum number of circuits of length at most ``L``
    through one edge.  An edge at angle ``a <= theta`` from a given edge closes
    a circuit of length ``a + 2``, so a radius-1 cone holds at most
    ``2 + N(theta + 2)`` vertices; the radius induction adds, for each ordered
    pair of adjacent members, at most ``N(theta + 2)`` new vertices.
    """
    if d == 0:
        return 1
    L = theta + 2
    n = 0 if L < 3 else fineness[L]  # no circuits shorter than 3
    b = 2 + n
    for _ in range(d - 1):
        b = b + b * (b - 1) * n
    return b


# ----------------------------------------------------------------------------
# large-angle triangles

@dataclass
class TriangleReport:
    x: object
    y: object
    z: object
    angle: object
    threshold: float
    applicable: bool
    concatenation_geodesic: bool | None = None
    x_on_every_geodesic: bool | None = None
    angle_bound_holds: bool | None = None
    min_through_angle: object = None

    @property
    def ok(self) -> bool:
        return (not self.applicable) or bool(self.concatenation_geodesic and self.x_on_every_geodesic
                                             and self.angle_bound_holds)


def check_large_angle_triangle(g: Graph, x, y, z, delta: float, factor: float = 50) -> TriangleReport:
    """Check the conclusions of the large-angle triangle lemma for one triple."""
    thr = factor * delta
    gy, gz = first_geodesic(g, x, y), first_geodesic(g, x, z)
    if gy is None or gz is None or len(gy) < 2 or len(gz) < 2:
        return TriangleReport(x, y, z, None, thr, False)
    ang = nbr_angle(g, x, gy[1], gz[1])
    rep = TriangleReport(x, y, z, ang, thr, ang >= thr)
    if not rep.applicable:
        return rep
    dyz = distance(g, y, z)
    rep.concatenation_geodesic = dyz == distance(g, y, x) + distance(g, x, z)
    punct = g.subgraph(w for w in g.vertices if w != x)
    rep.x_on_every_geodesic = rep.concatenation_geodesic and distance(punct, y, z) > dyz
    # smallest angle at x over geodesics [y, z] through x
    dy, dz = g.bfs(y), g.bfs(z)
    us = [u for u in g.neighbors(x) if dy.get(u) == dy[x] - 1]
    ws = [w for w in g.neighbors(x) if dz.get(w) == dz[x] - 1]
    through = min((nbr_angle(g, x, u, w) for u in us for w in ws), default=INF)
    rep.min_through_angle = through
    rep.angle_bound_holds = through >= ang - thr
    return rep


@dataclass
class SweepReport:
    delta: float
    threshold: float
    qualifying: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def large_angle_sweep(g: Graph, delta: float, factor: float = 50, centers: Iterable | None = None) -> SweepReport:
    """Run the triangle check over every triple, vectorised per center ``x``.

    Geodesics ``[x, y]`` are the lexicographically first ones, so the first
    step from ``x`` toward ``y`` is the least neighbour one unit closer to ``y``.
    """
    thr = factor * delta
    verts = list(g.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    D = np.full((n, n), np.iinfo(np.int64).max // 4, dtype=np.int64)
    for v in verts:
        for w, dw in g.bfs(v).items():
            D[idx[v], idx[w]] = dw
    rep = SweepReport(delta, thr)
    for x in (verts if centers is None else centers):
        xi = idx[x]
        nbrs = list(g.neighbors(x))
        if len(nbrs) < 2:
            continue
        ni = np.array([idx[u] for u in nbrs])
        k = len(nbrs)
        A = np.array([[nbr_angle(g, x, a, b) for b in nbrs] for a in nbrs], dtype=float)
        # first step from x toward each target: least neighbour with D[u, t] = D[x, t] - 1
        onestep = D[ni, :] == (D[xi, :] - 1)[None, :]
        has = onestep.any(axis=0)
        first = np.where(has, onestep.argmax(axis=0), -1)
        targets = np.nonzero(has)[0]
        if len(targets) < 2:
            continue
        fa = first[targets]
        ang = A[fa[:, None], fa[None, :]]
        qual = ang >= thr
        np.fill_diagonal(qual, False)
        if not qual.any():
            continue
        # punctured distances for the "every geodesic contains x" check
        keep = [v for v in verts if v != x]
        P = _punctured_matrix(g, x, keep, idx, n)
        yi_s, zi_s = np.nonzero(qual)
        ys, zs = targets[yi_s], targets[zi_s]
        dyz = D[ys, zs]
        concat = dyz == D[ys, xi] + D[xi, zs]
        avoid = P[ys, zs] > dyz
        # through-angle: predecessors of x toward y and successors toward z
        pre_y = (D[ni][:, ys] == (D[xi, ys] - 1)[None, :])   # k x Q
        suc_z = (D[ni][:, zs] == (D[xi, zs] - 1)[None, :])
        big = np.where(pre_y[:, None, :] & suc_z[None, :, :], A[:, :, None], np.inf)
        through = big.reshape(k * k, -1).min(axis=0)
        a_q = ang[yi_s, zi_s]
        bound = through >= a_q - thr
        rep.qualifying += len(ys)
        bad = ~(concat & avoid & bound)
        for j in np.nonzero(bad)[0][:20]:
            rep.violations.append((x, verts[ys[j]], verts[zs[j]], bool(concat[j]), bool(avoid[j]), bool(bound[j])))
    return rep


def _punctured_matrix(g: Graph, x, keep, idx, n) -> np.ndarray:
    sub = g.subgraph(keep)
    P = np.full((n, n), np.iinfo(np.int64).max // 4, dtype=np.int64)
    for v in keep:
        for w, dw in sub.bfs(v).items():
            P[idx[v], idx[w]] = dw
    return P


# ----------------------------------------------------------------------------
# visibility

@dataclass
class VisibilityResult:
    prefix: list | None
    witnesses: list
    determined: bool

    def __repr__(self):
        if not self.determined:
            return "VisibilityResult(undetermined at this radius)"
        return f"VisibilityResult(prefix={self.prefix}, witnesses={self.witnesses})"


def visibility_ray(g_sequence, targets: Sequence, base, min_tail: int = 2) -> VisibilityResult:
    """Longest geodesic prefix from ``base`` shared by a tail of geodesics to the targets.

    ``g_sequence`` is a single graph or one graph per target (growing balls).
    The geodesic ``[base, target_n]`` is the lexicographically first one in the
    n-th graph.  A prefix counts as stabilised when every geodesic from some
    index on starts with it and that tail has at least ``min_tail`` members.
    """
    graphs = g_sequence if isinstance(g_sequence, (list, tuple)) else [g_sequence] * len(targets)
    if len(graphs) != len(targets):
        raise ValueError("need one graph per target")
    geos = []
    for gr, t in zip(graphs, targets):
        b, tv = _resolve(gr, base), _resolve(gr, t)
        p = first_geodesic(gr, b, tv)
        if p is None:
            raise ValueError(f"target {t!r} not reachable from {base!r}")
        geos.append([gr.labels[v] if gr.labels and _is_label(gr, base) else v for v in p])
    best: list = [geos[0][0]] if geos else [base]
    wit: list = []
    for start in range(len(geos) - min_tail + 1):
        tail = geos[start:]
        common = _common_prefix(tail)
        if len(common) > len(best):
            best, wit = common, list(range(start, len(geos)))
    if len(best) <= 1:
        return VisibilityResult(None, [], False)
    return VisibilityResult(best, wit, True)


def _common_prefix(paths: list[list]) -> list:
    out = []
    for items in zip(*paths):
        if all(it == items[0] for it in items):
            out.append(items[0])
        else:
            break
    return out


def _is_label(g: Graph, x) -> bool:
    return bool(g.labels) and g.has_label(x)


def _resolve(g: Graph, x):
    return g.vertex_of(x) if _is_label(g, x) else x
