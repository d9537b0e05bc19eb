"""Finite graphs, test families, coned-off Cayley balls, distances and hyperbolicity.

Distances are unweighted BFS lengths.  ``math.inf`` plays the role of the
extended natural ``oo``: it absorbs addition and dominates every integer.
"""
from __future__ import annotations

import itertools
import math
import random
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .groups import FreeProduct, Group, Integers, parse_family

INF = math.inf

#: hard cap on coned ball sizes, a stand-in for a memory budget
MAX_BALL_VERTICES = 200_000


class ResourceError(RuntimeError):
    pass


def canon_edge(u, v) -> tuple:
    return (u, v) if u <= v else (v, u)


class Graph:
    """An immutable simple graph with optional labels and truncation marks.

    Parameters
    ----------
    adjacency : mapping vertex -> iterable of neighbours
    labels : optional mapping vertex -> label (group element or coset tag)
    infinite : vertices standing for truncated infinite-valence vertices
    incomplete : vertices with neighbours outside the graph (truncation sphere)
    boundary_radius : ball radius at which the graph was cut, if any
    """

    def __init__(self, adjacency: Mapping, labels: Mapping | None = None, infinite: Iterable = (),
                 incomplete: Iterable = (), boundary_radius: int | None = None, name: str = ""):
        adj = {}
        for v, nbrs in adjacency.items():
            adj.setdefault(v, set())
            for w in nbrs:
                if w == v:
                    raise ValueError(f"self-loop at {v!r}")
                adj[v].add(w)
                adj.setdefault(w, set()).add(v)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        self.vertices = tuple(sorted(self._adj))
        self.labels = dict(labels) if labels else {}
        self._by_label = {lab: v for v, lab in self.labels.items()}
        self.infinite = frozenset(infinite)
        self.incomplete = frozenset(incomplete) | self.infinite
        for v in self.infinite | self.incomplete:
            if v not in self._adj:
                raise ValueError(f"marked vertex {v!r} is not a vertex")
        self.boundary_radius = boundary_radius
        self.name = name
        self._bfs: dict = {}
        self._punct: dict = {}

    # -- structure
    def neighbors(self, v) -> tuple:
        try:
            return self._adj[v]
        except KeyError:
            raise KeyError(f"unknown vertex {v!r}") from None

    def has_vertex(self, v) -> bool:
        return v in self._adj

    def has_edge(self, u, v) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> list[tuple]:
        return sorted({canon_edge(u, v) for u in self.vertices for v in self._adj[u]})

    def degree(self, v) -> int:
        return len(self._adj[v])

    def __len__(self):
        return len(self.vertices)

    def vertex_of(self, label):
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"no vertex with label {label!r}") from None

    def has_label(self, label) -> bool:
        return label in self._by_label

    def subgraph(self, keep: Iterable) -> "Graph":
        keep = set(keep)
        adj = {v: [w for w in self._adj[v] if w in keep] for v in self.vertices if v in keep}
        lost = {v for v in keep if len(adj[v]) < len(self._adj[v])}
        return Graph(adj, {v: lab for v, lab in self.labels.items() if v in keep},
                     self.infinite & keep, (self.incomplete & keep) | lost, self.boundary_radius)

    def __repr__(self):
        return f"Graph({self.name or '?'}: {len(self.vertices)} vertices, {len(self.edges())} edges)"

    # -- cached BFS
    def bfs(self, source) -> dict:
        """Distances from ``source`` to every reachable vertex."""
        if source not in self._adj:
            raise KeyError(f"unknown vertex {source!r}")
        d = self._bfs.get(source)
        if d is None:
            d = _bfs(self._adj, source)
            self._bfs[source] = d
        return d

    def punctured(self, v) -> dict:
        """For each neighbour ``a`` of ``v``: BFS distances from ``a`` in the graph minus ``v``."""
        out = self._punct.get(v)
        if out is None:
            out = {a: _bfs(self._adj, a, removed=v) for a in self._adj[v]}
            self._punct[v] = out
        return out


def _bfs(adj, source, removed=None) -> dict:
    dist = {source: 0}
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if w != removed and w not in dist:
                dist[w] = du
                q.append(w)
    return dist


# ----------------------------------------------------------------------------
# builders

def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph({i: [(i + 1) % n] for i in range(n)}, name=f"cycle({n})")


def line_ball(r: int) -> Graph:
    """The ball of radius ``r`` about 0 in the Cayley graph of Z."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    adj = {i: ([i + 1] if i < r else []) for i in range(-r, r + 1)}
    return Graph(adj, labels={i: ("e", i) for i in range(-r, r + 1)},
                 incomplete={-r, r}, boundary_radius=r, name=f"line_ball({r})")


def complete(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    return Graph({i: [j for j in range(n) if j != i] for i in range(n)}, name=f"complete({n})")


def from_edges(edges: Iterable[Sequence], vertices: Iterable | None = None, marks: Iterable = (),
               name: str = "explicit") -> Graph:
    adj: dict = {v: [] for v in (vertices or ())}
    for e in edges:
        if len(e) != 2:
            raise ValueError(f"edge {e!r} must have two endpoints")
        u, v = e
        if u == v:
            raise ValueError(f"self-loop at {u!r}")
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, [])
    return Graph(adj, infinite=marks, name=name)


_SPEC = re.compile(r"^(cycle|line_ball|line|complete)\(?(\d+)\)?$")


def build_test_graph(spec) -> Graph:
    """Build a graph from a family descriptor.

    Accepted forms: ``"cycle(5)"``, ``"line_ball(3)"``, ``"complete(4)"`` (the
    parentheses may be dropped, e.g. ``"cycle5"``), an explicit edge list, or a
    dict ``{"edges": [...], "vertices": [...], "marks": [...]}``.
    """
    if isinstance(spec, str):
        m = _SPEC.match(spec.replace(" ", ""))
        if not m:
            raise ValueError(f"malformed graph spec {spec!r}; expected cycle(n), line_ball(r), complete(n)")
        kind, n = m.group(1), int(m.group(2))
        if kind == "cycle":
            return cycle(n)
        if kind in ("line_ball", "line"):
            return line_ball(n)
        return complete(n)
    if isinstance(spec, Mapping):
        if "edges" not in spec:
            raise ValueError("explicit graph spec needs an 'edges' entry")
        return from_edges(spec["edges"], spec.get("vertices"), spec.get("marks", ()))
    if isinstance(spec, (list, tuple)):
        return from_edges(spec)
    raise ValueError(f"malformed graph spec {spec!r}")


class ConedCayleySpace:
    """The coned-off Cayley graph of a free product, described by labels.

    Element vertices are labelled ``("e", g)``; the cone vertex of the left
    coset ``g A_f`` is ``("c", f, rep)`` with ``rep`` the shortest element of
    the coset.  Edges: ``g -- g s^{+-1}`` for the factor generators ``s`` and
    ``g -- cone(g A_f)`` for every factor.  With ``coned=False`` this is the
    plain Cayley graph.
    """

    def __init__(self, family: FreeProduct | Group, coned: bool = True, extra_generators: Sequence = ()):
        self.family = family
        self.coned = coned and isinstance(family, FreeProduct)
        gens = list(family.generators()) + list(extra_generators)
        steps = []
        for s in gens:
            for t in (s, family.inv(s)):
                if t != family.identity and t not in steps:
                    steps.append(t)
        self.steps = steps

    def act(self, gamma, label):
        if label[0] == "e":
            return ("e", self.family.mul(gamma, label[1]))
        return self.family.act_label(gamma, label)

    def element(self, g):
        return ("e", g)

    def is_infinite(self, label) -> bool:
        return label[0] == "c" and self.family.factors[label[1]] == 0

    def cones_of(self, g) -> list:
        if not self.coned:
            return []
        return [("c", f, self.family.coset(g, f)[0]) for f in range(len(self.family.factors))]

    def element_neighbors(self, g) -> list:
        out = [("e", self.family.mul(g, s)) for s in self.steps]
        return out + self.cones_of(g)

    def coset_members(self, label, elements: Iterable) -> list:
        _, f, rep = label
        return [g for g in elements if self.family.coset(g, f)[0] == rep]

    def ball_labels(self, r: int) -> list:
        elems = self.family.ball(r)
        labels = [("e", g) for g in elems]
        seen = set()
        for g in elems:
            for c in self.cones_of(g):
                if c not in seen:
                    seen.add(c)
                    labels.append(c)
        return labels

    def label_key(self, label):
        fam = self.family
        if label[0] == "e":
            return (0, fam.sort_key(label[1]))
        return (1, fam.sort_key(label[2]), label[1])

    def format_label(self, label) -> str:
        if label[0] == "e":
            return self.family.format(label[1])
        return self.family.format_label(label)

    def parse_label(self, text: str):
        """Inverse of ``format_label``: ``"ab2"`` or ``"c:bA"`` (cone of the coset ``b<a>``)."""
        text = text.strip()
        if text.startswith("c:"):
            if not self.coned:
                raise ValueError(f"{text!r}: no cone vertices in a plain Cayley graph")
            body, letter = text[2:-1], text[-1]
            f = ord(letter.lower()) - ord("a")
            if not letter.isupper() or not 0 <= f < len(self.family.factors):
                raise ValueError(f"{text!r}: bad factor letter {letter!r}")
            rep = self.family.parse(body) if body else self.family.identity
            if self.family.coset(rep, f)[0] != rep:
                raise ValueError(f"{text!r}: {body!r} is not a shortest coset representative")
            return ("c", f, rep)
        return ("e", self.family.parse(text))

    def induced(self, labels: Iterable, radius: int | None = None, int_ids: bool | None = None) -> Graph:
        """The induced subgraph on a finite label set, with truncation flags."""
        labels = sorted(set(labels), key=self.label_key)
        if len(labels) > MAX_BALL_VERTICES:
            raise ResourceError(f"{len(labels)} vertices exceed the budget of {MAX_BALL_VERTICES}")
        if int_ids is None:
            int_ids = not isinstance(self.family, Integers)
        ids = {lab: (i if int_ids else lab[1]) for i, lab in enumerate(labels)}
        present = set(labels)
        adj = {ids[lab]: [] for lab in labels}
        incomplete = set()
        infinite = set()
        cone_members: dict = {}
        for lab in labels:
            if lab[0] != "e":
                continue
            for nb in self.element_neighbors(lab[1]):
                if nb in present:
                    adj[ids[lab]].append(ids[nb])
                    if nb[0] == "c":
                        cone_members.setdefault(nb, []).append(lab[1])
                else:
                    incomplete.add(ids[lab])
        for lab in labels:
            if lab[0] != "c":
                continue
            if self.is_infinite(lab):
                infinite.add(ids[lab])
            else:
                k = self.family.factors[lab[1]]
                if len(cone_members.get(lab, ())) < k:
                    incomplete.add(ids[lab])
        return Graph(adj, labels={ids[lab]: lab for lab in labels}, infinite=infinite,
                     incomplete=incomplete, boundary_radius=radius,
                     name=f"coned {self.family.name}" if self.coned else f"Cayley {self.family.name}")


def build_coned_cayley_ball(spec, r: int) -> Graph:
    """Ball of radius ``r`` (word length) of the coned-off Cayley graph of ``spec``.

    ``spec`` is a ``FreeProduct`` or a descriptor such as ``"Z*Z"`` or ``"Z*C2"``.
    Every coset visible from the ball gets its cone vertex; cones of infinite
    cyclic factors are marked as truncated infinite-valence vertices.
    """
    fam = parse_family(spec) if isinstance(spec, str) else spec
    if not isinstance(fam, FreeProduct):
        raise ValueError(f"coned ball needs a free product, got {fam!r}")
    if r < 0:
        raise ValueError("radius must be >= 0")
    # rough size estimate before enumerating
    branching = sum(2 if k == 0 else k - 1 for k in fam.factors)
    if branching ** r > MAX_BALL_VERTICES * 50:
        raise ResourceError(f"radius {r} exceeds the ball budget for {fam.name}")
    space = ConedCayleySpace(fam)
    g = space.induced(space.ball_labels(r), radius=r)
    g.name = f"coned {fam.name} ball r={r}"
    g.space = space
    return g


def build_cayley_ball(family: Group, r: int) -> Graph:
    """Ball of radius ``r`` in the plain Cayley graph (standard generators)."""
    space = ConedCayleySpace(family, coned=False)
    g = space.induced([("e", x) for x in family.ball(r)], radius=r)
    g.name = f"Cayley {family.name} ball r={r}"
    g.space = space
    return g


# ----------------------------------------------------------------------------
# metric

def distance(g: Graph, u, v):
    """BFS distance; ``inf`` across components."""
    if not g.has_vertex(v):
        raise KeyError(f"unknown vertex {v!r}")
    return g.bfs(u).get(v, INF)


def geodesics(g: Graph, u, v, cap: int = 1000) -> list[list]:
    """All geodesics from ``u`` to ``v`` in lexicographic order, at most ``cap``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    to_v = g.bfs(v)
    if not g.has_vertex(u):
        raise KeyError(f"unknown vertex {u!r}")
    if u not in to_v:
        return []
    out: list[list] = []
    path = [u]

    def walk(x):
        if len(out) >= cap:
            return
        if x == v:
            out.append(list(path))
            return
        dx = to_v[x]
        for w in g.neighbors(x):
            if to_v.get(w) == dx - 1:
                path.append(w)
                walk(w)
                path.pop()
                if len(out) >= cap:
                    return

    walk(u)
    return out


def first_geodesic(g: Graph, u, v) -> list | None:
    """The lexicographically first geodesic, without enumerating the others."""
    to_v = g.bfs(v)
    if u not in to_v:
        return None
    path = [u]
    while path[-1] != v:
        x = path[-1]
        path.append(next(w for w in g.neighbors(x) if to_v.get(w) == to_v[x] - 1))
    return path


def gromov_product(g: Graph, x, y, w) -> float:
    """``(x . y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2``."""
    dxw, dyw, dxy = distance(g, x, w), distance(g, y, w), distance(g, x, y)
    if INF in (dxw, dyw, dxy):
        raise ValueError("gromov_product needs the three vertices in one component")
    return (dxw + dyw - dxy) / 2


def distance_matrix(g: Graph, verts: Sequence | None = None) -> np.ndarray:
    verts = list(g.vertices if verts is None else verts)
    m = np.empty((len(verts), len(verts)), dtype=np.int64)
    for i, u in enumerate(verts):
        d = g.bfs(u)
        for j, v in enumerate(verts):
            dv = d.get(v)
            if dv is None:
                raise ValueError("graph is disconnected")
            m[i, j] = dv
    return m


@dataclass(frozen=True)
class DeltaEstimate:
    value: float
    exact: bool
    witness: tuple | None = None

    def __float__(self):
        return float(self.value)


def _fourpoint_exhaustive(dm: np.ndarray) -> tuple[float, tuple | None]:
    n = dm.shape[0]
    best, wit = 0.0, None
    if n < 4:
        return best, wit
    for x in range(n):
        for y in range(x + 1, n):
            s1 = dm[x, y] + dm                       # d(x,y)+d(z,w)
            s2 = dm[x][:, None] + dm[y][None, :]     # d(x,z)+d(y,w)
            s3 = dm[y][:, None] + dm[x][None, :]     # d(y,z)+d(x,w)
            stack = np.sort(np.stack([s1, s2, s3]), axis=0)
            gap = stack[2] - stack[1]
            k = int(gap.argmax())
            val = gap.flat[k] / 2
            if val > best:
                best = float(val)
                wit = (x, y) + divmod(k, n)
    return best, wit


def delta_estimate(g: Graph, limit: int = 160, samples: int = 200_000, seed: int = 0) -> DeltaEstimate:
    """Four-point hyperbolicity constant.

    The graph is split into biconnected components, which are convex, and the
    constant is the maximum over components.  Components with at most
    ``limit`` vertices are treated exhaustively; larger ones are sampled and the
    result is flagged as a lower bound (``exact=False``).
    """
    if len(g) == 0:
        return DeltaEstimate(0.0, True)
    if len(g.bfs(g.vertices[0])) != len(g):
        raise ValueError("delta_estimate needs a connected graph")
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges())
    best, wit, exact = 0.0, None, True
    seen_blocks = set()
    for block in nx.biconnected_components(G):
        if len(block) < 4:
            continue
        verts = sorted(block)
        key = tuple(verts)
        if key in seen_blocks:
            continue
        seen_blocks.add(key)
        dm = distance_matrix(g, verts)
        if len(verts) <= limit:
            val, w = _fourpoint_exhaustive(dm)
        else:
            exact = False
            val, w = _fourpoint_sampled(dm, samples, seed)
        if val > best:
            best, wit = val, tuple(verts[i] for i in w)
    return DeltaEstimate(best, exact, wit)


def _fourpoint_sampled(dm, samples, seed):
    rng = np.random.default_rng(seed)
    n = dm.shape[0]
    q = rng.integers(0, n, size=(samples, 4))
    x, y, z, w = q.T
    s = np.sort(np.stack([dm[x, y] + dm[z, w], dm[x, z] + dm[y, w], dm[x, w] + dm[y, z]]), axis=0)
    gap = (s[2] - s[1]) / 2
    k = int(gap.argmax())
    return float(gap[k]), tuple(int(t) for t in q[k])


def delta_bruteforce(g: Graph) -> float:
    """Reference four-point constant via Gromov products over all quadruples."""
    best = 0.0
    vs = g.vertices
    for w in vs:
        for x, y, z in itertools.product(vs, repeat=3):
            xy = gromov_product(g, x, y, w)
            xz = gromov_product(g, x, z, w)
            yz = gromov_product(g, y, z, w)
            best = max(best, min(xz, yz) - xy)
    return best


def random_connected_graph(n: int, p: float, rng: random.Random) -> Graph:
    """A random spanning tree on ``n`` vertices plus independent extra edges."""
    adj: dict = {0: []}
    for v in range(1, n):
        adj[v] = [rng.randrange(v)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                adj[u].append(v)
    return Graph(adj, name=f"random({n},{p})")
