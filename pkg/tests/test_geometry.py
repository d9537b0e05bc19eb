import itertools

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graph
from relhyp.geometry import (angle, angle_lower_bound, angle_reliable, circuit_angle_bound_check, circuits_through,
                             check_large_angle_triangle, cone, cone_bound, fineness_certificate, large_angle_sweep,
                             loop_max_angle, path_max_angle, visibility_ray)
from relhyp.graphs import INF, build_coned_cayley_ball, complete, cycle, delta_estimate, from_edges, line_ball

SEEDS = st.integers(0, 10_000)


def _nx(g):
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges())
    return G


def _angle_oracle(g, v, a, b):
    if a == b:
        return 0
    G = _nx(g)
    G.remove_node(v)
    try:
        return nx.shortest_path_length(G, a, b)
    except nx.NetworkXNoPath:
        return INF


def _tree():
    return from_edges([(0, 1), (0, 2), (0, 3), (1, 4), (2, 5)])


# -- angles

def test_angle_examples():
    assert angle(cycle(5), 0, (0, 1), (0, 4)) == 3
    assert angle(_tree(), 0, (0, 1), (0, 2)) == INF
    assert angle(cycle(5), 0, (0, 1), (0, 1)) == 0


def test_angle_rejects_non_edges():
    with pytest.raises(ValueError):
        angle(cycle(5), 0, (0, 2), (0, 1))
    with pytest.raises(ValueError):
        angle(cycle(5), 0, (1, 2), (0, 1))


@given(SEEDS)
def test_angle_matches_punctured_oracle(seed):
    g = small_graph(seed)
    for v in g.vertices:
        for a, b in itertools.combinations(g.neighbors(v), 2):
            assert angle(g, v, (v, a), (v, b)) == _angle_oracle(g, v, a, b)


@given(SEEDS)
def test_angle_triangle_inequality(seed):
    g = small_graph(seed)
    for v in g.vertices:
        for a, b, c in itertools.product(g.neighbors(v), repeat=3):
            e = [(v, a), (v, b), (v, c)]
            assert angle(g, v, e[0], e[2]) <= angle(g, v, e[0], e[1]) + angle(g, v, e[1], e[2])


@given(SEEDS, st.randoms(use_true_random=False))
def test_angle_relabelling_equivariance(seed, rnd):
    g = small_graph(seed)
    perm = list(g.vertices)
    rnd.shuffle(perm)
    sigma = dict(zip(g.vertices, perm))
    h = from_edges([(sigma[u], sigma[v]) for u, v in g.edges()], vertices=perm)
    for v in g.vertices:
        for a, b in itertools.combinations(g.neighbors(v), 2):
            assert angle(g, v, (v, a), (v, b)) == angle(h, sigma[v], (sigma[v], sigma[a]), (sigma[v], sigma[b]))


def test_truncated_angle_lower_bound():
    # a small ball can only overestimate; the lower bound stays below the value in a larger ball
    g = build_coned_cayley_ball("Z*Z", 2)
    sp = g.space
    p = g.vertex_of(sp.parse_label("c:A"))
    one, a2 = g.vertex_of(sp.parse_label("1")), g.vertex_of(sp.parse_label("a2"))
    val = angle(g, p, (p, one), (p, a2))
    assert angle_lower_bound(g, p, (p, one), (p, a2)) <= val
    big = build_coned_cayley_ball("Z*Z", 4)
    q = big.vertex_of(sp.parse_label("c:A"))
    true_val = angle(big, q, (q, big.vertex_of(sp.parse_label("1"))), (q, big.vertex_of(sp.parse_label("a2"))))
    assert angle_lower_bound(g, p, (p, one), (p, a2)) <= true_val <= val
    assert angle_reliable(cycle(5), 0, (0, 1), (0, 4))


# -- paths and circuits

def test_path_max_angle_examples():
    assert path_max_angle(cycle(7), [0, 1]) == 0
    assert path_max_angle(cycle(7), [0, 1, 2]) == 5
    assert path_max_angle(complete(4), [0, 1, 2]) == 1


def test_path_max_angle_rejects_non_simple():
    with pytest.raises(ValueError):
        path_max_angle(cycle(5), [0, 1, 0])


def _circuit_oracle(g, e, L):
    G = _nx(g).to_directed()
    out = set()
    for c in nx.simple_cycles(G, length_bound=L):
        if len(c) < 3:
            continue
        pairs = {frozenset((c[i], c[(i + 1) % len(c)])) for i in range(len(c))}
        if frozenset(e) in pairs:
            out.add(frozenset(pairs))
    return out


def test_circuit_examples():
    assert len(circuits_through(cycle(5), (0, 1), 5)) == 1
    assert circuits_through(cycle(5), (0, 1), 4) == []
    assert circuits_through(_tree(), (0, 1), 10) == []


@given(SEEDS, st.integers(3, 7))
def test_circuits_match_networkx(seed, L):
    g = small_graph(seed, 8)
    for e in g.edges():
        ours = {frozenset(frozenset((c[i], c[(i + 1) % len(c)])) for i in range(len(c)))
                for c in circuits_through(g, e, L)}
        assert ours == _circuit_oracle(g, e, L)


def test_fineness_examples():
    for n in (4, 5, 6):
        cert = fineness_certificate(cycle(n), n)
        assert set(cert.counts.values()) == {1} and cert.max == 1
    assert fineness_certificate(_tree(), 6).max == 0
    g = build_coned_cayley_ball("Z*Z", 2)
    G = _nx(g)
    tri = {e: len(set(G[e[0]]) & set(G[e[1]])) for e in g.edges()}
    cert = fineness_certificate(g, 3)
    assert cert.counts == tri and cert.max == max(tri.values())


def test_circuit_angle_examples():
    rep = circuit_angle_bound_check(cycle(6), 6)
    assert rep.checked == 1 and rep.tight == 1 and rep.ok
    assert loop_max_angle(cycle(6), [0, 1, 2, 3, 4, 5]) == 4
    rep = circuit_angle_bound_check(complete(4), 3)
    assert rep.checked == 4 and rep.tight == 4
    assert circuit_angle_bound_check(_tree(), 8).checked == 0


@given(SEEDS)
def test_circuit_angle_bound_property(seed):
    assert circuit_angle_bound_check(small_graph(seed, 8), 8).ok


# -- cones

def _cone_oracle(g, e, v, d, theta):
    """Vertices reached by some geodesic from v of length <= d with every angle <= theta."""
    G = _nx(g)
    start = e[1] if e[0] == v else e[0]
    out = {v}
    for w, dw in nx.single_source_shortest_path_length(G, v).items():
        if w == v or dw > d:
            continue
        for path in nx.all_shortest_paths(G, v, w):
            first = _angle_oracle(g, v, start, path[1])
            inner = max((_angle_oracle(g, path[i], path[i - 1], path[i + 1]) for i in range(1, len(path) - 1)),
                        default=0)
            if first <= theta and inner <= theta:
                out.add(w)
                break
    return out


def test_cone_examples():
    c7 = cycle(7)
    assert cone(c7, (0, 1), 0, 0, 5).members == {0}
    assert cone(c7, (0, 1), 0, 3, 2).members == {0, 1}
    assert cone(c7, (0, 1), 0, 3, 5).members == set(range(7))


@given(SEEDS, st.integers(0, 3), st.integers(0, 5))
def test_cone_matches_geodesic_oracle(seed, d, theta):
    g = small_graph(seed, 8)
    for v in g.vertices[:3]:
        for w in g.neighbors(v):
            assert cone(g, (v, w), v, d, theta).members == _cone_oracle(g, (v, w), v, d, theta)


@given(SEEDS)
def test_cone_monotone(seed):
    g = small_graph(seed)
    v = g.vertices[0]
    e = (v, g.neighbors(v)[0])
    for d, t in itertools.product(range(4), range(5)):
        c = cone(g, e, v, d, t).members
        assert c <= cone(g, e, v, d + 1, t).members
        assert c <= cone(g, e, v, d, t + 1).members


def test_cone_bound_on_coned_ball():
    g = build_coned_cayley_ball("Z*Z", 3)
    fin = {L: fineness_certificate(g, L).max for L in range(3, 7)}
    v = g.vertex_of(g.space.parse_label("1"))
    for w in g.neighbors(v):
        for d, t in itertools.product(range(1, 3), range(0, 5)):
            assert len(cone(g, (v, w), v, d, t)) <= cone_bound(fin, d, t)


# -- triangles and visibility

def test_triangle_in_tree():
    g = _tree()
    rep = check_large_angle_triangle(g, 0, 4, 5, 0)
    assert rep.applicable and rep.concatenation_geodesic and rep.x_on_every_geodesic and rep.ok


def test_triangle_not_applicable_on_cycle():
    rep = check_large_angle_triangle(cycle(8), 0, 2, 6, 1)
    assert not rep.applicable and rep.ok


def test_triangle_at_cayley_vertex():
    g = build_coned_cayley_ball("Z*Z", 3)
    sp = g.space
    x, y, z = (g.vertex_of(sp.parse_label(t)) for t in ("1", "a2", "b2"))
    rep = check_large_angle_triangle(g, x, y, z, delta_estimate(g).value)
    assert rep.applicable and rep.ok


def test_sweep_small_ball():
    g = build_coned_cayley_ball("Z*Z", 2)
    rep = large_angle_sweep(g, 0.5)
    assert rep.qualifying > 0 and rep.ok


def test_visibility_line():
    res = visibility_ray(line_ball(6), list(range(1, 7)), 0)
    assert res.determined and res.prefix == [0, 1, 2, 3, 4, 5]


def test_visibility_alternating_is_undetermined():
    res = visibility_ray(line_ball(6), [5, -5, 6, -6], 0)
    assert not res.determined


def test_visibility_grows_with_radius():
    lengths = []
    for r in (4, 6):
        g = build_coned_cayley_ball("Z*Z", r)
        fam = g.space.family
        targets, x = [], fam.identity
        for _ in range(r // 2):
            x = fam.mul(x, fam.parse("ab"))
            targets.append(("e", x))
        lengths.append(len(visibility_ray(g, targets, ("e", fam.identity)).prefix))
    assert lengths[0] < lengths[1]


def test_visibility_growing_balls():
    balls = [line_ball(n) for n in range(3, 8)]
    res = visibility_ray(balls, [3, 4, 5, 6, 7], 0)
    assert res.prefix == [0, 1, 2, 3, 4, 5, 6]

