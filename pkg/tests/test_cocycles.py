import itertools
import math

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graph
from relhyp.cocycles import (busemann_cocycle, gradient_lines, is_geodesic, radial_cocycle, restrict,
                             verify_cocycle_axioms)
from relhyp.graphs import build_coned_cayley_ball, cycle, delta_estimate, distance, from_edges, line_ball

SEEDS = st.integers(0, 10_000)


def test_radial_examples():
    c = radial_cocycle(cycle(6), 3)
    assert c(2, 2) == 0
    assert c(0, 1) == -1
    lb = line_ball(5)
    r = radial_cocycle(lb, 0)
    for w, v in itertools.product(lb.vertices, repeat=2):
        assert r(w, v) == abs(v) - abs(w)


@given(SEEDS)
def test_radial_cocycle_identity(seed):
    g = small_graph(seed)
    p = g.vertices[-1]
    c = radial_cocycle(g, p)
    for x, y, z in itertools.product(g.vertices, repeat=3):
        assert c(x, y) + c(y, z) + c(z, x) == 0
    for u, v in g.edges():
        assert abs(c(u, v)) <= 1


def test_busemann_on_line():
    lb = line_ball(20)
    c = busemann_cocycle(lb, list(range(21)))
    assert c.stabilized
    assert all(c.h[v] == -v for v in c.region)
    for w, v in itertools.product(c.region, repeat=2):
        assert c(w, v) == w - v


@pytest.mark.parametrize("horizon", range(1, 8))
def test_busemann_base_point_is_zero(horizon):
    c = busemann_cocycle(line_ball(8), list(range(9)), horizon)
    assert c.h[0] == 0


def test_busemann_unstable_horizon():
    # a hexagon with a tail; at horizon 6 the ray tip sits opposite its entry point
    g = from_edges([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6), (6, 7), (7, 8)])
    ray = [8, 7, 6, 0, 1, 2, 3]
    assert busemann_cocycle(g, ray, 5).stabilized
    assert not busemann_cocycle(g, ray, 6).stabilized


def test_busemann_rejects_non_geodesic_ray():
    with pytest.raises(ValueError):
        busemann_cocycle(cycle(6), [0, 1, 2, 3, 4])


def test_gradient_examples():
    lines = gradient_lines(cycle(6), radial_cocycle(cycle(6), 3), 0)
    assert sorted(ln.vertices for ln in lines) == [(0, 1, 2, 3), (0, 5, 4, 3)]
    assert all(ln.terminal == "center" for ln in lines)
    (only,) = gradient_lines(cycle(6), radial_cocycle(cycle(6), 3), 3)
    assert only.vertices == (3,)
    lb = line_ball(10)
    (bus,) = gradient_lines(lb, busemann_cocycle(lb, list(range(11))), 0)
    assert bus.vertices[:4] == (0, 1, 2, 3) and bus.terminal == "exits"


@given(SEEDS)
def test_radial_gradient_lines_are_geodesics_to_center(seed):
    g = small_graph(seed, 8)
    G = nx.Graph(g.edges())
    G.add_nodes_from(g.vertices)
    p = g.vertices[0]
    c = radial_cocycle(g, p)
    for v in g.vertices:
        got = sorted(ln.vertices for ln in gradient_lines(g, c, v))
        want = sorted(tuple(x) for x in nx.all_shortest_paths(G, v, p))
        assert got == want


def test_gradient_cap():
    lb = line_ball(10)
    (ln,) = gradient_lines(lb, busemann_cocycle(lb, list(range(11))), -10, cap=3)
    assert len(ln) == 3 and ln.terminal == "capped"


def test_axioms_radial():
    for g in (cycle(7), line_ball(4), small_graph(5)):
        rep = verify_cocycle_axioms(g, radial_cocycle(g, g.vertices[0]), 3)
        assert rep.integral and rep.cocycle and rep.exits


def test_axioms_busemann_on_line():
    lb = line_ball(8)
    assert verify_cocycle_axioms(lb, busemann_cocycle(lb, list(range(9))), 3).ok


@pytest.mark.parametrize("center", ["1", "ab", "c:A"])
def test_axioms_on_coned_ball(center):
    g = build_coned_cayley_ball("Z*Z", 3)
    theta = math.ceil(5 * delta_estimate(g).value)
    rep = verify_cocycle_axioms(g, radial_cocycle(g, g.vertex_of(g.space.parse_label(center))), theta)
    assert rep.ok and rep.counts["extension"] > 0


def test_axioms_detect_small_theta_on_cycle():
    # at the antipode of a hexagon the angle is 4, yet the concatenation is not geodesic
    rep = verify_cocycle_axioms(cycle(6), radial_cocycle(cycle(6), 0), 3)
    assert not rep.extension
    assert verify_cocycle_axioms(cycle(6), radial_cocycle(cycle(6), 0), 5).ok


def test_restrict_examples():
    lb = line_ball(6)
    c = radial_cocycle(lb, 2)
    assert restrict(c, [4]).offsets == (0,)
    left = restrict(radial_cocycle(lb, -3), [-1, 0, 1])
    right = restrict(radial_cocycle(lb, 3), [-1, 0, 1])
    assert left != right
    assert left.offsets == (0, 1, 2) and right.offsets == (0, -1, -2)


@given(SEEDS)
def test_restrict_bounded_by_diameter(seed):
    g = small_graph(seed)
    region = g.vertices[:4]
    diam = max(distance(g, u, v) for u, v in itertools.product(region, repeat=2))
    for p in g.vertices:
        letter = restrict(radial_cocycle(g, p), region)
        assert max(letter.offsets) - min(letter.offsets) <= diam
        for u, v in itertools.product(region, repeat=2):
            assert letter(u, v) == distance(g, v, p) - distance(g, u, p)


def test_restrict_outside_domain():
    g = from_edges([(0, 1), (2, 3)])
    with pytest.raises(KeyError):
        restrict(radial_cocycle(g, 0), [0, 2])


def test_is_geodesic():
    assert is_geodesic(cycle(6), [0, 1, 2, 3])
    assert not is_geodesic(cycle(6), [0, 1, 2, 3, 4])
