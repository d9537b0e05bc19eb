import itertools

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graph
from relhyp.graphs import (INF, ConedCayleySpace, Graph, ResourceError, build_coned_cayley_ball, build_test_graph,
                           cycle, delta_bruteforce, delta_estimate, distance, from_edges, geodesics,
                           gromov_product, line_ball)
from relhyp.groups import parse_family

SEEDS = st.integers(0, 10_000)


def _nx(g):
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges())
    return G


@pytest.mark.parametrize("spec,nv,ne", [("cycle(5)", 5, 5), ("line_ball(3)", 7, 6), ("complete(4)", 4, 6),
                                        ("cycle5", 5, 5)])
def test_test_families(spec, nv, ne):
    g = build_test_graph(spec)
    assert (len(g), len(g.edges())) == (nv, ne)


def test_line_ball_vertices():
    assert build_test_graph("line_ball(3)").vertices == tuple(range(-3, 4))


@pytest.mark.parametrize("bad", ["cycle(2)", "wheel(4)", "cycle(-1)", 42])
def test_malformed_specs_raise(bad):
    with pytest.raises(ValueError):
        build_test_graph(bad)


def test_explicit_edge_list():
    g = build_test_graph({"edges": [(0, 1), (1, 2)], "vertices": [0, 1, 2, 3]})
    assert len(g) == 4 and distance(g, 0, 3) == INF


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        Graph({0: [0]})


def _word_oracle(r):
    """Reduced words in a, A, b, B of length <= r, cone tags and edges, by hand."""
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    words, frontier = {""}, {""}
    for _ in range(r):
        frontier = {w + s for w in frontier for s in "aAbB" if not (w and w[-1] == inv[s])}
        words |= frontier

    def red(w):
        st_ = []
        for c in w:
            if st_ and st_[-1] == inv[c]:
                st_.pop()
            else:
                st_.append(c)
        return "".join(st_)

    def tag(w, f):
        letters = "aA" if f == 0 else "bB"
        while w and w[-1] in letters:
            w = w[:-1]
        return (f, w)

    edges, cones = set(), set()
    for w in words:
        for s in "aAbB":
            if red(w + s) in words:
                edges.add(frozenset((w, red(w + s))))
        for f in (0, 1):
            cones.add(tag(w, f))
            edges.add(frozenset((w, tag(w, f))))
    return len(words) + len(cones), len(edges)


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_coned_ball_counts_match_word_oracle(r):
    g = build_coned_cayley_ball("Z*Z", r)
    assert (len(g), len(g.edges())) == _word_oracle(r)


def test_coned_ball_radius_zero():
    g = build_coned_cayley_ball("Z*Z", 0)
    labels = sorted(g.labels.values(), key=g.space.label_key)
    assert labels[0] == ("e", ())
    assert {lab[0] for lab in labels[1:]} == {"c"}
    assert len(g.infinite) == 2


def test_finite_cones_are_not_infinite():
    g = build_coned_cayley_ball("Z*C2", 2)
    c2 = [v for v in g.vertices if g.labels[v][:2] == ("c", 1)]
    assert c2 and not any(v in g.infinite for v in c2)
    full = [v for v in c2 if v not in g.incomplete]
    assert full and all(g.degree(v) == 2 for v in full)


def test_ball_budget():
    with pytest.raises(ResourceError):
        build_coned_cayley_ball("Z*Z*Z", 12)


def test_coned_ball_needs_free_product():
    with pytest.raises(ValueError):
        build_coned_cayley_ball("Z^2", 2)


def test_label_round_trip():
    g = build_coned_cayley_ball("Z*Z", 3)
    sp = g.space
    for lab in g.labels.values():
        assert sp.parse_label(sp.format_label(lab)) == lab


def test_parse_label_rejects_non_shortest_rep():
    sp = ConedCayleySpace(parse_family("Z*Z"))
    with pytest.raises(ValueError):
        sp.parse_label("c:aA")


def test_distance_examples():
    c6 = cycle(6)
    assert distance(c6, 0, 3) == 3
    assert distance(c6, 2, 2) == 0
    g = from_edges([(0, 1), (2, 3)])
    assert distance(g, 0, 3) == INF


def test_geodesic_examples():
    assert len(geodesics(cycle(6), 0, 3)) == 2
    assert geodesics(line_ball(3), -2, 2) == [[-2, -1, 0, 1, 2]]
    assert geodesics(cycle(6), 4, 4) == [[4]]


def test_gromov_examples():
    lb = line_ball(3)
    assert gromov_product(lb, -2, 2, 0) == 0
    assert gromov_product(lb, 1, 1, 1) == 0
    # the distance formula gives (1|5)_0 = (1 + 1 - 2)/2 = 0; basing at 1 instead gives 1
    assert gromov_product(cycle(6), 1, 5, 0) == 0
    assert gromov_product(cycle(6), 5, 0, 1) == 1


def test_gromov_disconnected_raises():
    with pytest.raises(ValueError):
        gromov_product(from_edges([(0, 1), (2, 3)]), 0, 1, 3)


def test_delta_examples():
    assert delta_estimate(line_ball(4)).value == 0
    assert delta_estimate(Graph({0: []})).value == 0
    assert delta_estimate(cycle(4)).value == 1.0
    assert delta_estimate(build_coned_cayley_ball("Z*Z", 4)).value == 0.5


@given(SEEDS)
def test_distance_matches_networkx(seed):
    g = small_graph(seed)
    lengths = dict(nx.all_pairs_shortest_path_length(_nx(g)))
    for u, v in itertools.product(g.vertices, repeat=2):
        assert distance(g, u, v) == lengths[u][v]


@given(SEEDS)
def test_geodesics_match_networkx(seed):
    g = small_graph(seed, 8)
    G = _nx(g)
    for u, v in itertools.combinations(g.vertices, 2):
        want = sorted(nx.all_shortest_paths(G, u, v))
        assert sorted(geodesics(g, u, v)) == want


@given(SEEDS)
def test_gromov_product_bounds(seed):
    g = small_graph(seed)
    for x, y, w in itertools.product(g.vertices, repeat=3):
        gp = gromov_product(g, x, y, w)
        assert 0 <= gp <= min(distance(g, x, w), distance(g, y, w))
        assert gp == gromov_product(g, y, x, w)
        assert 2 * gp == int(2 * gp)


@given(SEEDS)
def test_delta_matches_bruteforce(seed):
    g = small_graph(seed, 7)
    assert delta_estimate(g).value == delta_bruteforce(g)


def test_trees_have_delta_zero():
    T = nx.random_labeled_tree(12, seed=3) if hasattr(nx, "random_labeled_tree") else nx.random_tree(12, seed=3)
    g = from_edges(list(T.edges()))
    assert delta_estimate(g).value == 0
