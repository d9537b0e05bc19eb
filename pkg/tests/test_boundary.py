import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhyp import boundary as bd
from relhyp.groups import Integers


def e(x):
    return ("e", x)


# -- the hyperbolic line

def test_line_shape(line_instance):
    L = line_instance
    assert L.cone_labels == (e(-1), e(0), e(1))
    assert [a.offsets for a in L.alphabet_prime.letters] == [(0, -1, -2), (0, -1, 0), (0, 1, 2)]
    assert L.F == (-1, 0)
    assert L.presentation.cylinder.F == (-1, 0, 1)
    assert L.parabolics == []
    assert not L.params.asymptotic_regime


def test_line_alphabet_matches_direct_restrictions(line_instance):
    # oracle: d(c, x) - d(c, -1) on the three cone vertices, over every centre of the reference ball
    ref = [line_instance.reference.labels[v][1] for v in line_instance.reference.vertices]
    direct = {tuple(abs(c - x) - abs(c + 1) for x in (-1, 0, 1)) for c in ref}
    assert {a.offsets for a in line_instance.alphabet_prime.letters} == direct


@pytest.mark.parametrize("p", range(-4, 5))
def test_line_encode(line_instance, p):
    psi = bd.encode(line_instance, e(p))
    for g in psi.window:
        want = (0, -1, -2) if g < p else (0, 1, 2) if g > p else (0, -1, 0)
        assert psi.psi0(g).offsets == want
    assert bd.is_admissible(line_instance, psi)
    res = bd.pi_map(line_instance, psi)
    assert (res.kind, res.value) == ("vertex", e(p))


def test_line_special_letter_marks_the_centre(line_instance):
    psi = bd.encode(line_instance, e(2))
    cfg = psi.as_configuration()
    sp = line_instance.presentation.specials
    assert [g for g in psi.window if cfg[g] in sp] == [2]


def test_line_ray(line_instance):
    psi = bd.encode(line_instance, [e(i) for i in range(9)])
    res = bd.pi_map(line_instance, psi)
    assert res.kind == "ray"
    assert res.value == tuple(e(i) for i in range(6))


def test_line_trace(line_instance):
    psi = bd.encode(line_instance, e(2))
    lines = bd.trace_gradient(line_instance, psi, e(2))
    assert [(ln.vertices, ln.terminal) for ln in lines] == [((e(2),), "dead-end")]
    psi = bd.encode(line_instance, [e(i) for i in range(9)])
    lines = bd.trace_gradient(line_instance, psi, e(-2))
    assert len(lines) == 1 and lines[0].terminal == "exits"
    assert lines[0].vertices[0] == e(-2)


def test_line_mismatched_letters_rejected(line_instance):
    psi = bd.encode(line_instance, e(0))
    bad = dict(psi.letters)
    # a right-pointing letter next to a left-pointing one disagrees on the overlap
    bad[-1], bad[0] = psi.letters[3], psi.letters[-3]
    assert not bd.is_admissible(line_instance, bd.BoundaryConfiguration(psi.window, bad))


# -- Z * Z

def test_zz_shape(zz_instance):
    Z = zz_instance
    assert Z.params.delta == 0.5 and Z.params.theta == 3
    assert len(Z.cone_labels) == 7
    assert len(Z.alphabet_prime) == 11
    assert len(Z.parabolics) == 2
    assert all(fp.members == (-1, 0, 1) for fp in Z.f_prime.values())
    assert len(Z.window) == 161


def test_f_prime_grows_with_theta(zz_instance):
    ref = zz_instance.reference
    d = zz_instance.parabolics[0]
    wide = bd.compute_f_prime(ref, d, 100)
    assert len(wide.members) == 11 and wide.partial
    mid = bd.compute_f_prime(ref, d, 6)
    assert mid.members == tuple(range(-3, 4)) and mid.partial


def test_f_prime_must_contain_f(zz_instance):
    with pytest.raises(ValueError):
        bd.compute_f_prime(zz_instance.reference, zz_instance.parabolics[0], 0)


def test_single_cone_letter(zz_instance):
    Z = zz_instance
    a = Z.space.parse_label("a")
    psi = bd.encode(Z, a, window=[()])
    assert psi.psi0(()).offsets == (0, 1, -1, 1, 1, 0, 1)


def test_globalise_recovers_distance(zz_instance):
    Z = zz_instance
    p = Z.space.parse_label("ab")
    psi = bd.encode(Z, p)
    glob = bd.globalise(Z, psi)
    assert glob.consistent
    dom = Z.domain()
    dist = dom.graph.bfs(dom.id[p])
    assert {glob.h[dom.label(v)] - dist[v] for v in dom.graph.vertices} == {0}


def test_corrupted_letter_gives_witness(zz_instance):
    Z = zz_instance
    psi = bd.encode(Z, Z.space.parse_label("ab"))
    far = bd.encode(Z, Z.space.parse_label("a-3"))
    g = next(x for x in psi.window if far.psi0(x) != psi.psi0(x))
    bad = dict(psi.letters)
    bad[g] = (far.psi0(g),) + psi.letters[g][1:]
    cfg = bd.BoundaryConfiguration(psi.window, bad)
    glob = bd.globalise(Z, cfg)
    assert not glob.consistent
    assert glob.witness["translate"] in psi.window and len(glob.witness["cycle"]) >= 2
    assert bd.pi_map(Z, cfg).kind == "inconsistent"
    assert not bd.is_admissible(Z, cfg)


def test_parabolic_pattern_mutation_rejected(zz_instance):
    Z = zz_instance
    fam = Z.space.family
    psi = bd.encode(Z, Z.space.parse_label("ab"))
    bad = dict(psi.letters)
    one, a = fam.identity, fam.parse("a")
    # "b" followed by "a" along the a-coset is not an allowed pattern
    bad[one] = psi.letters[one][:1] + ("b",) + psi.letters[one][2:]
    bad[a] = psi.letters[a][:1] + ("a",) + psi.letters[a][2:]
    assert not bd.is_admissible(Z, bd.BoundaryConfiguration(psi.window, bad))


@pytest.mark.parametrize("word", ["", "a", "ab", "ba-1", "aab", "c:A", "c:bA", "c:aB"])
def test_zz_pi_recovers_the_vertex(zz_instance, word):
    Z = zz_instance
    p = Z.space.parse_label(word) if word else e(Z.space.family.identity)
    psi = bd.encode(Z, p)
    assert bd.is_admissible(Z, psi)
    res = bd.pi_map(Z, psi, n_starts=10, seed=3)
    assert (res.kind, res.value) == ("vertex", p)
    assert res.geodesic


def test_zz_encode_equivariant(zz_instance):
    Z = zz_instance
    fam, space = Z.space.family, Z.space
    p = space.parse_label("ab")
    gm = fam.parse("a")
    lhs = bd.encode(Z, space.act(gm, p))
    rhs = bd.act(Z, gm, bd.encode(Z, p))
    common = set(lhs.window) & set(rhs.window)
    # oracle: g with |g| <= 4 and |a^-1 g| <= 4
    assert common == {g for g in fam.ball(4) if fam.length(fam.mul(fam.inv(gm), g)) <= 4}
    assert all(lhs.psi0(g) == rhs.psi0(g) for g in common)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_zz_pi_equivariant(zz_instance, seed):
    Z = zz_instance
    rng = random.Random(seed)
    p = rng.choice(Z.space.ball_labels(3))
    gm = rng.choice(Z.family.ball(2))
    psi = bd.encode(Z, p)
    r1 = bd.pi_map(Z, psi, n_starts=5, seed=seed)
    r2 = bd.pi_map(Z, bd.act(Z, gm, psi), starts=[Z.space.act(gm, s) for s in r1.starts])
    assert r1.kind == r2.kind == "vertex"
    assert r2.value == Z.space.act(gm, r1.value)


def test_zz_busemann_ray(zz_instance):
    Z = zz_instance
    ray = bd.alternating_ray(Z.space.family, 12)
    psi = bd.encode(Z, ray)
    assert bd.is_admissible(Z, psi)
    res = bd.pi_map(Z, psi, n_starts=10, seed=1)
    assert res.kind == "ray"
    assert res.value == tuple(ray[:len(res.value)]) and len(res.value) >= 3


def test_expansivity(zz_instance):
    Z = zz_instance
    sp = Z.space
    one = e(Z.family.identity)
    res = bd.expansivity_witness(Z, one, sp.parse_label("a"))
    assert res.found and res.kind == "X" and res.gamma == Z.family.identity
    res = bd.expansivity_witness(Z, sp.parse_label("c:bA"), sp.parse_label("ab"))
    assert res.found and res.kind == "Y"
    assert sp.act(res.gamma, sp.parse_label("c:bA")) in {d.vertex for d in Z.parabolics}
    with pytest.raises(ValueError):
        bd.expansivity_witness(Z, one, one)


def test_params_validation():
    with pytest.raises(ValueError):
        bd.BoundaryParams(0.5, 0, 1, 1, e(0), (e(0), e(1)))
    with pytest.raises(ValueError):
        bd.BoundaryParams(0.5, 3, 1, 1, e(5), (e(0), e(1)))
    assert bd.BoundaryParams(0.001, 3, 1, 1, e(0), (e(0), e(1)), containment=30).asymptotic_regime


def test_hyperbolic_presentation_is_a_presentation():
    p = bd.hyperbolic_presentation("Z", window_radius=3)
    assert isinstance(p.family, Integers)
    assert len(p.alphabet) == 3 and len(p.specials) == 1
