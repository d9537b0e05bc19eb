import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relhyp.groups import Cyclic, Integers, Subgroup, TableGroup
from relhyp.presentations import (CosetData, ExtensionData, artificial_even_presentation, check_generation,
                                  dihedral_extension, fi_decode, fi_encode, fi_pi, finite_group_presentation,
                                  finite_index_presentation, generates, lattice_extension, multiples_cosets,
                                  poly_hyperbolic_compose, product_presentation, trivial_presentation)
from relhyp.sft import (NO_SYMBOL, interval, pi_window, realize, special_symbol_count, translate_union,
                        uniqueness_sweep, z_example_subshift)


@pytest.fixture(scope="module")
def z():
    return z_example_subshift()


# -- finite groups

@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_finite_cyclic_counts(k):
    p = finite_group_presentation(Cyclic(k))
    cfgs = p.enumerate(range(k))
    assert len(cfgs) == k
    assert sorted(pi_window(p, c) for c in cfgs) == list(range(k))


def test_trivial_group():
    assert len(trivial_presentation().enumerate([0])) == 1


def test_nonabelian_table():
    # S3 as permutations of (0, 1, 2), indexed in lexicographic order
    perms = sorted(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    p = finite_group_presentation(TableGroup(table, name="S3"))
    assert len(p.enumerate(range(6))) == 6


def test_table_validation():
    with pytest.raises(ValueError):
        TableGroup([[0, 1], [0, 1]])


# -- products

@pytest.fixture(scope="module")
def z2(z):
    return product_presentation(z, z, lattice_extension(2))


def test_z2_shape(z2):
    assert z2.cylinder.F == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert len(z2.cylinder.M) == 64 and len(z2.alphabet) == 9
    assert z2.specials == frozenset({("$", "$")})


def test_z2_has_no_double_special_on_3x3(z2):
    box = [(i, j) for i in range(3) for j in range(3)]
    cfgs = z2.enumerate(box)
    assert len(cfgs) == 625
    assert all(special_symbol_count(c, z2.specials) <= 1 for c in cfgs)
    for x in box:
        c = realize(z2, box, at=x)
        assert c is not None and pi_window(z2, c) == x


def _trivial_ext(n_trivial: bool):
    t = trivial_presentation().family
    if n_trivial:
        return ExtensionData(Integers(), t, Integers(), embed=lambda n: 0, section=lambda h: h, quotient=lambda x: x)
    return ExtensionData(Integers(), Integers(), t, embed=lambda n: n, section=lambda h: 0, quotient=lambda x: 0)


def test_trivial_kernel_reduces_to_quotient(z):
    p = product_presentation(trivial_presentation(), z, _trivial_ext(True))
    assert [len(p.enumerate(interval(n))) for n in range(1, 8)] == [n + 2 for n in range(1, 8)]
    assert {a for a, _ in p.alphabet.letters} == set(z.alphabet.letters)


def test_trivial_quotient_reduces_to_kernel(z):
    p = product_presentation(z, trivial_presentation(), _trivial_ext(False))
    assert [len(p.enumerate(interval(n))) for n in range(1, 8)] == [n + 2 for n in range(1, 8)]
    assert {b for _, b in p.alphabet.letters} == set(z.alphabet.letters)


def test_extension_validation(z):
    bad = ExtensionData(Integers(), Integers(), Integers(), embed=lambda n: n, section=lambda h: h + 1,
                        quotient=lambda x: x)
    with pytest.raises(ValueError):
        product_presentation(z, z, bad)


def test_non_generating_kernel_window_rejected(z):
    with pytest.raises(ValueError):
        product_presentation(artificial_even_presentation(), z, lattice_extension(2))


def test_generates():
    assert generates(Integers(), (0, 1))
    assert not generates(Integers(), (0, 2))


def test_dihedral(z):
    p = product_presentation(z, finite_group_presentation(Cyclic(2)), dihedral_extension())
    fam = p.family
    assert len(p.cylinder.M) == 32
    wins = [translate_union(p.cylinder, fam, fam.ball(r)) for r in range(3)]
    assert uniqueness_sweep(p, wins).ok


def test_compose_chain_of_one(z):
    assert poly_hyperbolic_compose([z]) is z


def test_compose_z3(z):
    p = poly_hyperbolic_compose([z, (z, lattice_extension(2)), (z, lattice_extension(3))])
    assert len(p.cylinder.F) == 8 and len(p.cylinder.M) == 16384
    cube = [(i, j, k) for i in range(2) for j in range(2) for k in range(2)]
    assert uniqueness_sweep(p, [cube]).ok


def test_compose_empty():
    with pytest.raises(ValueError):
        poly_hyperbolic_compose([])


# -- finite index

def test_literal_lift_shape(z):
    p = finite_index_presentation(z, multiples_cosets(2), literal=True)
    assert p.cylinder.F == (0,)
    assert len(p.cylinder.M) == 4
    assert set(p.alphabet.letters) == set(itertools.product("ab$", repeat=2))
    # one site per translate: the patterns are the ambient patterns read as single letters
    assert p.cylinder.M == {(m,) for m in z.cylinder.M}


@pytest.mark.parametrize("k", [2, 3])
def test_completed_lift_bijects(z, k):
    cos = multiples_cosets(k)
    p = finite_index_presentation(z, cos)
    assert p.cylinder.F == (0, k)
    for m in range(1, 5):
        win = [k * i for i in range(m)]
        mine = p.enumerate(win)
        amb = z.enumerate(interval(k * m))
        assert len(mine) == len(amb) == k * m + 2
        assert {fi_decode(cos, c) for c in mine} == set(amb)
        for c in amb:
            assert fi_decode(cos, fi_encode(cos, c)) == c


def test_index_one_is_identity(z):
    whole = CosetData(Integers(), Subgroup(Integers(), [1], lambda x: True, name="Z"), (0,))
    p = finite_index_presentation(z, whole)
    assert p.cylinder.F == z.cylinder.F
    assert [len(p.enumerate(interval(n))) for n in range(1, 6)] == [n + 2 for n in range(1, 6)]


@given(st.integers(1, 6), st.integers(0, 11))
def test_fi_pi_tracks_the_symbol(z, m, at):
    cos = multiples_cosets(2)
    p = finite_index_presentation(z, cos)
    cfg = realize(z, interval(2 * m), at=at if at < 2 * m else None)
    enc = fi_encode(cos, cfg)
    assert p.admissible(enc)
    assert fi_pi(cos, p, enc) == (at if at < 2 * m else NO_SYMBOL)


def test_coset_data_validation():
    bad = CosetData(Integers(), multiples_cosets(2).subgroup, (0, 2))
    with pytest.raises(ValueError):
        bad.validate()


# -- generation

def test_generation_examples(z):
    assert check_generation(z).connected
    assert check_generation(finite_group_presentation(Cyclic(4))).connected
    rep = check_generation(artificial_even_presentation())
    assert not rep.connected and len(rep.components) == 2
    assert rep.witness_admissible and rep.witness_specials == 2
    parities = {x % 2 for x in rep.seeds}
    assert parities == {0, 1}
