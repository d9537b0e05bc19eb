import itertools
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relhyp.groups import FreeProduct, Integers, Lattice
from relhyp.sft import (NO_SYMBOL, Alphabet, BudgetExceeded, Configuration, Cylinder, Presentation,
                        PresentationViolation, act, enumerate_admissible, extends, first_violation, from_word,
                        interval, is_locally_admissible, pi_window, realize, special_symbol_count, translate_union,
                        translates_in, uniqueness_sweep, z_example_subshift)

Z_LANG = re.compile(r"a*\$b*|a*|b*")
WORDS = st.text(alphabet="ab$", min_size=0, max_size=12)


@pytest.fixture(scope="module")
def z():
    return z_example_subshift()


def _word(cfg):
    return "".join(cfg[g] for g in sorted(cfg.window))


def test_admissibility_examples(z):
    assert is_locally_admissible(z.cylinder, Integers(), from_word("aa$b"))
    assert not is_locally_admissible(z.cylinder, Integers(), from_word("ab"))
    assert is_locally_admissible(z.cylinder, Integers(), Configuration({}))


@given(WORDS, st.integers(-20, 20))
def test_admissibility_matches_language(z, w, start):
    cfg = from_word(w, start)
    assert z.admissible(cfg) == bool(Z_LANG.fullmatch(w))


def test_enumeration_length_three(z):
    got = {_word(c) for c in z.enumerate(interval(3))}
    assert got == {"aaa", "bbb", "$bb", "a$b", "aa$"}


@pytest.mark.parametrize("n", range(1, 11))
def test_enumeration_counts_against_bruteforce(z, n):
    want = {"".join(w) for w in itertools.product("ab$", repeat=n) if Z_LANG.fullmatch("".join(w))}
    got = [_word(c) for c in z.enumerate(interval(n, start=-3))]
    assert len(got) == len(set(got)) == n + 2
    assert set(got) == want


def test_enumeration_is_canonical_order(z):
    assert [_word(c) for c in z.enumerate(interval(3))] == ["aaa", "aa$", "a$b", "bbb", "$bb"]


def test_single_letter_alphabet():
    cyl = Cylinder((0, 1), frozenset({("x", "x")}))
    assert len(enumerate_admissible(cyl, Integers(), interval(6), ["x"])) == 1


def test_budget(z):
    with pytest.raises(BudgetExceeded):
        enumerate_admissible(z.cylinder, Integers(), interval(30), ["a", "b", "$"], budget=10)


def test_limit_and_fixed(z):
    assert len(enumerate_admissible(z.cylinder, Integers(), interval(5), z.alphabet, limit=2)) == 2
    pinned = enumerate_admissible(z.cylinder, Integers(), interval(5), z.alphabet, fixed={2: "$"})
    assert [_word(c) for c in pinned] == ["aa$bb"]


def test_window_must_be_representable(z):
    with pytest.raises(ValueError):
        z.enumerate([0.5])


def test_cylinder_validation():
    with pytest.raises(ValueError):
        Cylinder((), frozenset())
    with pytest.raises(ValueError):
        Cylinder((0, 1), frozenset({("a",)}))
    with pytest.raises(ValueError):
        Cylinder((0, 1))
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError):
        Alphabet(("a",), frozenset({"$"}))


def test_act_examples():
    Z = Integers()
    cfg = from_word("$b")
    assert act(Z, 0, cfg) == cfg
    assert act(Z, 1, cfg) == Configuration({1: "$", 2: "b"})


@given(WORDS, st.integers(-50, 50), st.integers(-50, 50))
def test_act_is_an_action(w, g, h):
    Z = Integers()
    cfg = from_word(w)
    assert act(Z, g, act(Z, -g, cfg)) == cfg
    assert act(Z, g, act(Z, h, cfg)) == act(Z, g + h, cfg)


@given(WORDS, st.integers(-50, 50))
def test_admissibility_is_shift_invariant(z, w, g):
    cfg = from_word(w)
    assert z.admissible(act(Integers(), g, cfg)) == z.admissible(cfg)


def test_act_on_free_product():
    fam = FreeProduct([0, 0])
    a, b = fam.parse("a"), fam.parse("b")
    cfg = Configuration({fam.identity: "x", a: "y"})
    moved = act(fam, b, cfg)
    assert moved.assignment == {b: "x", fam.mul(b, a): "y"}


def test_special_count_examples():
    assert special_symbol_count(from_word("aaa"), "$") == 0
    assert special_symbol_count(from_word("a$b"), "$") == 1
    assert special_symbol_count(from_word("$b$"), "$") == 2
    assert not z_example_subshift().admissible(from_word("$b$"))


def test_pi_window_examples(z):
    assert pi_window(z, from_word("aa$b")) == 2
    assert pi_window(z, from_word("aaaa")) == NO_SYMBOL
    assert pi_window(z, from_word("bbbb")) == NO_SYMBOL
    with pytest.raises(PresentationViolation):
        pi_window(z, from_word("$b$"))


@given(st.integers(1, 12), st.data())
def test_pi_window_locates_the_symbol(z, n, data):
    cfgs = z.enumerate(interval(n))
    cfg = data.draw(st.sampled_from(cfgs))
    w = _word(cfg)
    assert pi_window(z, cfg) == (w.index("$") if "$" in w else NO_SYMBOL)


@pytest.mark.parametrize("n", [1, 3, 8])
def test_constant_words(z, n):
    assert z.admissible(from_word("a" * n)) and z.admissible(from_word("b" * n))
    assert not z.admissible(from_word("b" * n + "a"))


def test_translates_and_union(z):
    assert translates_in(z.cylinder, Integers(), [0, 1, 2, 5]) == [0, 1]
    assert translate_union(z.cylinder, Integers(), [0, 3]) == [0, 1, 3, 4]
    L2 = Lattice(2)
    cyl = Cylinder(((0, 0), (1, 0)), frozenset({("x", "x")}))
    assert translates_in(cyl, L2, [(0, 0), (1, 0), (0, 1)]) == [(0, 0)]


def test_first_violation(z):
    assert first_violation(z.cylinder, Integers(), from_word("aa$ba")) == (3, ("b", "a"))
    assert first_violation(z.cylinder, Integers(), from_word("aa$bb")) is None


def test_uniqueness_and_realize(z):
    assert uniqueness_sweep(z, [interval(n) for n in range(1, 9)]).ok
    for n in range(1, 7):
        for at in range(n):
            cfg = realize(z, interval(n), at=at)
            assert cfg is not None and pi_window(z, cfg) == at
    assert pi_window(z, realize(z, interval(4))) == NO_SYMBOL


def test_extends(z):
    assert extends(z, from_word("a$"), [2, 3])
    assert not extends(z, Configuration({0: "b", 2: "a"}), [1])


def test_presentation_rejects_foreign_letters(z):
    assert not z.admissible(Configuration({0: "c"}))
    assert isinstance(z, Presentation)
