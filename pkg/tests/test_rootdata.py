import random
from fractions import Fraction

import pytest

from uqmod import rootdata as rd
from oracles import weyl_orbit_action


def test_build_examples():
    d = rd.build("A", 2)
    assert set(d.positive_roots) == {(1, 0), (0, 1), (1, 1)}
    d1 = rd.build("A", 1)
    assert d1.positive_roots == ((1,),)
    dc = rd.build("C", 2)
    assert set(dc.positive_roots) == {(1, 0), (0, 1), (1, 1), (1, 2)}
    assert dc.root_length((1, 0)) == "long"
    assert dc.root_length((1, 2)) == "long"
    assert dc.root_length((0, 1)) == "short"
    with pytest.raises(ValueError):
        rd.build("G", 2)
    with pytest.raises(ValueError):
        rd.build("E", 8)
    with pytest.raises(ValueError):
        rd.build("C", 1)


def test_prefix_enumeration():
    for kind, rank in [("A", 2), ("A", 3), ("A", 4), ("B", 3), ("C", 2),
                       ("C", 3), ("D", 4)]:
        d = rd.build(kind, rank)
        pref = d.w0_prefix_roots
        assert len(pref) == len(d.positive_roots)
        assert sorted(pref) == sorted(d.positive_roots)
        assert all(all(c >= 0 for c in b) for b in pref)


def test_pairing_normalization():
    for kind, rank in [("A", 3), ("B", 3), ("C", 3), ("D", 4)]:
        d = rd.build(kind, rank)
        for beta in d.positive_roots:
            assert d.pairing(beta, beta) in (2, 4)
            for gamma in d.positive_roots:
                assert Fraction(2 * d.pairing(gamma, beta),
                                d.pairing(beta, beta)).denominator == 1


def test_weyl_act_examples():
    d = rd.build("A", 2)
    assert rd.weyl_act(d, (0,), d.simple_root(1)) == (1, 1)
    assert rd.weyl_act(d, (), (4, -1)) == (4, -1)
    d3 = rd.build("A", 3)
    for i in range(3):
        img = rd.weyl_act(d3, d3.w0_word, d3.simple_root(i))
        assert img == tuple(-c for c in d3.simple_root(2 - i))


def test_weyl_act_matches_oracle():
    rng = random.Random(1)
    for kind, rank in [("A", 3), ("C", 3)]:
        d = rd.build(kind, rank)
        for _ in range(15):
            word = tuple(rng.randrange(rank) for _ in range(6))
            mu = tuple(rng.randint(-3, 3) for _ in range(rank))
            assert rd.weyl_act(d, word, mu) == weyl_orbit_action(d, word, mu)


def test_word_composition():
    rng = random.Random(2)
    d = rd.build("C", 3)
    for _ in range(10):
        w1 = tuple(rng.randrange(3) for _ in range(4))
        w2 = tuple(rng.randrange(3) for _ in range(4))
        mu = tuple(rng.randint(-2, 2) for _ in range(3))
        assert rd.weyl_act(d, w1 + w2, mu) == \
            rd.weyl_act(d, w1, rd.weyl_act(d, w2, mu))


def test_reduce_word():
    d = rd.build("A", 2)
    assert rd.reduce_word(d, (0, 0)) == ()
    assert rd.reduce_word(d, (1, 0, 1)) == (0, 1, 0)
    assert rd.word_length(d, d.w0_word) == len(d.w0_word)
    # reduction preserves the group element
    for word in [(0, 1, 0, 0), (1, 1, 0, 1), (0, 1, 1, 0, 1)]:
        red = rd.reduce_word(d, word)
        for i in range(2):
            mu = d.simple_root(i)
            assert rd.weyl_act(d, word, mu) == rd.weyl_act(d, red, mu)


def test_commuting_set_examples():
    d3 = rd.build("A", 3)
    sigma, word = rd.commuting_set(d3, J={0})
    assert sigma == ((1, 0, 0), (1, 1, 0), (1, 1, 1))
    dc = rd.build("C", 2)
    sigma, word = rd.commuting_set(dc, J={0})
    assert sigma == ((1, 0), (1, 1))
    d1 = rd.build("A", 1)
    sigma, word = rd.commuting_set(d1)
    assert sigma == ((1,),)


def test_commuting_set_invariants():
    for kind, rank, J, Fset in [("A", 3, {0}, set()), ("A", 3, {1}, set()),
                                ("C", 3, {0}, set()), ("A", 4, {0}, {3}),
                                ("B", 3, {0}, set())]:
        d = rd.build(kind, rank)
        sigma, word = rd.commuting_set(d, J=J, F=Fset)
        assert rd.is_reduced(d, word)
        assert len(word) == len(d.positive_roots)
        gram = [[Fraction(d.pairing(a, b)) for b in sigma] for a in sigma]
        assert rd._det(gram) != 0
        pref = rd.prefix_roots(d, word)
        for beta in sigma:
            assert beta in pref
        for beta in sigma:
            support = {i for i in range(rank) if beta[i]}
            assert not support <= Fset
    with pytest.raises(ValueError):
        rd.commuting_set(rd.build("A", 2), F={0, 1})


def test_dump_stable():
    d = rd.build("C", 2)
    text = rd.dump(d)
    assert "type\tC2" in text
    assert "a1+2*a2" in text
    assert rd.dump(d) == text
