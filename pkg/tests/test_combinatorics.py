from fractions import Fraction

import pytest

from macclab.combinatorics import (binom, format_fraction, ksubsets,
                                   parse_fraction, phi, subset_rank,
                                   subset_unrank)


def test_binom_examples():
    assert binom(4, 2) == 6
    assert binom(2, 3) == 0
    for n in range(8):
        assert binom(n, 0) == 1
    assert binom(5, -1) == 0
    with pytest.raises(ValueError):
        binom(-1, 0)


def test_pascal_identity():
    for n in range(1, 65):
        for m in range(0, 65):
            assert binom(n, m) == binom(n - 1, m - 1) + binom(n - 1, m)


def test_ksubsets_examples():
    assert ksubsets(4, 2) == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert ksubsets(3, 3) == ((1, 2, 3),)
    assert len(ksubsets(5, 2)) == 10


def test_ksubsets_lexicographic():
    for c, k in [(5, 2), (6, 3), (7, 4)]:
        subs = ksubsets(c, k)
        assert len(subs) == binom(c, k)
        assert all(a < b for a, b in zip(subs, subs[1:]))


def test_rank_examples():
    assert subset_rank((1, 2), 4) == 1
    assert subset_unrank(6, 4, 2) == (3, 4)


def test_rank_unrank_roundtrip():
    for i, s in enumerate(ksubsets(6, 3), start=1):
        assert subset_rank(s, 6) == i
        assert subset_unrank(i, 6, 3) == s
    with pytest.raises(ValueError):
        subset_unrank(0, 6, 3)
    with pytest.raises(ValueError):
        subset_unrank(binom(6, 3) + 1, 6, 3)


def test_rank_rejects_non_subsets():
    with pytest.raises(ValueError):
        subset_rank((0, 2), 4)
    with pytest.raises(ValueError):
        subset_rank((2, 2), 4)


def test_phi_examples():
    assert phi(3, (1, 3, 4)) == 2
    for s in ksubsets(5, 3):
        assert phi(min(s), s) == 1
        for c in s:
            assert phi(c, s) == sorted(s).index(c) + 1
    with pytest.raises(ValueError):
        phi(2, (1, 3, 4))


def test_exact_rationals():
    assert Fraction(1, 2) + Fraction(1, 3) == Fraction(5, 6)
    assert Fraction(2, 4) == Fraction(1, 2)
    assert Fraction(6 - 3, 4) == Fraction(3, 4)
    big = Fraction(10**40 + 1, 10**40)
    assert big - 1 == Fraction(1, 10**40)


def test_fraction_formatting():
    assert format_fraction(Fraction(3, 4)) == "3/4"
    assert format_fraction(Fraction(6, 2)) == "3"
    assert parse_fraction("5/6") == Fraction(5, 6)
    assert parse_fraction(format_fraction(Fraction(22, 7))) == Fraction(22, 7)
