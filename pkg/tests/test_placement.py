import math
from fractions import Fraction

import numpy as np
import pytest

from macclab.combinatorics import binom, ksubsets
from macclab.linalg import mat_mul
from macclab.model import InvalidConfigError, make_config, random_library
from macclab.placement import (codes_for, place, place_corner, place_mkr,
                               place_scheme1, place_scheme2,
                               scheme1_round_plan)
from macclab.simulate import analytic_memory


def all_s1_regimes(max_c):
    for C in range(2, max_c + 1):
        for r in range(1, C):
            for t in range(1, C - r + 1):
                yield C, r, t


def test_round_plan_partition_exhaustive():
    # per cache position, the rounds' index ranges tile [1, rt!*t] exactly
    for C, r, t in all_s1_regimes(6):
        rt = min(r, t)
        plans = scheme1_round_plan(C, r, t)
        for position in range(1, t + 1):
            seen = []
            for plan in plans:
                seen.extend(plan.indices(position))
            assert len(seen) == len(set(seen))
        combined = sorted(i for plan in plans for p in range(1, t + 1)
                          for i in plan.indices(p))
        assert combined == list(range(1, math.factorial(rt) * t + 1))


def test_round_plan_r2_t2_matches_hand_layout():
    plans = scheme1_round_plan(4, 2, 2)
    assert len(plans) == 2
    assert list(plans[0].indices(1)) == [1]
    assert list(plans[0].indices(2)) == [2]
    assert plans[1].base == 2 and plans[1].count == 1
    assert list(plans[1].indices(1)) == [3]
    assert list(plans[1].indices(2)) == [4]
    assert plans[1].known_info == 1
    assert plans[1].parity_cols == binom(3, 1) - 1


def test_round_plan_single_round_when_rt_is_1():
    assert len(scheme1_round_plan(5, 1, 3)) == 1
    assert len(scheme1_round_plan(5, 4, 1)) == 1


def test_round_plan_regime_errors():
    with pytest.raises(InvalidConfigError):
        scheme1_round_plan(4, 2, 3)  # t = C - r + 1 is the corner, not s1
    with pytest.raises(InvalidConfigError):
        scheme1_round_plan(4, 4, 1)


def test_mkr_cache_contents_match_uncoded_layout():
    cfg = make_config("mkr", 4, 2, 6, t=2)
    lib = random_library(cfg, 0)
    caches = place_mkr(cfg, lib)
    keys = {b.key for b in caches.blocks(1)}
    assert keys == {("mkr", n, T) for n in range(1, 7)
                    for T in ((1, 2), (1, 3), (1, 4))}
    for b in caches.blocks(1):
        _, n, T = b.key
        assert np.array_equal(b.values, lib.block(cfg, n, list(ksubsets(4, 2)).index(T)))
    assert caches.occupancy() == 3


def test_mkr_full_replication_at_t_equals_c():
    cfg = make_config("mkr", 4, 2, 2, t=4)
    lib = random_library(cfg, 0)
    caches = place_mkr(cfg, lib)
    assert caches.occupancy() == cfg.N  # M = N


def test_scheme1_table_structure_for_motivating_example():
    cfg = make_config("s1", 4, 2, 6, t=2)
    lib = random_library(cfg, 0)
    caches = place_scheme1(cfg, lib)
    # every cache: per file, 3 round-0 coded mini-subfiles + 2 parities
    for c in range(1, 5):
        per_file = {}
        for b in caches.blocks(c):
            n = b.key[1] if b.key[0] == "y" else b.key[2]
            per_file.setdefault(n, []).append(b.key[0])
        for kinds in per_file.values():
            assert sorted(kinds) == ["q", "q", "y", "y", "y"]
    # cache 1 sits first in all its subsets, cache 2 second in {1,2}
    idx_c1 = {b.key[2:4] for b in caches.blocks(1) if b.key[0] == "y" and b.key[1] == 1}
    assert idx_c1 == {((1, 2), 1), ((1, 3), 1), ((1, 4), 1)}
    idx_c2 = {b.key[2:4] for b in caches.blocks(2) if b.key[0] == "y" and b.key[1] == 1}
    assert idx_c2 == {((1, 2), 2), ((2, 3), 1), ((2, 4), 1)}
    assert caches.occupancy() == Fraction(5, 2)


def test_corner_cache_layout():
    cfg = make_config("corner", 4, 2, 6)
    lib = random_library(cfg, 0)
    caches = place_corner(cfg, lib)
    assert {b.key for b in caches.blocks(1)} == {("cw", n, 1) for n in range(1, 7)}
    assert caches.occupancy() == 3  # N / r


def test_scheme2_cache_layout():
    cfg = make_config("s2", 4, 2, 6)
    lib = random_library(cfg, 0)
    caches = place_scheme2(cfg, lib)
    for c in range(1, 5):
        assert len(caches.blocks(c)) == 6 - binom(3, 2)
    assert caches.occupancy() == Fraction(3, 4)

    smallest = make_config("s2", 4, 2, binom(3, 2) + 1)
    caches = place_scheme2(smallest, random_library(smallest, 0))
    assert all(len(caches.blocks(c)) == 1 for c in range(1, 5))

    cfg53 = make_config("s2", 5, 3, 10)
    caches = place_scheme2(cfg53, random_library(cfg53, 0))
    assert caches.occupancy() == Fraction(10 - binom(4, 3), 5)


def test_mkr_occupancy_example():
    cfg = make_config("mkr", 5, 2, 10, t=2)
    caches = place_mkr(cfg, random_library(cfg, 0))
    assert caches.occupancy() == 4  # N t / C


OCCUPANCY_CASES = (
    [("mkr", C, r, t) for C, r, t in all_s1_regimes(6)]
    + [("mkr", C, r, t) for C in range(2, 7) for r in range(1, C)
       for t in range(C - r + 1, C + 1)]
    + [("s1", C, r, t) for C, r, t in all_s1_regimes(6)]
    + [("corner", C, r, None) for C in range(2, 7) for r in range(1, C)]
    + [("s2", C, r, None) for C in range(2, 7) for r in range(1, C)]
)


@pytest.mark.parametrize("scheme,C,r,t", OCCUPANCY_CASES)
def test_measured_occupancy_equals_analytic_memory(scheme, C, r, t):
    n_files = binom(C - 1, r) + 1 if scheme == "s2" else 2
    cfg = make_config(scheme, C, r, n_files, t=t)
    lib = random_library(cfg, 42)
    caches = place(cfg, lib)
    assert caches.occupancy() == analytic_memory(cfg)


@pytest.mark.parametrize("scheme,C,r,t,N", [
    ("mkr", 4, 2, 2, 3), ("s1", 4, 2, 2, 3), ("s1", 5, 3, 2, 2),
    ("s1", 5, 2, 3, 2), ("corner", 4, 2, None, 3), ("s2", 4, 2, None, 4),
])
def test_labels_reexpand_to_stored_values(scheme, C, r, t, N):
    cfg = make_config(scheme, C, r, N, t=t, f_hint=2 * binom(C, r))
    lib = random_library(cfg, 9)
    caches = place(cfg, lib)
    fld = cfg.field
    lib_blocks = lib.blocks(cfg)
    for c in range(1, C + 1):
        blocks = caches.blocks(c)
        for b in blocks:
            assert np.array_equal(b.expand(cfg, lib), b.values), b.name
        coeff_matrix = np.stack([b.coeffs for b in blocks])
        recomputed = mat_mul(fld, coeff_matrix, lib_blocks)
        stored = np.stack([b.values for b in blocks])
        assert np.array_equal(recomputed, stored)


def test_placers_reject_foreign_configs():
    cfg = make_config("mkr", 4, 2, 2, t=2)
    lib = random_library(cfg, 0)
    with pytest.raises(InvalidConfigError):
        place_scheme1(cfg, lib)
    with pytest.raises(InvalidConfigError):
        place_corner(cfg, lib)
    with pytest.raises(InvalidConfigError):
        place_scheme2(cfg, lib)


def test_codes_registry_gathers_every_generator():
    cfg = make_config("s1", 5, 3, 2, t=2)
    codes = codes_for(cfg).all_codes()
    assert codes[0].k == 2 and codes[0].n == 4  # [t!*t, t!] with t < r
    assert all(c.systematic for c in codes[1:])
    assert codes_for(make_config("mkr", 4, 2, 2, t=1)).all_codes() == []
