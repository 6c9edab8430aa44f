import numpy as np
import pytest

from macclab.combinatorics import binom, ksubsets
from macclab.model import (InvalidConfigError, all_distinct_demands,
                           check_demands, demand_of, exhaustive_demands,
                           load_library, make_config, random_demands,
                           random_library, save_library, zero_library)


def test_s1_motivating_config():
    cfg = make_config("s1", 4, 2, 6, t=2, f_hint=1)
    assert cfg.subpacketization == 12
    assert cfg.f == 12
    assert cfg.m == 3  # longest code is the [5, 3] round code
    assert cfg.K == 6


def test_s1_at_last_t_becomes_corner():
    cfg = make_config("s1", 4, 2, 6, t=3)
    assert cfg.scheme == "corner"
    assert cfg.t == 3
    assert cfg.subpacketization == 2  # r pieces per file


def test_s2_subpacketization_and_field():
    cfg = make_config("s2", 4, 2, 6)
    assert cfg.subpacketization == 4
    assert cfg.f % 4 == 0
    assert cfg.m == 4  # [9, 6] code needs 16 field elements
    cfg = make_config("s2", 4, 2, 6, f_hint=5)
    assert cfg.f == 8


def test_f_hint_rounds_up():
    cfg = make_config("mkr", 4, 2, 6, t=2, f_hint=10)
    assert cfg.subpacketization == 6
    assert cfg.f == 12
    assert cfg.block_len == 2


def test_invalid_regimes():
    with pytest.raises(InvalidConfigError):
        make_config("mkr", 4, 4, 6, t=1)  # r == C
    with pytest.raises(InvalidConfigError):
        make_config("mkr", 4, 2, 6, t=5)
    with pytest.raises(InvalidConfigError):
        make_config("mkr", 4, 2, 6, t=0)
    with pytest.raises(InvalidConfigError):
        make_config("s1", 4, 2, 6, t=4)  # beyond C - r + 1
    with pytest.raises(InvalidConfigError):
        make_config("s1", 4, 2, 6)  # t required
    with pytest.raises(InvalidConfigError):
        make_config("corner", 4, 2, 6, t=2)
    with pytest.raises(InvalidConfigError):
        make_config("s2", 4, 2, 3)  # N <= binom(C-1, r)
    with pytest.raises(InvalidConfigError):
        make_config("s2", 4, 2, 6, t=1)
    with pytest.raises(InvalidConfigError):
        make_config("nope", 4, 2, 6)
    with pytest.raises(InvalidConfigError):
        make_config("mkr", 4, 2, 6, t=2, m=30)


def test_explicit_field_degree_must_cover_codes():
    cfg = make_config("s2", 4, 2, 6, m=5)
    assert cfg.m == 5
    with pytest.raises(InvalidConfigError):
        make_config("s2", 4, 2, 6, m=3)  # 2^3 < 9


def test_corner_defaults_t():
    cfg = make_config("corner", 5, 3, 4)
    assert cfg.t == 3
    assert cfg.m == 3  # [5, 3] code needs >= 5 points


def test_random_library_determinism():
    cfg = make_config("mkr", 4, 2, 3, t=2)
    a = random_library(cfg, 11)
    b = random_library(cfg, 11)
    c = random_library(cfg, 12)
    assert np.array_equal(a.files, b.files)
    assert not np.array_equal(a.files, c.files)
    assert a.files.shape == (3, cfg.f)
    assert a.files.max() < cfg.field.q
    assert not zero_library(cfg).files.any()


def test_library_roundtrip(tmp_path):
    cfg = make_config("s2", 5, 3, 10)
    lib = random_library(cfg, 5)
    save_library(lib, cfg, tmp_path / "lib", seed=5)
    loaded, cfg2, seed = load_library(tmp_path / "lib")
    assert cfg2 == cfg
    assert seed == 5
    assert np.array_equal(loaded.files, lib.files)


def test_library_roundtrip_wide_symbols(tmp_path):
    cfg = make_config("mkr", 4, 2, 2, t=2, m=12)
    lib = random_library(cfg, 1)
    assert lib.files.max() > 255  # exercises the 2-byte path
    save_library(lib, cfg, tmp_path / "lib")
    loaded, _, seed = load_library(tmp_path / "lib")
    assert seed is None
    assert np.array_equal(loaded.files, lib.files)


def test_demand_vector_validation():
    cfg = make_config("mkr", 4, 2, 3, t=2)
    with pytest.raises(ValueError):
        check_demands(cfg, [1, 2, 3])
    with pytest.raises(ValueError):
        check_demands(cfg, [1, 2, 3, 4, 5, 6])
    assert check_demands(cfg, [3, 1, 2, 3, 1, 2]) == (3, 1, 2, 3, 1, 2)


def test_demand_slots_follow_lexicographic_users():
    cfg = make_config("mkr", 4, 2, 6, t=2)
    d = all_distinct_demands(cfg)
    assert d == (1, 2, 3, 4, 5, 6)
    assert cfg.users == ksubsets(4, 2)
    assert demand_of(cfg, d, (1, 2)) == 1
    assert demand_of(cfg, d, (3, 4)) == 6
    with pytest.raises(ValueError):
        all_distinct_demands(make_config("mkr", 4, 2, 3, t=2))


def test_exhaustive_and_random_demands():
    cfg = make_config("mkr", 3, 2, 2, t=1)
    vectors = list(exhaustive_demands(cfg))
    assert len(vectors) == 2 ** binom(3, 2)
    assert len(set(vectors)) == len(vectors)
    rng = np.random.default_rng(0)
    for _ in range(5):
        check_demands(cfg, random_demands(cfg, rng))
    assert random_demands(cfg, 4) == random_demands(cfg, 4)
