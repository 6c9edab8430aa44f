from itertools import combinations

import numpy as np
import pytest

from macclab.field import field_make
from macclab.linalg import mat_rank
from macclab.mds import (MdsError, encode, erasure_decode, rs_generator,
                         systematize, verify_mds)


def det2(gf, a):
    return gf.mul(int(a[0, 0]), int(a[1, 1])) ^ gf.mul(int(a[0, 1]), int(a[1, 0]))


def det3(gf, a):
    acc = 0
    for j in range(3):
        minor = np.delete(a[1:], j, axis=1)
        acc ^= gf.mul(int(a[0, j]), det2(gf, minor))
    return acc


def solve_parity_oracle(gf, code):
    """Recover the systematic parity block by elementary row elimination,
    written against the raw generator without reusing library routines."""
    g = [[int(x) for x in row] for row in code.generator]
    k, n = code.k, code.n
    for col in range(k):
        piv = next(r for r in range(col, k) if g[r][col] != 0)
        g[col], g[piv] = g[piv], g[col]
        inv = gf.inv(g[col][col])
        g[col] = [gf.mul(inv, v) for v in g[col]]
        for r in range(k):
            if r != col and g[r][col] != 0:
                fac = g[r][col]
                g[r] = [a ^ gf.mul(fac, b) for a, b in zip(g[r], g[col])]
    return np.array(g, dtype=np.int64)[:, k:]


def test_square_code_columns_independent():
    gf = field_make(3)
    code = rs_generator(3, 3, gf)
    assert mat_rank(gf, code.generator) == 3


def test_2_4_over_gf8_all_pairs_invertible():
    gf = field_make(3)
    code = rs_generator(2, 4, gf)
    for cols in combinations(range(4), 2):
        assert det2(gf, code.generator[:, list(cols)]) != 0


def test_3_7_over_gf8_all_triples_invertible():
    gf = field_make(3)
    code = rs_generator(3, 7, gf)
    for cols in combinations(range(7), 3):
        assert det3(gf, code.generator[:, list(cols)]) != 0


def test_length_exceeds_field():
    with pytest.raises(MdsError):
        rs_generator(2, 9, field_make(3))
    rs_generator(2, 8, field_make(3))  # n == q is fine


def test_systematize_is_identity_on_systematic():
    gf = field_make(3)
    code = systematize(rs_generator(2, 4, gf))
    assert systematize(code) is code
    assert np.array_equal(code.generator[:, :2], np.eye(2, dtype=np.int64))


def test_systematic_encode_prefixes_message():
    gf = field_make(3)
    code = systematize(rs_generator(2, 4, gf))
    rng = np.random.default_rng(0)
    msg = rng.integers(0, gf.q, 2)
    cw = encode(code, msg)
    assert np.array_equal(cw[:2], msg)


def test_parity_block_matches_elimination_oracle():
    gf = field_make(2)
    code = rs_generator(2, 3, gf)
    assert np.array_equal(systematize(code).parity, solve_parity_oracle(gf, code))


def test_systematize_preserves_row_space():
    gf = field_make(4)
    code = rs_generator(3, 7, gf)
    sys_code = systematize(code)
    stacked = np.vstack([code.generator, sys_code.generator])
    assert mat_rank(gf, stacked) == 3
    assert verify_mds(sys_code)


def test_zero_message_zero_codeword():
    code = rs_generator(3, 6, field_make(3))
    assert not encode(code, np.zeros(3, dtype=np.int64)).any()


def test_erasure_decode_every_position_choice():
    gf = field_make(3)
    code = rs_generator(3, 6, gf)
    rng = np.random.default_rng(1)
    msg = rng.integers(0, gf.q, (3, 4))  # vector-valued symbols
    cw = encode(code, msg)
    for cols in combinations(range(6), 3):
        got = erasure_decode(code, list(cols), cw[list(cols)])
        assert np.array_equal(got, msg)


def test_erasure_decode_needs_k_symbols():
    gf = field_make(3)
    code = rs_generator(3, 6, gf)
    cw = encode(code, np.arange(3))
    with pytest.raises(MdsError):
        erasure_decode(code, [0, 1], cw[[0, 1]])
    with pytest.raises(MdsError):
        erasure_decode(code, [0, 0, 1], cw[[0, 0, 1]])


def test_erasure_decode_rejects_corruption():
    gf = field_make(3)
    code = rs_generator(3, 6, gf)
    cw = encode(code, np.array([1, 2, 3]))
    vals = cw[[0, 1, 2, 3]].copy()
    vals[3] ^= 5
    with pytest.raises(MdsError):
        erasure_decode(code, [0, 1, 2, 3], vals)


def test_systematic_readoff():
    gf = field_make(4)
    code = systematize(rs_generator(4, 9, gf))
    rng = np.random.default_rng(2)
    msg = rng.integers(0, gf.q, 4)
    cw = encode(code, msg)
    assert np.array_equal(erasure_decode(code, [0, 1, 2, 3], cw[:4]), msg)


def test_verify_mds_accepts_rs_rejects_repeats():
    gf = field_make(4)
    assert verify_mds(rs_generator(3, 8, gf))
    bad = rs_generator(2, 4, gf).generator.copy()
    bad[:, 3] = bad[:, 0]
    from macclab.mds import MdsCode

    assert not verify_mds(MdsCode(k=2, n=4, field=gf, generator=bad))


def test_verify_mds_sampled_for_long_codes():
    gf = field_make(5)
    code = rs_generator(4, 20, gf)
    assert verify_mds(code, rng=np.random.default_rng(3))
