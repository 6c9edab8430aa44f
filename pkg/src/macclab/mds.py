"""Reed-Solomon style MDS codes: generator construction, encoding, erasure
decoding.

A code is [n, k]: any k of the n coded symbols recover the k message
symbols.  Generators are Vandermonde matrices evaluated on the first n
field elements in value order (0, 1, 2, ...), so codewords are
reproducible byte for byte across runs.  ``systematize`` row-reduces the
generator to [I_k | P] without changing the row space.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .combinatorics import binom
from .field import GF2m
from .linalg import InconsistentSystemError, mat_inv, mat_mul, mat_rank, mat_solve


class MdsError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class MdsCode:
    k: int
    n: int
    field: GF2m
    generator: np.ndarray  # (k, n)
    systematic: bool = False

    @property
    def parity(self) -> np.ndarray:
        """The P block of a systematic [I_k | P] generator."""
        if not self.systematic:
            raise MdsError("parity block requires a systematic code")
        return self.generator[:, self.k :]


def rs_generator(k: int, n: int, field: GF2m) -> MdsCode:
    """Vandermonde generator on n distinct evaluation points."""
    if not 1 <= k <= n:
        raise MdsError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > field.q:
        raise MdsError(f"code length {n} exceeds field size {field.q}")
    gen = np.zeros((k, n), dtype=np.int64)
    for j in range(n):
        for i in range(k):
            gen[i, j] = field.pow(j, i)
    gen.setflags(write=False)
    return MdsCode(k=k, n=n, field=field, generator=gen, systematic=(k == n and k == 1))


def systematize(code: MdsCode) -> MdsCode:
    """Row-reduce so the first k columns form the identity."""
    if code.systematic:
        return code
    head = code.generator[:, : code.k]
    gen = mat_mul(code.field, mat_inv(code.field, head), code.generator)
    gen.setflags(write=False)
    return MdsCode(k=code.k, n=code.n, field=code.field, generator=gen, systematic=True)


def encode(code: MdsCode, message) -> np.ndarray:
    """Codeword = message . G.

    ``message`` is (k,) of field values, or (k, L) when each message symbol
    is an L-long block; the result is (n,) or (n, L) accordingly.
    """
    msg = np.asarray(message, dtype=np.int64)
    vector = msg.ndim == 1
    if vector:
        msg = msg[:, None]
    if msg.shape[0] != code.k:
        raise MdsError(f"message length {msg.shape[0]} != k={code.k}")
    out = mat_mul(code.field, code.generator.T, msg)
    return out[:, 0] if vector else out


def erasure_decode(code: MdsCode, positions, values) -> np.ndarray:
    """Recover the message from >= k known coded symbols.

    ``positions`` are 0-based distinct codeword indices and ``values`` the
    matching symbols, shaped (p,) or (p, L).  Extra known symbols beyond k
    must be consistent with the decoded message; a conflict raises, since
    it can only come from a corrupted construction.
    """
    positions = list(positions)
    if len(set(positions)) != len(positions):
        raise MdsError("duplicate known positions")
    if any(not 0 <= p < code.n for p in positions):
        raise MdsError("position out of range")
    if len(positions) < code.k:
        raise MdsError(f"need at least k={code.k} known symbols, got {len(positions)}")
    vals = np.asarray(values, dtype=np.int64)
    vector = vals.ndim == 1
    if vector:
        vals = vals[:, None]
    if vals.shape[0] != len(positions):
        raise MdsError("positions/values length mismatch")
    a = code.generator[:, positions].T  # (p, k)
    try:
        msg = mat_solve(code.field, a, vals)
    except InconsistentSystemError:
        raise MdsError("known symbols are inconsistent with the code") from None
    return msg[:, 0] if vector else msg


def verify_mds(code: MdsCode, rng: np.random.Generator | None = None,
               exhaustive_limit: int = 12, samples: int = 200) -> bool:
    """Check that every k-column submatrix is invertible.

    Exhaustive up to ``exhaustive_limit`` columns, sampled otherwise.
    """
    if code.n <= exhaustive_limit:
        subsets = combinations(range(code.n), code.k)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        subsets = (
            sorted(rng.choice(code.n, size=code.k, replace=False).tolist())
            for _ in range(samples)
        )
    for cols in subsets:
        if mat_rank(code.field, code.generator[:, list(cols)]) != code.k:
            return False
    return True
