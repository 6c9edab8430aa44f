"""Placement-phase constructions.

Four placements over one shared field:

* ``place_mkr`` - uncoded baseline: cache c stores subfile W[n, T] verbatim
  for every t-subset T containing c.  M = N t / C.
* ``place_scheme1`` - multi-round coded placement for t in [1, C - r].
  Each subfile is cut into rt! mini-subfiles (rt = min(r, t)) and expanded
  to rt!*t coded mini-subfiles with an [rt!*t, rt!] code.  Round 0 stores a
  per-position slice of those; each later round b re-encodes one coded
  mini-subfile per subfile index across the B = binom(C-1, t-1) subfiles a
  cache holds, with the parity block of a systematic [2B - D_b, B] code,
  and stores only the parities.  The index ranges of all rounds partition
  [1, rt!*t] per cache position.
* ``place_corner`` - the t = C - r + 1 point: files cut into r subfiles,
  expanded with a [C, r] code, one coded subfile per cache.  M = N / r and
  no delivery is needed.
* ``place_scheme2`` - low-memory placement: files cut into C subfiles; for
  each position i, the N-vector of i-th subfiles is multiplied by the
  parity block of a systematic [2N - binom(C-1, r), N] code and cache i
  stores the resulting parities.  M = (N - binom(C-1, r)) / C.

Block coefficients are derived from structural keys by
:func:`coeffs_for_key`, independently of the value computation, so the
re-expansion invariant genuinely cross-checks the encoder bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .combinatorics import binom, ksubsets, phi, subset_rank
from .linalg import mat_mul
from .mds import MdsCode, encode, rs_generator, systematize
from .model import (CacheContents, InvalidConfigError, LabeledBlock, Library,
                    SchemeConfig)


@dataclass(frozen=True)
class RoundPlan:
    """Index bookkeeping for one placement round of scheme s1.

    Round b assigns, to the cache sitting at position ``p`` of a subfile
    index T, the coded mini-subfile indices
    ``base + (p - 1) * count + 1 .. base + p * count``.  Round 0 stores
    those indices as-is; rounds b >= 1 re-encode them and store
    ``parity_cols`` parities per pick.  ``known_info`` is D_b, the number
    of information symbols of the round-b code a decoding user already has.
    """

    b: int
    base: int
    count: int
    known_info: int
    parity_cols: int

    def indices(self, position: int) -> range:
        start = self.base + (position - 1) * self.count
        return range(start + 1, start + self.count + 1)


def _round_known_info(C: int, r: int, t: int, b: int) -> int:
    """Subfile indices through one cache already decoded before round b."""
    if t >= r:
        return sum(binom(r - 1, r - i) * binom(C - r, t - r + i - 1)
                   for i in range(1, b + 1))
    return sum(binom(r - 1, t - i) * binom(C - r, i - 1) for i in range(1, b + 1))


def scheme1_round_plan(C: int, r: int, t: int) -> list[RoundPlan]:
    """Round structure for s1; the per-position ranges tile [1, rt!*t]."""
    if not (1 <= r < C and 1 <= t <= C - r):
        raise InvalidConfigError(f"s1 regime violated: C={C}, r={r}, t={t}")
    rt = min(r, t)
    B = binom(C - 1, t - 1)
    plans = [RoundPlan(b=0, base=0, count=math.factorial(rt - 1),
                       known_info=0, parity_cols=0)]
    for b in range(1, rt):
        count = math.factorial(rt) // ((rt - b) * (rt - b + 1))
        base = t * math.factorial(rt) // (rt - b + 1)
        d = _round_known_info(C, r, t, b)
        plans.append(RoundPlan(b=b, base=base, count=count,
                               known_info=d, parity_cols=B - d))
    return plans


@dataclass(frozen=True, eq=False)
class SchemeCodes:
    """Every MDS code a config constructs, all over the config's field."""

    subfile_code: MdsCode | None
    round_codes: dict  # b -> systematic MdsCode, s1 only

    def all_codes(self) -> list[MdsCode]:
        out = [] if self.subfile_code is None else [self.subfile_code]
        out.extend(self.round_codes[b] for b in sorted(self.round_codes))
        return out


@lru_cache(maxsize=None)
def codes_for(config: SchemeConfig) -> SchemeCodes:
    fld = config.field
    if config.scheme == "mkr":
        return SchemeCodes(subfile_code=None, round_codes={})
    if config.scheme == "corner":
        return SchemeCodes(subfile_code=rs_generator(config.r, config.C, fld),
                           round_codes={})
    if config.scheme == "s2":
        n = 2 * config.N - binom(config.C - 1, config.r)
        return SchemeCodes(subfile_code=systematize(rs_generator(config.N, n, fld)),
                           round_codes={})
    rt = config.rtilde
    B = binom(config.C - 1, config.t - 1)
    rounds = {}
    for plan in scheme1_round_plan(config.C, config.r, config.t)[1:]:
        n = 2 * B - plan.known_info
        rounds[plan.b] = systematize(rs_generator(B, n, fld))
    return SchemeCodes(
        subfile_code=rs_generator(math.factorial(rt), math.factorial(rt) * config.t, fld),
        round_codes=rounds,
    )


# -- structural keys -> coefficient rows --------------------------------------

def subfile_block_pos(config: SchemeConfig, subset, j: int) -> int:
    """Within-file block position of mini-subfile j of subfile T (s1/mkr)."""
    per_subfile = math.factorial(config.rtilde) if config.scheme == "s1" else 1
    return (subset_rank(subset, config.C) - 1) * per_subfile + (j - 1)


def mini_index(config: SchemeConfig, n: int, subset, j: int) -> int:
    """Unknown index of mini-subfile j of subfile T of file n (s1/mkr)."""
    return config.block_index(n, subfile_block_pos(config, subset, j))


def coeffs_for_key(config: SchemeConfig, key: tuple,
                   components: tuple | None = None) -> np.ndarray:
    """Dense coefficient row of a labeled block, derived from its key alone.

    XOR-delivery blocks additionally need the ``components`` term list,
    since their composition depends on the demand vector.
    """
    fld = config.field
    width = config.N * config.subpacketization
    out = np.zeros(width, dtype=np.int64)
    kind = key[0]
    if kind == "mkr":
        _, n, subset = key
        out[mini_index(config, n, subset, 1)] = 1
    elif kind == "y":  # coded mini-subfile idx of subfile T of file n
        _, n, subset, idx = key
        col = codes_for(config).subfile_code.generator[:, idx - 1]
        base = mini_index(config, n, subset, 1)
        out[base : base + len(col)] = col
    elif kind == "q":  # s1 round-b parity: (cache, file, round, pick, column)
        _, c, n, b, ell, col = key
        plan = scheme1_round_plan(config.C, config.r, config.t)[b]
        pblock = codes_for(config).round_codes[b].parity
        for pos_t, subset in enumerate(_subsets_through(config, c)):
            idx = plan.indices(phi(c, subset))[ell - 1]
            w = int(pblock[pos_t, col - 1])
            if w == 0:
                continue
            ycol = codes_for(config).subfile_code.generator[:, idx - 1]
            base = mini_index(config, n, subset, 1)
            out[base : base + len(ycol)] ^= fld.mul_arr(w, ycol)
    elif kind == "cw":  # corner coded subfile c of file n
        _, n, c = key
        col = codes_for(config).subfile_code.generator[:, c - 1]
        base = config.block_index(n, 0)
        out[base : base + config.r] = col
    elif kind == "q2":  # s2 parity j of cache i
        _, i, j = key
        pcol = codes_for(config).subfile_code.parity[:, j - 1]
        for n in range(1, config.N + 1):
            out[config.block_index(n, i - 1)] = pcol[n - 1]
    elif kind == "sub":  # one plain subfile W[n, i] (s2 delivery)
        _, i, n = key
        out[config.block_index(n, i - 1)] = 1
    elif kind == "xor":  # xor of one mini-slice of several subfiles
        _, _, j = key
        if components is None:
            raise ValueError("xor blocks need their component list")
        for n, subset in components:
            out[mini_index(config, n, subset, j)] ^= 1
    else:
        raise ValueError(f"unknown block key {key!r}")
    return out


@lru_cache(maxsize=None)
def _subsets_through(config: SchemeConfig, c: int) -> tuple[tuple[int, ...], ...]:
    """The B subfile indices containing cache c, lexicographically."""
    return tuple(s for s in ksubsets(config.C, config.t) if c in s)


def _set_name(subset) -> str:
    return "{" + ",".join(map(str, subset)) + "}"


# -- placements ----------------------------------------------------------------


def place_mkr(config: SchemeConfig, library: Library) -> CacheContents:
    if config.scheme != "mkr":
        raise InvalidConfigError(f"config is for scheme {config.scheme}")
    caches = []
    for c in range(1, config.C + 1):
        blocks = []
        for subset in _subsets_through(config, c):
            for n in range(1, config.N + 1):
                key = ("mkr", n, subset)
                blocks.append(LabeledBlock(
                    name=f"W[{n},{_set_name(subset)}]",
                    key=key,
                    coeffs=coeffs_for_key(config, key),
                    values=library.block(config, n, subfile_block_pos(config, subset, 1)).copy(),
                ))
        caches.append(tuple(blocks))
    return CacheContents(config=config, caches=tuple(caches))


def _encode_subfiles(config: SchemeConfig, library: Library) -> dict:
    """All coded mini-subfiles: (n, T) -> (rt!*t, L) codeword array."""
    code = codes_for(config).subfile_code
    nfac = math.factorial(config.rtilde)
    out = {}
    for subset in ksubsets(config.C, config.t):
        base = (subset_rank(subset, config.C) - 1) * nfac
        for n in range(1, config.N + 1):
            minis = np.stack([library.block(config, n, base + j) for j in range(nfac)])
            out[(n, subset)] = encode(code, minis)
    return out


def place_scheme1(config: SchemeConfig, library: Library) -> CacheContents:
    if config.scheme != "s1":
        raise InvalidConfigError(f"config is for scheme {config.scheme}")
    fld = config.field
    plans = scheme1_round_plan(config.C, config.r, config.t)
    codes = codes_for(config)
    y = _encode_subfiles(config, library)
    caches = []
    for c in range(1, config.C + 1):
        subsets = _subsets_through(config, c)
        blocks = []
        for subset in subsets:
            for idx in plans[0].indices(phi(c, subset)):
                for n in range(1, config.N + 1):
                    key = ("y", n, subset, idx)
                    blocks.append(LabeledBlock(
                        name=f"Y[{n},{_set_name(subset)}]^{idx}",
                        key=key,
                        coeffs=coeffs_for_key(config, key),
                        values=y[(n, subset)][idx - 1].copy(),
                    ))
        for plan in plans[1:]:
            pblock = codes.round_codes[plan.b].parity  # (B, parity_cols)
            for ell in range(1, plan.count + 1):
                picks = [plan.indices(phi(c, s))[ell - 1] for s in subsets]
                for n in range(1, config.N + 1):
                    vec = np.stack([y[(n, s)][i - 1] for s, i in zip(subsets, picks)])
                    par = mat_mul(fld, pblock.T, vec)  # (parity_cols, L)
                    for col in range(1, plan.parity_cols + 1):
                        key = ("q", c, n, plan.b, ell, col)
                        blocks.append(LabeledBlock(
                            name=f"Q[{n},c{c}]^(b{plan.b},l{ell},{col})",
                            key=key,
                            coeffs=coeffs_for_key(config, key),
                            values=par[col - 1],
                        ))
        caches.append(tuple(blocks))
    return CacheContents(config=config, caches=tuple(caches))


def place_corner(config: SchemeConfig, library: Library) -> CacheContents:
    if config.scheme != "corner":
        raise InvalidConfigError(f"config is for scheme {config.scheme}")
    code = codes_for(config).subfile_code
    codewords = {}
    for n in range(1, config.N + 1):
        minis = np.stack([library.block(config, n, j) for j in range(config.r)])
        codewords[n] = encode(code, minis)  # (C, L)
    caches = []
    for c in range(1, config.C + 1):
        blocks = []
        for n in range(1, config.N + 1):
            key = ("cw", n, c)
            blocks.append(LabeledBlock(
                name=f"Wcoded[{n}]^{c}",
                key=key,
                coeffs=coeffs_for_key(config, key),
                values=codewords[n][c - 1].copy(),
            ))
        caches.append(tuple(blocks))
    return CacheContents(config=config, caches=tuple(caches))


def place_scheme2(config: SchemeConfig, library: Library) -> CacheContents:
    if config.scheme != "s2":
        raise InvalidConfigError(f"config is for scheme {config.scheme}")
    fld = config.field
    pblock = codes_for(config).subfile_code.parity  # (N, N - binom(C-1, r))
    npar = pblock.shape[1]
    caches = []
    for i in range(1, config.C + 1):
        column = np.stack([library.block(config, n, i - 1)
                           for n in range(1, config.N + 1)])
        par = mat_mul(fld, pblock.T, column)  # (npar, L)
        blocks = []
        for j in range(1, npar + 1):
            key = ("q2", i, j)
            blocks.append(LabeledBlock(
                name=f"Q[{j},{i}]",
                key=key,
                coeffs=coeffs_for_key(config, key),
                values=par[j - 1],
            ))
        caches.append(tuple(blocks))
    return CacheContents(config=config, caches=tuple(caches))


_PLACERS = {"mkr": place_mkr, "s1": place_scheme1,
            "corner": place_corner, "s2": place_scheme2}


def place(config: SchemeConfig, library: Library) -> CacheContents:
    """Run the placement the config selects."""
    return _PLACERS[config.scheme](config, library)
