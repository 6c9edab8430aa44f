"""Problem instances: scheme configuration, file library, cache and
broadcast containers, demand vectors.

Every stored or transmitted symbol block is labeled: ``key`` identifies
the block structurally (which scheme artifact it is) and ``coeffs`` spells
out the exact linear combination of library mini-subfiles it carries, so
decodability is a checkable linear-algebra fact rather than trusted
bookkeeping.  Files are split into ``subpacketization`` blocks of
``block_len`` symbols each; the unknown vector of an instance is the flat
sequence of all N * subpacketization blocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .combinatorics import binom, ksubsets, subset_rank
from .field import MAX_DEGREE, field_make

SCHEMES = ("mkr", "s1", "corner", "s2")


class InvalidConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    """A (C, r, M, N) combinatorial multi-access instance bound to a scheme.

    ``t`` is the placement parameter of the xor-delivery schemes and None
    for s2; the corner scheme pins t = C - r + 1.  ``m`` is the field
    degree and ``f`` the file length in field symbols, a multiple of the
    scheme's subpacketization.
    """

    scheme: str
    C: int
    r: int
    t: int | None
    N: int
    m: int
    f: int

    @property
    def K(self) -> int:
        return binom(self.C, self.r)

    @property
    def users(self) -> tuple[tuple[int, ...], ...]:
        return ksubsets(self.C, self.r)

    @property
    def field(self):
        return field_make(self.m)

    @property
    def rtilde(self) -> int:
        if self.scheme != "s1":
            raise InvalidConfigError("rtilde is defined for scheme s1 only")
        return min(self.r, self.t)

    @property
    def subpacketization(self) -> int:
        return scheme_subpacketization(self.scheme, self.C, self.r, self.t, self.N)

    @property
    def block_len(self) -> int:
        return self.f // self.subpacketization

    def block_index(self, n: int, pos: int) -> int:
        """Flat unknown index of block ``pos`` (0-based) of file n."""
        return (n - 1) * self.subpacketization + pos

    def describe(self) -> dict:
        return {"scheme": self.scheme, "C": self.C, "r": self.r, "t": self.t,
                "N": self.N, "m": self.m, "f": self.f}


def scheme_subpacketization(scheme: str, C: int, r: int, t: int | None, N: int) -> int:
    import math

    if scheme == "mkr":
        return binom(C, t)
    if scheme == "s1":
        return math.factorial(min(r, t)) * binom(C, t)
    if scheme == "corner":
        return r
    if scheme == "s2":
        return C
    raise InvalidConfigError(f"unknown scheme {scheme!r}")


def _code_lengths(scheme: str, C: int, r: int, t: int | None, N: int) -> list[int]:
    """Lengths of every MDS code the scheme touches."""
    import math

    if scheme == "mkr":
        return []
    if scheme == "corner":
        return [C]
    if scheme == "s2":
        return [2 * N - binom(C - 1, r)]
    rt = min(r, t)
    lengths = [math.factorial(rt) * t]
    B = binom(C - 1, t - 1)
    for b in range(1, rt):
        if t >= r:
            d = sum(binom(r - 1, r - i) * binom(C - r, t - r + i - 1)
                    for i in range(1, b + 1))
        else:
            d = sum(binom(r - 1, t - i) * binom(C - r, i - 1)
                    for i in range(1, b + 1))
        lengths.append(2 * B - d)
    return lengths


def make_config(scheme: str, C: int, r: int, N: int, t: int | None = None,
                f_hint: int = 1, m: int | None = None) -> SchemeConfig:
    """Validate the regime, auto-select the field degree, round up f.

    The field degree is the smallest m with 2^m covering the longest MDS
    code the scheme constructs (one global field per experiment, so XOR
    delivery and erasure-code algebra interoperate).  ``f`` becomes the
    smallest multiple of the subpacketization that is >= f_hint.  Asking
    for s1 with t = C - r + 1 yields the corner construction, its
    zero-rate specialization.
    """
    if scheme not in SCHEMES:
        raise InvalidConfigError(f"unknown scheme {scheme!r}")
    if not (1 <= r < C):
        raise InvalidConfigError(f"need 1 <= r < C, got r={r}, C={C}")
    if N < 1:
        raise InvalidConfigError("need N >= 1")
    if scheme == "mkr":
        if t is None or not 1 <= t <= C:
            raise InvalidConfigError(f"mkr needs t in [1, {C}], got {t}")
    elif scheme == "s1":
        if t is None or not 1 <= t <= C - r + 1:
            raise InvalidConfigError(f"s1 needs t in [1, {C - r + 1}], got {t}")
        if t == C - r + 1:
            scheme = "corner"
    elif scheme == "corner":
        if t is None:
            t = C - r + 1
        if t != C - r + 1:
            raise InvalidConfigError(f"corner pins t = C - r + 1 = {C - r + 1}")
    elif scheme == "s2":
        if t is not None:
            raise InvalidConfigError("s2 takes no t")
        if N <= binom(C - 1, r):
            raise InvalidConfigError(
                f"s2 needs N > binom(C-1, r) = {binom(C - 1, r)}, got N={N}")
    if scheme == "corner":
        t = C - r + 1
    if m is None:
        need = max(_code_lengths(scheme, C, r, t, N), default=1)
        m = max(1, (need - 1).bit_length())
    if not 1 <= m <= MAX_DEGREE:
        raise InvalidConfigError(f"field degree {m} outside [1, {MAX_DEGREE}]")
    if max(_code_lengths(scheme, C, r, t, N), default=1) > 2 ** m:
        raise InvalidConfigError(f"field degree {m} too small for the scheme's codes")
    sub = scheme_subpacketization(scheme, C, r, t, N)
    if f_hint < 1:
        raise InvalidConfigError("f_hint must be >= 1")
    f = sub * (-(-f_hint // sub))
    return SchemeConfig(scheme=scheme, C=C, r=r, t=t, N=N, m=m, f=f)


# -- library ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Library:
    """N files of f field symbols each, as an (N, f) array."""

    files: np.ndarray

    @property
    def N(self) -> int:
        return self.files.shape[0]

    @property
    def f(self) -> int:
        return self.files.shape[1]

    def file(self, n: int) -> np.ndarray:
        return self.files[n - 1]

    def blocks(self, config: SchemeConfig) -> np.ndarray:
        """All mini-subfile blocks as an (N * subpacketization, L) view."""
        return self.files.reshape(self.N * config.subpacketization, config.block_len)

    def block(self, config: SchemeConfig, n: int, pos: int) -> np.ndarray:
        L = config.block_len
        return self.files[n - 1, pos * L : (pos + 1) * L]


def random_library(config: SchemeConfig, seed: int = 0) -> Library:
    rng = np.random.default_rng(seed)
    files = config.field.random_elements(rng, (config.N, config.f))
    files.setflags(write=False)
    return Library(files=files)


def zero_library(config: SchemeConfig) -> Library:
    files = np.zeros((config.N, config.f), dtype=np.int64)
    files.setflags(write=False)
    return Library(files=files)


def _symbol_dtype(m: int):
    return np.dtype("<u1") if m <= 8 else np.dtype("<u2")


def save_library(library: Library, config: SchemeConfig, prefix, seed: int | None = None) -> None:
    """Write <prefix>.json header and <prefix>.bin little-endian symbol dump."""
    prefix = Path(prefix)
    header = dict(config.describe())
    header["seed"] = seed
    prefix.with_suffix(".json").write_text(json.dumps(header, indent=2) + "\n")
    library.files.astype(_symbol_dtype(config.m)).tofile(prefix.with_suffix(".bin"))


def load_library(prefix) -> tuple[Library, SchemeConfig, int | None]:
    prefix = Path(prefix)
    header = json.loads(prefix.with_suffix(".json").read_text())
    config = SchemeConfig(scheme=header["scheme"], C=header["C"], r=header["r"],
                          t=header["t"], N=header["N"], m=header["m"], f=header["f"])
    raw = np.fromfile(prefix.with_suffix(".bin"), dtype=_symbol_dtype(config.m))
    files = raw.astype(np.int64).reshape(config.N, config.f)
    files.setflags(write=False)
    return Library(files=files), config, header.get("seed")


# -- labeled symbol blocks ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class LabeledBlock:
    """An L-symbol block plus the linear combination it represents.

    ``coeffs`` has one field coefficient per mini-subfile unknown;
    ``components`` (delivery XORs only) lists the (file, subfile-index)
    terms the block combines, which is what peeling decoders consume.
    """

    name: str
    key: tuple
    coeffs: np.ndarray
    values: np.ndarray
    components: tuple | None = None

    def expand(self, config: SchemeConfig, library: Library) -> np.ndarray:
        """Re-evaluate the combination against the library."""
        fld = config.field
        out = np.zeros(config.block_len, dtype=np.int64)
        for idx in np.nonzero(self.coeffs)[0]:
            n, pos = divmod(int(idx), config.subpacketization)
            out ^= fld.scale(int(self.coeffs[idx]), library.block(config, n + 1, pos))
        return out


@dataclass
class CacheContents:
    config: SchemeConfig
    caches: tuple  # caches[c-1] is a tuple of LabeledBlock
    _maps: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def blocks(self, c: int) -> tuple:
        return self.caches[c - 1]

    def key_map(self, c: int) -> dict:
        if c not in self._maps:
            self._maps[c] = {b.key: b for b in self.caches[c - 1]}
        return self._maps[c]

    def total_symbols(self) -> int:
        return sum(len(b.values) for blocks in self.caches for b in blocks)

    def occupancy(self) -> Fraction:
        """Per-cache stored symbols in file units (caches are uniform)."""
        counts = {sum(len(b.values) for b in blocks) for blocks in self.caches}
        if len(counts) != 1:
            raise ValueError(f"caches are not uniformly filled: {sorted(counts)}")
        return Fraction(counts.pop(), self.config.f)


@dataclass(frozen=True, eq=False)
class Message:
    name: str
    key: tuple
    blocks: tuple  # tuple of LabeledBlock

    def symbols(self) -> int:
        return sum(len(b.values) for b in self.blocks)


@dataclass
class BroadcastBatch:
    config: SchemeConfig
    messages: tuple  # tuple of Message

    def total_symbols(self) -> int:
        return sum(m.symbols() for m in self.messages)

    def message(self, key: tuple) -> Message:
        for m in self.messages:
            if m.key == key:
                return m
        raise KeyError(f"no message with key {key}")


# -- demand vectors -----------------------------------------------------------


def check_demands(config: SchemeConfig, demands) -> tuple[int, ...]:
    d = tuple(int(x) for x in demands)
    if len(d) != config.K:
        raise ValueError(f"demand vector needs K={config.K} entries, got {len(d)}")
    if any(not 1 <= x <= config.N for x in d):
        raise ValueError(f"demands must lie in [1, {config.N}]")
    return d


def demand_of(config: SchemeConfig, demands, user) -> int:
    return demands[subset_rank(user, config.C) - 1]


def all_distinct_demands(config: SchemeConfig) -> tuple[int, ...]:
    if config.N < config.K:
        raise ValueError(f"all-distinct demands need N >= K = {config.K}")
    return tuple(range(1, config.K + 1))


def random_demands(config: SchemeConfig, seed_or_rng) -> tuple[int, ...]:
    rng = (seed_or_rng if isinstance(seed_or_rng, np.random.Generator)
           else np.random.default_rng(seed_or_rng))
    return tuple(int(x) for x in rng.integers(1, config.N + 1, size=config.K))


def exhaustive_demands(config: SchemeConfig):
    """All N^K demand vectors in lexicographic order."""
    from itertools import product

    return product(range(1, config.N + 1), repeat=config.K)
