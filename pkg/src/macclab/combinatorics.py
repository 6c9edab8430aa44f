"""Subset enumeration and exact rational helpers.

Caches, users and files are 1-based throughout, matching the [C]/[N]
index convention of the delivery schemes.  Users are the r-subsets of [C]
and demand-vector slots follow their lexicographic order.  Rates and
memories are :class:`fractions.Fraction`, never floats.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations


def binom(n: int, m: int) -> int:
    """Binomial coefficient with binom(n, m) = 0 whenever m < 0 or m > n."""
    if n < 0:
        raise ValueError("binom requires n >= 0")
    if m < 0 or m > n:
        return 0
    return math.comb(n, m)


@lru_cache(maxsize=None)
def ksubsets(c: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-subsets of [c] in lexicographic order, as sorted tuples."""
    if not 0 <= k <= c:
        raise ValueError(f"need 0 <= k <= c, got k={k}, c={c}")
    return tuple(combinations(range(1, c + 1), k))


def subset_rank(subset, c: int) -> int:
    """1-based lexicographic rank of a k-subset of [c]."""
    s = tuple(sorted(subset))
    k = len(s)
    if any(not 1 <= x <= c for x in s) or len(set(s)) != k:
        raise ValueError(f"{subset} is not a subset of [{c}]")
    rank = 0
    prev = 0
    for i, x in enumerate(s):
        for y in range(prev + 1, x):
            rank += binom(c - y, k - i - 1)
        prev = x
    return rank + 1


def subset_unrank(rank: int, c: int, k: int) -> tuple[int, ...]:
    """Inverse of :func:`subset_rank` (1-based)."""
    if not 1 <= rank <= binom(c, k):
        raise ValueError(f"rank {rank} out of range for ({c},{k})")
    rest = rank - 1
    out = []
    prev = 0
    for i in range(k):
        y = prev + 1
        while True:
            below = binom(c - y, k - i - 1)
            if rest < below:
                break
            rest -= below
            y += 1
        out.append(y)
        prev = y
    return tuple(out)


def phi(c: int, subset) -> int:
    """1-based position of cache c inside the sorted subset."""
    s = tuple(sorted(subset))
    try:
        return s.index(c) + 1
    except ValueError:
        raise ValueError(f"cache {c} not in {subset}") from None


def frac(numerator, denominator=1) -> Fraction:
    return Fraction(numerator, denominator)


def format_fraction(x: Fraction) -> str:
    """Render exactly, 'p/q' for non-integers."""
    return str(Fraction(x))


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)
