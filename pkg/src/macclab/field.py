"""Arithmetic over the binary extension fields GF(2^m), 1 <= m <= 16.

Field elements are plain Python ints in [0, 2^m - 1]: bit i is the
coefficient of x^i in the polynomial basis.  Addition is XOR (the field has
characteristic 2, so delivery-phase XORs and erasure-code algebra live in
one arithmetic).  Multiplication and inversion go through log/antilog
tables built once per degree, which requires the committed reduction
polynomial to be primitive (x generates the multiplicative group); the
table below was chosen accordingly and is validated at construction time.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Primitive polynomial per degree, as a bitmask including the x^m term.
# Primitivity (x is a generator) is asserted when the tables are built.
PRIMITIVE_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

MAX_DEGREE = 16


class GF2m:
    """GF(2^m) with scalar and numpy-vectorized operations.

    Instances are immutable after construction and safe to share across
    threads.  Obtain them through :func:`field_make`, which caches one
    instance per degree so configs holding only ``m`` stay hashable.
    """

    __slots__ = ("m", "q", "poly", "exp", "log")

    def __init__(self, m: int, poly: int | None = None):
        if not 1 <= m <= MAX_DEGREE:
            raise ValueError(f"field degree must be in [1, {MAX_DEGREE}], got {m}")
        if poly is None:
            poly = PRIMITIVE_POLY[m]
        if not (poly >> m) & 1:
            raise ValueError(f"polynomial {poly:#b} does not have degree {m}")
        self.m = m
        self.q = 1 << m
        self.poly = poly
        self._build_tables()

    def _build_tables(self) -> None:
        q = self.q
        # exp is doubled so a log-sum never needs a modulo.
        exp = np.zeros(max(2 * (q - 1), 1), dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        seen = set()
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            seen.add(x)
            # multiply by x and reduce
            x <<= 1
            if x & q:
                x ^= self.poly
        if len(seen) != q - 1 or x != 1:
            raise ValueError(
                f"polynomial {self.poly:#b} is not primitive for m={self.m}"
            )
        exp[q - 1 :] = exp[: q - 1]
        self.exp = exp
        self.log = log

    # -- scalar operations -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add  # characteristic 2

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    # -- vectorized operations ---------------------------------------------

    def mul_arr(self, a, b) -> np.ndarray:
        """Elementwise product with numpy broadcasting."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def scale(self, c: int, v) -> np.ndarray:
        """Scalar times vector."""
        v = np.asarray(v, dtype=np.int64)
        if c == 0:
            return np.zeros_like(v)
        if c == 1:
            return v.copy()
        return self.mul_arr(c, v)

    def random_elements(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GF2m(m={self.m}, poly={self.poly:#x})"


@lru_cache(maxsize=None)
def field_make(m: int) -> GF2m:
    """Return the shared GF(2^m) instance with the committed polynomial."""
    return GF2m(m)
