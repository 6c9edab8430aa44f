"""Exact rate-memory trade-offs, the converse bound, and identity checks.

Everything here is Fraction arithmetic: optimality in the high- and
low-memory regimes is an exact equality between the achievable envelope
and the converse bound, so floats are never good enough.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import binom, format_fraction


@dataclass(frozen=True)
class TradeoffPoint:
    M: Fraction
    R: Fraction
    provenance: str


@dataclass(frozen=True)
class BoundResult:
    M: Fraction
    bound: Fraction
    argmax: tuple[int, int]  # (s, l)


def mkr_point(C: int, r: int, t: int, N: int) -> TradeoffPoint:
    """Uncoded-baseline corner: M = N t / C, R = binom(C, t+r)/binom(C, t)."""
    if not 1 <= t <= C:
        raise ValueError(f"mkr needs t in [1, {C}]")
    return TradeoffPoint(M=Fraction(N * t, C),
                         R=Fraction(binom(C, t + r), binom(C, t)),
                         provenance=f"mkr(t={t})")


def scheme1_memory(C: int, r: int, t: int, N: int) -> Fraction:
    """Cache memory of the multi-round coded placement at parameter t.

    Two branches, t >= r and t < r; both collapse to N/r at t = C - r + 1.
    """
    if not (1 <= r < C and 1 <= t <= C - r + 1):
        raise ValueError(f"scheme1 needs t in [1, {C - r + 1}], got {t}")
    if t >= r:
        s = sum(Fraction(r - i, r) * binom(r, i - 1) * binom(C - r, t - r + i - 1)
                for i in range(1, r))
    else:
        s = sum(Fraction(t - i, r) * binom(r, t - i + 1) * binom(C - r, i - 1)
                for i in range(1, t))
    return N * (Fraction(t, C) - Fraction(s, binom(C, t)))


def scheme1_memory_roundsum(C: int, r: int, t: int, N: int) -> Fraction:
    """The same memory as a direct per-round stored-symbol count."""
    if not (1 <= r < C and 1 <= t <= C - r + 1):
        raise ValueError(f"scheme1 needs t in [1, {C - r + 1}], got {t}")
    rt = min(r, t)
    big_b = binom(C - 1, t - 1)
    symbols = math.factorial(rt - 1) * big_b
    for b in range(1, rt):
        count = math.factorial(rt) // ((rt - b) * (rt - b + 1))
        if t >= r:
            d = sum(binom(r - 1, r - i) * binom(C - r, t - r + i - 1)
                    for i in range(1, b + 1))
        else:
            d = sum(binom(r - 1, t - i) * binom(C - r, i - 1)
                    for i in range(1, b + 1))
        symbols += count * (big_b - d)
    return N * Fraction(symbols, math.factorial(rt) * binom(C, t))


def scheme1_points(C: int, r: int, N: int) -> list[TradeoffPoint]:
    """Corners for every t; rate matches the uncoded baseline at each t."""
    return [TradeoffPoint(M=scheme1_memory(C, r, t, N),
                          R=Fraction(binom(C, t + r), binom(C, t)),
                          provenance=f"s1(t={t})" if t <= C - r else "corner")
            for t in range(1, C - r + 2)]


def scheme2_segment(C: int, r: int, N: int) -> list[TradeoffPoint]:
    """Zero-memory broadcast plus the low-memory coded corner (when legal)."""
    points = [TradeoffPoint(M=Fraction(0), R=Fraction(N), provenance="s2-zero")]
    quota = binom(C - 1, r)
    if N > quota:
        points.append(TradeoffPoint(M=Fraction(N - quota, C), R=Fraction(quota),
                                    provenance="s2-corner"))
    return points


class Envelope:
    """Lower convex envelope of achievable corners; memory sharing makes
    every point on a chord between two achievable points achievable."""

    def __init__(self, points: list[TradeoffPoint]):
        self.points = list(points)
        best: dict[Fraction, TradeoffPoint] = {}
        for p in points:
            if p.M not in best or p.R < best[p.M].R:
                best[p.M] = p
        cand = sorted(best.values(), key=lambda p: p.M)
        hull: list[TradeoffPoint] = []
        for p in cand:
            while len(hull) >= 2:
                a, b = hull[-2], hull[-1]
                # keep b only if it lies strictly below the chord a-p
                if (b.R - a.R) * (p.M - a.M) >= (p.R - a.R) * (b.M - a.M):
                    hull.pop()
                else:
                    break
            hull.append(p)
        # drop trailing corners that only go right at equal-or-higher rate
        while len(hull) >= 2 and hull[-1].R >= hull[-2].R:
            hull.pop()
        self.corners = hull

    def evaluate(self, M) -> Fraction:
        M = Fraction(M)
        if M < 0:
            raise ValueError("M must be >= 0")
        if M >= self.corners[-1].M:
            return self.corners[-1].R
        if M < self.corners[0].M:
            raise ValueError(f"M={M} below the smallest corner")
        for a, b in zip(self.corners, self.corners[1:]):
            if a.M <= M <= b.M:
                return a.R + (b.R - a.R) * (M - a.M) / (b.M - a.M)
        raise AssertionError("unreachable")

    def __call__(self, M) -> Fraction:
        return self.evaluate(M)


def achievable_envelope(C: int, r: int, N: int) -> Envelope:
    """Envelope over the zero-memory point, the low-memory coded corner,
    and every multi-round corner (the last of which is (N/r, 0))."""
    return Envelope(scheme2_segment(C, r, N) + scheme1_points(C, r, N))


def omega(s: int, l: int, C: int, r: int, N: int) -> int:
    """Extra caches needed to cover ceil(N/l) files, capped at C - s."""
    if not r <= s <= C:
        raise ValueError(f"need r <= s <= C, got s={s}")
    if l < 1:
        raise ValueError("l must be >= 1")
    need = -(-N // l)
    i = 0
    while binom(s + i, r) < need:
        i += 1
    return min(C - s, i)


def lower_bound(C: int, r: int, N: int, M) -> BoundResult:
    """Converse bound on the optimal rate at memory M.

    Exact maximization over s in [r, C] and l in [1, ceil(N / binom(s, r))]
    of (1/l) * (N - w/(s+w) * (N - l*binom(s,r))^+ - (N - l*binom(C,r))^+
    - s*M), clipped below at zero.  Ties report the lexicographically
    smallest (s, l).
    """
    M = Fraction(M)
    if not 0 <= M <= N:
        raise ValueError(f"M must be in [0, {N}]")
    best: Fraction | None = None
    arg = (r, 1)
    for s in range(r, C + 1):
        lmax = -(-N // binom(s, r))
        for l in range(1, lmax + 1):
            w = omega(s, l, C, r, N)
            value = Fraction(
                N
                - Fraction(w, s + w) * max(0, N - l * binom(s, r))
                - max(0, N - l * binom(C, r))
                - s * M,
                l,
            )
            if best is None or value > best:
                best, arg = value, (s, l)
    return BoundResult(M=M, bound=max(best, Fraction(0)), argmax=arg)


def check_optimality_regimes(C: int, r: int, N: int, interior: int = 1) -> dict:
    """Exact envelope == bound checks on the two provably optimal regimes.

    High memory: R = 1 - r M / N on [N (K-1)/(r K), N/r].  Low memory
    (needs binom(C-1, r) < N <= binom(C, r)): R = N - C M on
    [0, (N - binom(C-1, r))/C].  Each regime is tested at its endpoints
    and ``interior`` evenly spaced interior rationals.
    """
    env = achievable_envelope(C, r, N)

    def sweep(lo: Fraction, hi: Fraction, expected):
        checks = []
        grid = [lo + (hi - lo) * Fraction(i, interior + 1)
                for i in range(interior + 2)]
        for M in grid:
            e, b, want = env(M), lower_bound(C, r, N, M).bound, expected(M)
            checks.append({"M": M, "envelope": e, "bound": b, "expected": want,
                           "ok": e == b == want})
        return checks

    K = binom(C, r)
    report = {}
    hi_checks = sweep(Fraction(N * (K - 1), r * K), Fraction(N, r),
                      lambda M: 1 - Fraction(r, N) * M)
    report["high_memory"] = {"applies": True,
                             "interval": (Fraction(N * (K - 1), r * K), Fraction(N, r)),
                             "checks": hi_checks,
                             "ok": all(c["ok"] for c in hi_checks)}
    quota = binom(C - 1, r)
    if quota < N <= K:
        lo_checks = sweep(Fraction(0), Fraction(N - quota, C),
                          lambda M: N - C * M)
        report["low_memory"] = {"applies": True,
                                "interval": (Fraction(0), Fraction(N - quota, C)),
                                "checks": lo_checks,
                                "ok": all(c["ok"] for c in lo_checks)}
    else:
        report["low_memory"] = {"applies": False, "ok": True}
    report["ok"] = report["high_memory"]["ok"] and report["low_memory"]["ok"]
    return report


def check_identities(max_c: int = 12, max_lemma: int = 20, max_r: int = 10) -> dict:
    """Closed-form identity battery; failures are recorded, not raised.

    Covers: round-sum == closed-form memory for both branches; the
    t = C - r + 1 and t = C - r corner values; the telescoping sum of
    per-round pick counts; and the weighted/plain Vandermonde convolution
    identities the corner evaluations rest on.
    """
    report = {}

    failures, checked = [], 0
    for C in range(2, max_c + 1):
        for r in range(1, C):
            for t in range(1, C - r + 2):
                checked += 1
                if scheme1_memory(C, r, t, 1) != scheme1_memory_roundsum(C, r, t, 1):
                    failures.append(("roundsum", C, r, t))
            if scheme1_memory(C, r, C - r + 1, 1) != Fraction(1, r):
                failures.append(("corner-zero-rate", C, r))
            if C - r >= 1:
                K = binom(C, r)
                if scheme1_memory(C, r, C - r, 1) != Fraction(K - 1, r * K):
                    failures.append(("corner-last-positive", C, r))
    report["memory"] = {"checked": checked, "failures": failures}

    failures, checked = [], 0
    for r in range(2, max_r + 1):
        checked += 1
        total = sum(Fraction(math.factorial(r), (r - b) * (r - b + 1))
                    for b in range(1, r))
        if total != math.factorial(r - 1) * (r - 1):
            failures.append(("telescoping", r))
    report["telescoping"] = {"checked": checked, "failures": failures}

    failures, checked = [], 0
    for n1 in range(1, max_lemma + 1):
        for n2 in range(1, max_lemma + 1):
            for m in range(1, n1 + n2 + 1):
                checked += 1
                lhs = sum(k1 * binom(n1, k1) * binom(n2, m - k1)
                          for k1 in range(0, min(n1, m) + 1))
                rhs = Fraction(m * n1, n1 + n2) * binom(n1 + n2, m)
                if lhs != rhs:
                    failures.append(("weighted-vandermonde", n1, n2, m))
                plain = sum(binom(n1, k1) * binom(n2, m - k1)
                            for k1 in range(0, min(n1, m) + 1))
                if plain != binom(n1 + n2, m):
                    failures.append(("vandermonde", n1, n2, m))
    report["vandermonde"] = {"checked": checked, "failures": failures}

    report["ok"] = all(not v["failures"] for v in report.values()
                       if isinstance(v, dict))
    return report


def tradeoff_rows(C: int, r: int, N: int, grid: int = 0) -> list[dict]:
    """Corner points plus an optional M-grid, each with envelope and bound."""
    env = achievable_envelope(C, r, N)
    rows = []
    seen = set()
    for p in sorted(env.points, key=lambda p: (p.M, p.R)):
        b = lower_bound(C, r, N, p.M)
        rows.append({"M": p.M, "R_achievable": env(p.M), "R_bound": b.bound,
                     "provenance": p.provenance,
                     "argmax_s": b.argmax[0], "argmax_l": b.argmax[1]})
        seen.add(p.M)
    if grid > 0:
        top = Fraction(N, r)
        for i in range(grid + 1):
            M = top * Fraction(i, grid)
            if M in seen:
                continue
            b = lower_bound(C, r, N, M)
            rows.append({"M": M, "R_achievable": env(M), "R_bound": b.bound,
                         "provenance": "envelope",
                         "argmax_s": b.argmax[0], "argmax_l": b.argmax[1]})
    rows.sort(key=lambda row: (row["M"], row["R_achievable"]))
    return rows


def write_tradeoff_csv(rows: list[dict], stream, decimal: bool = False) -> None:
    """CSV with exact p/q rationals (or floats when ``decimal``)."""
    writer = csv.writer(stream)
    writer.writerow(["M", "R_achievable", "R_bound", "provenance",
                     "argmax_s", "argmax_l"])
    for row in rows:
        fmt = (lambda x: repr(float(x))) if decimal else format_fraction
        writer.writerow([fmt(row["M"]), fmt(row["R_achievable"]),
                         fmt(row["R_bound"]), row["provenance"],
                         row["argmax_s"], row["argmax_l"]])
