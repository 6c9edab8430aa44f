"""End-to-end experiment engine: place, deliver, decode, verify.

One simulation covers a config, a library, and a list of demand vectors.
For every demand vector each user is decoded twice, by the scheme's
structured decoder and by the generic linear-algebra oracle, and both
outputs are compared symbol-for-symbol against the library.  Measured
occupancy and rate are checked as exact rationals against the scheme's
analytic values.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .analysis import scheme1_memory
from .combinatorics import binom, format_fraction
from .decode import OracleSession, UndecodableError, decode_user
from .delivery import deliver, measured_rate, scheme2_file_plan
from .model import (CacheContents, Library, SchemeConfig, check_demands,
                    demand_of)
from .placement import place


def analytic_memory(config: SchemeConfig) -> Fraction:
    """The cache size the active scheme promises, in file units."""
    C, r, t, N = config.C, config.r, config.t, config.N
    if config.scheme == "mkr":
        return Fraction(N * t, C)
    if config.scheme == "s1":
        return scheme1_memory(C, r, t, N)
    if config.scheme == "corner":
        return Fraction(N, r)
    return Fraction(N - binom(C - 1, r), C)


def analytic_rate(config: SchemeConfig, demands=None) -> Fraction:
    """The delivery rate the active scheme promises for this demand."""
    C, r, t = config.C, config.r, config.t
    if config.scheme in ("mkr", "s1"):
        return Fraction(binom(C, t + r), binom(C, t))
    if config.scheme == "corner":
        return Fraction(0)
    plan = scheme2_file_plan(config, demands)
    if plan["mode"] == "files":
        return Fraction(len(plan["files"]))
    return Fraction(binom(C - 1, r))


def run_simulation(config: SchemeConfig, library: Library, demand_vectors,
                   check_oracle: bool = True) -> dict:
    """Returns a report; ``report['ok']`` is True iff everything verified."""
    caches = place(config, library)
    occupancy = caches.occupancy()
    expected_m = analytic_memory(config)
    report = {
        "config": config.describe(),
        "measured_M": format_fraction(occupancy),
        "expected_M": format_fraction(expected_m),
        "memory_ok": occupancy == expected_m,
        "demands": [],
    }
    sessions = ({u: OracleSession(config, caches, u) for u in config.users}
                if check_oracle else {})
    ok = report["memory_ok"]
    for demands in demand_vectors:
        demands = check_demands(config, demands)
        batch = deliver(config, library, demands)
        rate = measured_rate(batch)
        expected_r = analytic_rate(config, demands)
        entry = {
            "demands": list(demands),
            "measured_R": format_fraction(rate),
            "expected_R": format_fraction(expected_r),
            "rate_ok": rate == expected_r,
            "users": [],
        }
        for user in config.users:
            want = demand_of(config, demands, user)
            truth = library.file(want)
            stats: dict = {}
            result = {"user": list(user), "scheme": config.scheme,
                      "demand": want, "decoded": False,
                      "stage_counts": stats, "bytes_compared": 0}
            try:
                got = decode_user(config, caches, batch, user, want, stats=stats)
                result["bytes_compared"] = int(truth.size)
                result["decoded"] = bool(np.array_equal(got, truth))
                if not result["decoded"]:
                    result["error"] = "structured decoder output differs"
            except UndecodableError as exc:
                result["error"] = str(exc)
            if check_oracle and result["decoded"]:
                try:
                    oracle_out = sessions[user].decode(batch, want)
                    result["oracle_ok"] = bool(np.array_equal(oracle_out, truth))
                except UndecodableError as exc:
                    result["oracle_ok"] = False
                    result["error"] = f"oracle: {exc}"
                result["decoded"] = result["decoded"] and result["oracle_ok"]
            entry["users"].append(result)
        entry["ok"] = entry["rate_ok"] and all(u["decoded"] for u in entry["users"])
        ok = ok and entry["ok"]
        report["demands"].append(entry)
    report["ok"] = ok
    return report
