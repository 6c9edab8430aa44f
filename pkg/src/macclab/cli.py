"""Command-line experiment runner.

Subcommands:

* ``simulate`` - run the place / demand / transmit / decode cycle for one
  scheme and verify every user structurally and against the oracle.
* ``tradeoff`` - emit the corner points, envelope samples, and converse
  bound for an instance as exact-rational CSV.
* ``verify`` - run a named invariant suite and emit a JSON summary.

Exit codes: 0 success, 2 invalid configuration, 3 verification failure,
4 I/O error.  The default seed comes from --seed, then MACC_SEED, then 0;
all reports record the seed that produced them.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dumps
from .analysis import check_identities, tradeoff_rows, write_tradeoff_csv
from .combinatorics import binom
from .decode import OracleSession
from .delivery import deliver
from .mds import rs_generator, verify_mds
from .model import (InvalidConfigError, all_distinct_demands, exhaustive_demands,
                    make_config, random_demands, random_library, save_library)
from .placement import codes_for, place
from .simulate import run_simulation

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_VERIFICATION = 3
EXIT_IO = 4

EXHAUSTIVE_CAP = 100_000


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macclab",
        description="combinatorial multi-access coded caching laboratory")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with default argument values")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one place/deliver/decode cycle")
    sim.add_argument("--scheme", required=True,
                     choices=("mkr", "s1", "corner", "s2"))
    sim.add_argument("-C", type=int, required=True, help="number of caches")
    sim.add_argument("-r", type=int, required=True, help="caches per user")
    sim.add_argument("-t", type=int, default=None, help="placement parameter")
    sim.add_argument("-N", type=int, required=True, help="number of files")
    sim.add_argument("--f-hint", type=int, default=1,
                     help="minimum file length in symbols")
    sim.add_argument("--demands", default="random",
                     choices=("random", "exhaustive", "explicit", "distinct"))
    sim.add_argument("--demand-vector", default=None,
                     help="comma-separated file ids for --demands explicit")
    sim.add_argument("--count", type=int, default=1,
                     help="number of random demand vectors")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--no-oracle", action="store_true",
                     help="skip the linear-algebra oracle cross-check")
    sim.add_argument("--out", type=Path, default=None,
                     help="directory for report.json and dumps")

    trd = sub.add_parser("tradeoff", help="emit rate-memory trade-off CSV")
    trd.add_argument("-C", type=int, required=True)
    trd.add_argument("-r", type=int, required=True)
    trd.add_argument("-N", type=int, required=True)
    trd.add_argument("--grid", type=int, default=0,
                     help="additional evenly spaced M samples on [0, N/r]")
    trd.add_argument("--decimal", action="store_true",
                     help="render floats instead of exact rationals")
    trd.add_argument("--out", type=Path, default=None)

    ver = sub.add_parser("verify", help="run an invariant suite")
    ver.add_argument("--suite", default="all",
                     choices=("identities", "mds", "decode", "all"))
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--out", type=Path, default=None)
    return parser


def _default_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("MACC_SEED")
    return int(env) if env else 0


def _demand_vectors(config, args, seed):
    if args.demands == "explicit":
        if not args.demand_vector:
            raise InvalidConfigError("--demands explicit needs --demand-vector")
        return [tuple(int(x) for x in args.demand_vector.split(","))]
    if args.demands == "distinct":
        return [all_distinct_demands(config)]
    if args.demands == "exhaustive":
        total = config.N ** config.K
        if total > EXHAUSTIVE_CAP:
            raise InvalidConfigError(
                f"exhaustive demand space has {total} vectors "
                f"(cap {EXHAUSTIVE_CAP}); use --demands random")
        return list(exhaustive_demands(config))
    rng = np.random.default_rng(seed)
    return [random_demands(config, rng) for _ in range(args.count)]


def _cmd_simulate(args) -> int:
    seed = _default_seed(args)
    try:
        config = make_config(args.scheme, args.C, args.r, args.N, t=args.t,
                             f_hint=args.f_hint)
        vectors = _demand_vectors(config, args, seed)
    except (InvalidConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    library = random_library(config, seed)
    report = run_simulation(config, library, vectors,
                            check_oracle=not args.no_oracle)
    report["seed"] = seed
    if args.out is not None:
        try:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
            save_library(library, config, args.out / "library", seed=seed)
            dumps.save_caches(place(config, library), args.out / "caches")
            dumps.save_batch(deliver(config, library, vectors[0]),
                             args.out / "broadcast")
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    summary = {"scheme": config.scheme, "C": config.C, "r": config.r,
               "t": config.t, "N": config.N, "seed": seed,
               "measured_M": report["measured_M"],
               "measured_R": report["demands"][0]["measured_R"],
               "demand_vectors": len(vectors), "ok": report["ok"]}
    print(json.dumps(summary, indent=2))
    if not report["ok"]:
        for entry in report["demands"]:
            for user in entry["users"]:
                if not user["decoded"]:
                    print(f"FAIL d={entry['demands']} user={user['user']}: "
                          f"{user.get('error', 'mismatch')}", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def _cmd_tradeoff(args) -> int:
    try:
        if not 1 <= args.r < args.C or args.N < 1:
            raise InvalidConfigError("need 1 <= r < C and N >= 1")
        rows = tradeoff_rows(args.C, args.r, args.N, grid=args.grid)
    except (InvalidConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    try:
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            with open(args.out / "tradeoff.csv", "w", newline="") as fh:
                write_tradeoff_csv(rows, fh, decimal=args.decimal)
        else:
            write_tradeoff_csv(rows, sys.stdout, decimal=args.decimal)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _suite_identities() -> dict:
    report = check_identities()
    return {"ok": report["ok"],
            "checked": {k: v["checked"] for k, v in report.items()
                        if isinstance(v, dict)},
            "failures": {k: v["failures"] for k, v in report.items()
                         if isinstance(v, dict) and v["failures"]}}


def _suite_mds(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    checked, failures = 0, []
    from .field import field_make
    for k in range(1, 7):
        for n in range(k, 13):
            checked += 1
            if not verify_mds(rs_generator(k, n, field_make(4)), rng):
                failures.append(["raw", k, n])
    for params in (("s1", 4, 2, 6, 2), ("s1", 5, 3, 10, 2), ("corner", 4, 2, 6, None),
                   ("s2", 4, 2, 6, None), ("s2", 5, 3, 10, None)):
        scheme, C, r, N, t = params
        config = make_config(scheme, C, r, N, t=t)
        for code in codes_for(config).all_codes():
            checked += 1
            if not verify_mds(code, rng):
                failures.append([scheme, C, r, N, t, code.k, code.n])
    return {"ok": not failures, "checked": checked, "failures": failures}


def _suite_decode(seed: int) -> dict:
    checked, failures = 0, []
    for scheme in ("mkr", "s1"):
        for t in (1, 2):
            config = make_config(scheme, 4, 2, 2, t=t)
            library = random_library(config, seed)
            report = run_simulation(config, library,
                                    exhaustive_demands(config))
            checked += len(report["demands"]) * config.K
            if not report["ok"]:
                failures.append([scheme, 4, 2, 2, t])
    return {"ok": not failures, "checked": checked, "failures": failures}


def _cmd_verify(args) -> int:
    seed = _default_seed(args)
    suites = {}
    if args.suite in ("identities", "all"):
        suites["identities"] = _suite_identities()
    if args.suite in ("mds", "all"):
        suites["mds"] = _suite_mds(seed)
    if args.suite in ("decode", "all"):
        suites["decode"] = _suite_decode(seed)
    summary = {"seed": seed, "suites": suites,
               "ok": all(s["ok"] for s in suites.values())}
    text = json.dumps(summary, indent=2)
    print(text)
    if args.out is not None:
        try:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "verify.json").write_text(text + "\n")
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if summary["ok"] else EXIT_VERIFICATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            defaults = json.loads(Path(args.config).read_text())
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
        for key, value in defaults.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and getattr(args, attr) in (None, False):
                setattr(args, attr, value)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "tradeoff":
        return _cmd_tradeoff(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
