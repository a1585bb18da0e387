"""Command line interface.

Exit codes: 0 success / no evidence, 2 usage or input error, 3 rejection,
4 a strategy or forecasting system violated its contract.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .audit import (AuditConfig, church_check, consistency_simulation, audit, near_half_demo,
                    sweep_constant_intervals)
from .errors import ContractError, ImprandError
from .forecast import IntervalForecast
from .gen import POLICY_KINDS, RealityPolicy, sample_path
from .selection import parse_selection
from .strategies import strategy_from_dict
from .systems import AlternatingPQ, NearHalf, Stationary, Vacuous, system_from_dict
from .tree import FiniteGamble, finite_horizon_lower_expectation, finite_horizon_upper_expectation

EXIT_OK, EXIT_USAGE, EXIT_REJECT, EXIT_CONTRACT = 0, 2, 3, 4
PRESETS = ("stationary", "vacuous", "alternating-pq", "near-half")


class UsageError(Exception):
    pass


def _add_system_args(p, required=True):
    p.add_argument("--system", required=required,
                   help=f"preset ({', '.join(PRESETS)}) or a JSON system file")
    p.add_argument("--lower", type=float, help="stationary lower forecast")
    p.add_argument("--upper", type=float, help="stationary upper forecast")
    p.add_argument("--p", type=float, help="alternating-pq forecast after an odd number of outcomes")
    p.add_argument("--q", type=float, help="alternating-pq forecast after an even number of outcomes")


def _system(args):
    name = args.system
    if name == "stationary":
        if args.lower is None:
            raise UsageError("stationary system needs --lower (and optionally --upper)")
        upper = args.lower if args.upper is None else args.upper
        return Stationary(IntervalForecast(args.lower, upper))
    if name == "vacuous":
        return Vacuous()
    if name == "alternating-pq":
        if args.p is None or args.q is None:
            raise UsageError("alternating-pq system needs --p and --q")
        return AlternatingPQ(args.p, args.q)
    if name == "near-half":
        return NearHalf()
    if Path(name).is_file():
        return system_from_dict(io.read_json(name))
    raise UsageError(f"unknown system {name!r}: not a preset and not a file")


def _system_inputs(args):
    return [args.system] if args.system not in PRESETS else []


def _params(args) -> dict:
    # output locations do not affect results, so reruns into other files give identical reports
    return {k: v for k, v in vars(args).items() if k not in ("func", "output", "csv")}


def _load_path(args):
    bits = io.read_bits(args.bits)
    n = bits.size if args.n is None else args.n
    if n < 1 or n > bits.size:
        raise UsageError(f"horizon {n} is outside 1..{bits.size} (length of {args.bits})")
    return bits[:n]


def cmd_generate(args) -> int:
    system = _system(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    bits = sample_path(system, RealityPolicy(args.policy, args.weight), args.seed, args.n)
    manifest = io.RunManifest.build("generate", _params(args), [args.seed], _system_inputs(args))
    if args.output:
        io.write_bits(args.output, bits)
    else:
        sys.stdout.write(io.format_bits(bits) + "\n")
    sys.stderr.write(io.dumps({"manifest": manifest.to_dict()}))
    return EXIT_OK


def _battery(args, system):
    if not args.battery:
        return None
    doc = io.read_json(args.battery)
    entries = doc["strategies"] if isinstance(doc, dict) else doc
    return [strategy_from_dict(e, system) for e in entries]


def cmd_audit(args) -> int:
    system = _system(args)
    bits = _load_path(args)
    cfg = AuditConfig(ville_threshold=args.K, strategies=_battery(args, system), tolerance=args.tol)
    report = audit(bits, system, cfg)
    inputs = [args.bits] + _system_inputs(args) + ([args.battery] if args.battery else [])
    manifest = io.RunManifest.build("audit", _params(args), [], inputs)
    doc = {"manifest": manifest.to_dict(), **report.to_dict()}
    io.write_json(args.output, doc)
    if args.csv:
        io.write_csv(args.csv, ["step", "strategy", "log_capital"], report.trajectory_rows(args.stride))
    if report.errors:
        for r in report.errors:
            sys.stderr.write(f"contract violation: {r.error}\n")
        return EXIT_CONTRACT
    return EXIT_REJECT if report.reject else EXIT_OK


def cmd_sweep(args) -> int:
    bits = _load_path(args)
    report = sweep_constant_intervals(bits, args.h, AuditConfig(ville_threshold=args.K),
                                      workers=args.workers)
    manifest = io.RunManifest.build("sweep", _params(args), [], [args.bits])
    io.write_json(args.output, {"manifest": manifest.to_dict(), **report.to_dict()})
    if args.csv:
        rows = ((l, u, "REJECT" if rej else "NO-EVIDENCE", m) for l, u, rej, m in report.cells())
        io.write_csv(args.csv, ["l", "u", "verdict", "max_log_capital"], rows)
    return EXIT_OK


def cmd_frequency(args) -> int:
    bits = _load_path(args)
    I = IntervalForecast(args.lower, args.upper)
    records = [church_check(bits, bits.size, parse_selection(s), I) for s in args.selection]
    manifest = io.RunManifest.build("frequency", _params(args), [], [args.bits])
    io.write_json(args.output, {"manifest": manifest.to_dict(),
                                "checks": [r.to_dict() for r in records]})
    return EXIT_REJECT if any(r.within is False for r in records) else EXIT_OK


def _read_gamble(path) -> FiniteGamble:
    doc = io.read_json(path)
    values = doc.get("values") if isinstance(doc, dict) else doc
    if isinstance(values, dict):
        depth = len(next(iter(values))) if values else 0
        if any(len(k) != depth for k in values) or len(values) != 2**depth:
            raise UsageError("gamble table must list every situation of one depth exactly once")
        arr = np.array([values[format(i, f"0{depth}b") if depth else ""] for i in range(2**depth)],
                       dtype=np.float64)
    elif isinstance(values, list):
        depth = int(round(math.log2(len(values)))) if values else -1
        if depth < 0 or 2**depth != len(values):
            raise UsageError("gamble value list length must be a power of two")
        arr = np.array(values, dtype=np.float64)
    else:
        raise UsageError("gamble file needs a 'values' list or table")
    return FiniteGamble(depth, arr)


def cmd_expect(args) -> int:
    system = _system(args)
    g = _read_gamble(args.gamble)
    doc = {
        "manifest": io.RunManifest.build("expect", _params(args), [],
                                         [args.gamble] + _system_inputs(args)).to_dict(),
        "depth": g.depth,
        "lower": finite_horizon_lower_expectation(system, g),
        "upper": finite_horizon_upper_expectation(system, g),
    }
    io.write_json(args.output, doc)
    return EXIT_OK


def cmd_demo(args) -> int:
    demo = near_half_demo(args.seed, args.n, args.K)
    manifest = io.RunManifest.build("demo-near-half", _params(args), [args.seed])
    io.write_json(args.output, {"manifest": manifest.to_dict(), **demo.to_dict()})
    if args.csv:
        def rows():
            for k in range(0, demo.log_half.size, args.stride):
                yield k, "hellinger-half", demo.log_half[k]
                yield k, "hellinger-near-half", demo.log_near[k]
        io.write_csv(args.csv, ["step", "strategy", "log_capital"], rows())
    return EXIT_OK


def cmd_simulate(args) -> int:
    system = _system(args)
    res = consistency_simulation(system, args.paths, args.n, AuditConfig(ville_threshold=args.K),
                                 seed=args.seed, policy=RealityPolicy(args.policy, args.weight),
                                 workers=args.workers)
    manifest = io.RunManifest.build("simulate", _params(args), [args.seed], _system_inputs(args))
    io.write_json(args.output, {"manifest": manifest.to_dict(), "reject_fraction": res.reject_fraction,
                                "n_rejected": res.n_rejected, "n_paths": res.n_paths,
                                "K": res.K, "bound": res.bound, "within_bound": res.within_bound})
    return EXIT_OK


def _threshold(text: str) -> float:
    k = float(text)
    if not k > 1:
        raise argparse.ArgumentTypeError("K must exceed 1")
    return k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imprand", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample an outcome path inside a forecasting system")
    _add_system_args(p)
    p.add_argument("--n", type=int, required=True, help="number of outcomes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=POLICY_KINDS, default="fixed-precise")
    p.add_argument("--weight", type=float, default=0.5, help="position in [l, u] for fixed-precise")
    p.add_argument("-o", "--output", help="bit file (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("audit", help="run a strategy battery along a path")
    p.add_argument("bits")
    _add_system_args(p)
    p.add_argument("--n", type=int, help="horizon (default: whole file)")
    p.add_argument("--K", type=_threshold, default=100.0, help="Ville threshold")
    p.add_argument("--battery", help="JSON battery config (default: built-in battery)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("-o", "--output", help="JSON report (default: stdout)")
    p.add_argument("--csv", help="trajectory CSV: step,strategy,log_capital")
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", help="verdicts for all stationary grid intervals")
    p.add_argument("bits")
    p.add_argument("--h", type=float, default=0.05, help="grid step 1/m, 4 <= m <= 100")
    p.add_argument("--n", type=int)
    p.add_argument("--K", type=_threshold, default=100.0)
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--csv", help="matrix CSV: l,u,verdict,max_log_capital")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("frequency", help="selected relative frequencies against an interval")
    p.add_argument("bits")
    p.add_argument("--lower", type=float, default=0.0)
    p.add_argument("--upper", type=float, default=1.0)
    p.add_argument("--selection", nargs="+", default=["all", "even", "odd"],
                   help="all, even, odd, every-k:K, after-ones:M")
    p.add_argument("--n", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_frequency)

    p = sub.add_parser("expect", help="finite-horizon lower/upper expectation of a gamble file")
    p.add_argument("gamble")
    _add_system_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("demo-near-half",
                       help="near-half path vs the Hellinger pair: stationary 1/2 gets rejected")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--K", type=_threshold, default=100.0)
    p.add_argument("-o", "--output")
    p.add_argument("--csv")
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("simulate", help="reject fraction of paths audited against their own system")
    _add_system_args(p)
    p.add_argument("--paths", type=int, default=200)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--K", type=_threshold, default=100.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=POLICY_KINDS, default="fixed-precise")
    p.add_argument("--weight", type=float, default=0.5)
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ContractError as exc:
        sys.stderr.write(f"imprand: contract violation: {exc}\n")
        return EXIT_CONTRACT
    except (UsageError, ImprandError, OSError) as exc:
        sys.stderr.write(f"imprand {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
