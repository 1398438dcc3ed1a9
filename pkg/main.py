#!/usr/bin/env python3
"""
Spectralab - Main Entry Point
Region calculus, verification suites and scaling sweeps for P(D) + V
"""

import argparse
import json
import logging
import math
import sys
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

import config
from errors import (
    ConfigError,
    ConvergenceError,
    GateRefusedError,
    OutputError,
    SingularMultiplierError,
    SpectralabError,
    SparseWindowError,
)
from lab import SpectralLab
from tools import SWEEP_KINDS, apply_overrides, load_run_config

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_OUTPUT = 3
EXIT_NUMERICAL = 4

# refusals of the numerics rather than of the inputs
NUMERICAL_KINDS = {ConvergenceError.kind, GateRefusedError.kind, SparseWindowError.kind,
                   SingularMultiplierError.kind}

SUITE_NAMES = ["region", "symbol", "grid", "weyl", "resolvent", "perturbation"]


def print_banner():
    """Print startup banner"""
    print("""
╔═══════════════════════════════════════════════════════════╗
║                                                           ║
║   ███████╗██████╗ ███████╗ ██████╗████████╗██████╗        ║
║   ██╔════╝██╔══██╗██╔════╝██╔════╝╚══██╔══╝██╔══██╗       ║
║   ███████╗██████╔╝█████╗  ██║        ██║   ██████╔╝       ║
║   ╚════██║██╔═══╝ ██╔══╝  ██║        ██║   ██╔══██╗       ║
║   ███████║██║     ███████╗╚██████╗   ██║   ██║  ██║       ║
║   ╚══════╝╚═╝     ╚══════╝ ╚═════╝   ╚═╝   ╚═╝  ╚═╝ LAB   ║
║                                                           ║
║   Uniform Sobolev, restriction and Bochner-Riesz checks   ║
║                                                           ║
╚═══════════════════════════════════════════════════════════╝
    """)


def exit_code_for(kind: str) -> int:
    if kind == OutputError.kind:
        return EXIT_OUTPUT
    if kind in NUMERICAL_KINDS:
        return EXIT_NUMERICAL
    return EXIT_CONFIG


# ==================== ARGUMENTS ====================

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="RunConfig JSON file")
    parser.add_argument("--output-dir", help="Directory for CSV/JSON results")
    parser.add_argument("--seed", type=int, help="Random seed for norm searches")
    parser.add_argument("--threads", type=int, help="Worker cap for sweeps")
    parser.add_argument("-v", "--verbose", action="store_true", help="Progress output and INFO logging")
    parser.add_argument("--quiet", action="store_true", help="No banner")


def _add_symbol(parser: argparse.ArgumentParser):
    parser.add_argument("--n", type=int, help="Dimension")
    parser.add_argument("--m", type=int, help="Symbol order (even)")
    parser.add_argument("--N", type=int, dest="grid_N", help="Grid points per axis (power of two)")
    parser.add_argument("--L", type=float, dest="grid_L", help="Torus side length")
    parser.add_argument("--potential", help="Potential, e.g. ball:0.1,1.0 or inverse_square:0.05")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectralab", description="Spectralab numerical lab")
    commands = parser.add_subparsers(dest="command", required=True)

    region = commands.add_parser("region", help="Admissible exponent regions")
    _add_common(region)
    region.add_argument("--case", help="1-4, krs, sobolev or restriction")
    region.add_argument("--n", type=int, help="Dimension")
    region.add_argument("--m", type=int, help="Symbol order")
    region.add_argument("--alpha", help="Order, exact rational")
    region.add_argument("--p", help="Anchor exponent, exact rational")
    region.add_argument("--p0", help="Lower band exponent, exact rational")
    region.add_argument("--gaussian-bounds", action="store_true", default=None)
    region.add_argument("--extended-case4", action="store_true", default=None)
    region.add_argument("--query", help="Point '1/r,1/s' to test for membership")

    verify = commands.add_parser("verify", help="Deterministic identity suites")
    _add_common(verify)
    verify.add_argument("--filter", action="append", choices=SUITE_NAMES, help="Run only these suites")
    verify.add_argument("--symbol", help="Symbol config as JSON")

    sweep = commands.add_parser("sweep", help="Measured scaling sweeps")
    sweep.add_argument("kind", choices=SWEEP_KINDS)
    _add_common(sweep)
    _add_symbol(sweep)
    sweep.add_argument("--p", help="Source exponent")
    sweep.add_argument("--q", help="Target exponent")
    sweep.add_argument("--alpha", type=float, help="Bochner-Riesz order")
    sweep.add_argument("--decades", type=float)
    sweep.add_argument("--points", type=int)
    sweep.add_argument("--width", type=float, help="Relative spectral window width")
    sweep.add_argument("--eps", type=float, help="Relative boundary regularization")

    perturb = commands.add_parser("perturb", help="Perturbed resolvent and spectral density checks")
    _add_common(perturb)
    _add_symbol(perturb)
    perturb.add_argument("--z", help="Spectral parameter, e.g. -1 or 1+0.5j")
    perturb.add_argument("--lam", type=float)
    perturb.add_argument("--eps", type=float)

    weyl = commands.add_parser("weyl", help="Distribution calculus and Weyl derivatives")
    _add_common(weyl)
    weyl.add_argument("--alpha", type=float, action="append", help="Jump identity order in (0, 1)")
    weyl.add_argument("--nu", type=float, action="append", help="Weyl derivative order")
    weyl.add_argument("--h", type=float, help="Sampling step")
    return parser


def _symbol_overrides(args, run_config: Dict) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    if args.n is not None or args.m is not None:
        current = run_config.get("symbol") or {}
        overrides["symbol"] = {"n": args.n or current.get("n", 3)}
        if args.m is not None:
            overrides["symbol"]["m"] = args.m
    if args.grid_N is not None:
        n = args.n or (run_config.get("symbol") or {}).get("n", 3)
        L = args.grid_L if args.grid_L is not None else args.grid_N * math.pi / 16
        overrides["grid"] = {"n": n, "N": args.grid_N, "L": L}
    overrides["potential"] = args.potential
    return overrides


def build_overrides(args, run_config: Dict) -> Dict[str, Any]:
    """Flag values layered over the config file; unset flags are None and skipped"""
    overrides: Dict[str, Any] = {"output_dir": args.output_dir, "seed": args.seed, "threads": args.threads}
    if args.command == "region":
        overrides["region"] = {
            "case": (int(args.case) if args.case and args.case.isdigit() else args.case),
            "n": args.n, "m": args.m, "alpha": args.alpha, "p": args.p, "p0": args.p0,
            "gaussian_bounds": args.gaussian_bounds, "extended_case4": args.extended_case4,
            "query": args.query,
        }
    elif args.command == "verify":
        overrides["verify"] = {"filter": args.filter}
        if args.symbol:
            try:
                overrides["symbol"] = json.loads(args.symbol)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--symbol is not valid JSON: {exc}") from exc
    elif args.command == "sweep":
        overrides.update(_symbol_overrides(args, run_config))
        overrides["sweep"] = {
            "kind": args.kind, "p": args.p, "q": args.q, "alpha": args.alpha, "decades": args.decades,
            "points": args.points, "width": args.width, "eps": args.eps,
        }
    elif args.command == "perturb":
        overrides.update(_symbol_overrides(args, run_config))
        overrides["perturb"] = {"z": args.z, "lam": args.lam, "eps": args.eps}
    elif args.command == "weyl":
        overrides["weyl"] = {"alpha_list": args.alpha, "nu_list": args.nu, "h": args.h}
    return overrides


# ==================== REPORTING ====================

def print_result(command: str, result: Dict[str, Any]):
    if command == "region":
        print(f"📐 {result['case']}: {len(result['vertices'])} vertices")
        for vertex in result["vertices"]:
            print(f"   {vertex}")
        for label, point in result["landmarks"].items():
            print(f"   {label} = {point}")
        if "query" in result:
            query = result["query"]
            if query["inside"]:
                print(f"🎯 {query['point']} inside")
            else:
                print(f"🎯 {query['point']} outside: {', '.join(query['violated'])}")
    elif command == "verify":
        counts = result["counts"]
        mark = "✅" if result["verdict"] == "PASS" else "❌"
        print(f"{mark} {result['verdict']}  (pass {counts.get('PASS', 0)}, fail {counts.get('FAIL', 0)}, "
              f"skip {counts.get('SKIP', 0)})")
        for failure in result["failures"]:
            print(f"   ❌ {failure}")
    elif command == "sweep":
        report = result["report"]
        mark = "✅" if result["verdict"] == "PASS" else "⚠️"
        if "slope" in report:
            print(f"{mark} slope {report['slope']:.4f} (predicted {report.get('predicted')}), "
                  f"r2 {report['r2']:.4f}, {result['verdict']}")
        else:
            print(f"{mark} {result['verdict']}: {json.dumps(report, default=str)[:300]}")
    else:
        print(json.dumps({k: v for k, v in result.items() if k != "files"}, indent=2, default=str)[:2000])
    for label, path in (result.get("files") or {}).items():
        print(f"💾 {label}: {path}")


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.INFO if args.verbose else getattr(logging, str(config.LOG_LEVEL).upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if not args.quiet:
        print_banner()
        print(f"📅 Started: {datetime.now(timezone.utc).isoformat()}")
        print(f"🔄 Command: {args.command}")

    try:
        run_config = load_run_config(args.config)
        run_config = apply_overrides(run_config, build_overrides(args, run_config))
        lab = SpectralLab(run_config, verbose=args.verbose)
    except SpectralabError as exc:
        print(f"❌ {exc.kind}: {exc}", file=sys.stderr)
        return exit_code_for(exc.kind)

    result = lab.process_task(args.command)
    if "error" in result:
        print(f"❌ {result['kind']}: {result['error']}", file=sys.stderr)
        return exit_code_for(result["kind"])

    print_result(args.command, result)
    if args.command == "verify" and result["verdict"] == "FAIL":
        return EXIT_VERIFY_FAIL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
