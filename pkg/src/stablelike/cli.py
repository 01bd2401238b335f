"""Command-line front end.

Subcommands:
  classify  SYMBOL_FILE   -> verdict JSON; exit 0 definitive, 2 inconclusive
  drift     SYMBOL_FILE   -> scaled drift profile CSV + JSON summary
  simulate  SYMBOL_FILE   -> ensemble CSV, diagnostics JSON, run manifest
  check                   -> run the self-check suites, print a table

All randomness enters through --seed; when absent a seed is drawn and
recorded in the manifest.  Output JSON carries no timestamps (manifests
do), so repeated runs with identical inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import secrets
import sys

from . import __version__
from .coeffs import (ParseError, EvalDomainError, ValidationGrid,
                     load_symbol_file, validate_triple)
from .classifier import ClassifierConfig, GridSpec, classify, classify_f_ergodic
from .generator import (QuadratureConfig, QuadratureError, drift_profile,
                        profile_to_csv, profile_to_json_dict,
                        test_function_for_mode)
from .simulate import (SimConfig, simulate_ensemble, diagnostics,
                       diagnostics_to_json_dict, ensemble_to_csv, RNG_NAME)
from . import checks


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _manifest(command: str, args: argparse.Namespace, inputs: list[str],
              outputs: list[str], seed: int | None) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {
        "command": command,
        "config": cfg,
        "input_hashes": {p: _sha256(p) for p in inputs if p and os.path.exists(p)},
        "seed": seed,
        "rng": RNG_NAME,
        "tool_version": __version__,
        "timestamp_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }


def _load_validated(path: str, verbose: bool):
    triple, settings = load_symbol_file(path)
    grid = ValidationGrid(
        xmax=settings.get("grid.xmax", 1e4),
        points=settings.get("grid.points", 20001),
    )
    report = validate_triple(triple, grid)
    if verbose:
        for w in report.warnings:
            print(f"warning: {w}", file=sys.stderr)
    if not report.passed:
        for f in report.failures:
            print(f"validation failure: {f}", file=sys.stderr)
        raise SystemExit(1)
    return triple, settings


def _grid_from_args(args) -> GridSpec:
    return GridSpec(x0=args.grid_x0, ratio=args.grid_ratio,
                    count=args.grid_count, two_sided=not args.one_sided)


def cmd_classify(args: argparse.Namespace) -> int:
    try:
        triple, _ = _load_validated(args.symbol_file, args.verbose)
    except (ParseError, EvalDomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = ClassifierConfig(grid=_grid_from_args(args), margin_tol=args.margin_tol)
    try:
        if args.eta is not None:
            verdict = classify_f_ergodic(triple, args.eta, cfg)
        else:
            verdict = classify(triple, cfg)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = verdict.to_json_dict()
    outputs = []
    if args.json:
        _write_json(args.json, payload)
        outputs.append(args.json)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    if args.manifest:
        _write_json(args.manifest, _manifest("classify", args, [args.symbol_file],
                                             outputs, None))
    if args.verbose:
        print(f"label: {verdict.label} (margin {verdict.margin:.6g})", file=sys.stderr)
    return 0 if verdict.label != "Inconclusive" else 2


def cmd_drift(args: argparse.Namespace) -> int:
    try:
        triple, _ = _load_validated(args.symbol_file, args.verbose)
        V = test_function_for_mode(args.mode, args.theta)
    except (ParseError, EvalDomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    grid = _grid_from_args(args)
    q = QuadratureConfig(abs_tol=args.abs_tol)
    try:
        profile = drift_profile(triple, V, args.mode, grid.points(), q,
                                scaled_tol=args.scaled_tol, threads=args.threads)
    except (ValueError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outputs = []
    if args.csv:
        profile_to_csv(profile, args.csv)
        outputs.append(args.csv)
    summary = profile_to_json_dict(profile)
    if args.json:
        _write_json(args.json, summary)
        outputs.append(args.json)
    else:
        json.dump({k: summary[k] for k in ("mode", "theta", "partial",
                                           "tail_max_abs_residual")},
                  sys.stdout, indent=2, sort_keys=True)
        print()
    if args.manifest:
        _write_json(args.manifest, _manifest("drift", args, [args.symbol_file],
                                             outputs, None))
    return 1 if profile.partial else 0


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        triple, _ = _load_validated(args.symbol_file, args.verbose)
    except (ParseError, EvalDomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    cfg = SimConfig(m=args.m, horizon=args.horizon, n_paths=args.paths,
                    seed=seed, x0=args.x0, compact_radius=args.radius,
                    record_stride=args.stride, max_records=args.max_records)
    try:
        ensemble = simulate_ensemble(triple, cfg)
    except ResourceWarning as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    diag = diagnostics(ensemble)
    payload = diagnostics_to_json_dict(diag)
    payload["config"] = {
        "m": cfg.m, "horizon": cfg.horizon, "n_paths": cfg.n_paths,
        "seed": cfg.seed, "x0": cfg.x0, "compact_radius": cfg.compact_radius,
        "record_stride": cfg.record_stride,
    }
    payload["rng"] = {"name": ensemble.rng_name,
                      "stream_ids": ensemble.rng_stream_ids[:8] + (
                          ["..."] if len(ensemble.rng_stream_ids) > 8 else [])}
    outputs = []
    if args.csv:
        ensemble_to_csv(ensemble, args.csv)
        outputs.append(args.csv)
    if args.json:
        _write_json(args.json, payload)
        outputs.append(args.json)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    manifest_path = args.manifest or (args.json + ".manifest.json" if args.json else None)
    if manifest_path:
        _write_json(manifest_path, _manifest("simulate", args, [args.symbol_file],
                                             outputs, seed))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    if args.suite == "all":
        rows = checks.all_suites()
    else:
        rows = [dict(r, suite=args.suite) for r in checks.SUITES[args.suite]()]
    width = max(len(r["id"]) for r in rows) + 2
    all_pass = True
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        all_pass &= r["passed"]
        print(f"{status}  {r['id']:<{width}} observed={r['observed']:.3e} "
              f"bound={r['bound']:.3e}  {r['description']}")
        if not r["passed"]:
            extra = {k: v for k, v in r.items()
                     if k not in ("id", "description", "observed", "bound",
                                  "passed", "suite")}
            if extra:
                print(f"      inputs: {extra}")
    if args.json:
        _write_json(args.json, {"rows": rows, "all_passed": all_pass})
    print(f"{'all checks passed' if all_pass else 'CHECK FAILURES PRESENT'}")
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stablelike",
                                description="Long-time behavior toolkit for "
                                            "one-dimensional stable-like symbols")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", help="write the JSON report here")
        sp.add_argument("--manifest", help="write a run manifest here")
        sp.add_argument("--verbose", action="store_true")

    def grid_flags(sp):
        sp.add_argument("--grid-x0", type=float, default=10.0)
        sp.add_argument("--grid-ratio", type=float, default=2.0)
        sp.add_argument("--grid-count", type=int, default=12)
        sp.add_argument("--one-sided", action="store_true",
                        help="evaluate the escape grid on x > 0 only")

    sp = sub.add_parser("classify", help="decide the long-time behavior")
    sp.add_argument("symbol_file")
    grid_flags(sp)
    sp.add_argument("--margin-tol", type=float, default=1e-3)
    sp.add_argument("--eta", type=float, default=None,
                    help="run the |x|^eta weighted-ergodicity check instead")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("drift", help="scaled drift profile along an escape grid")
    sp.add_argument("symbol_file")
    sp.add_argument("--mode", choices=("recurrent", "transient", "ergodic"),
                    required=True)
    sp.add_argument("--theta", type=float, default=None)
    grid_flags(sp)
    sp.add_argument("--csv", help="write the profile CSV here")
    sp.add_argument("--abs-tol", type=float, default=1e-9)
    sp.add_argument("--scaled-tol", type=float, default=1e-3)
    sp.add_argument("--threads", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_drift)

    sp = sub.add_parser("simulate", help="chain ensemble and diagnostics")
    sp.add_argument("symbol_file")
    sp.add_argument("--m", type=int, default=100, help="time refinement (1/m step)")
    sp.add_argument("--horizon", "-T", type=float, default=1000.0)
    sp.add_argument("--paths", type=int, default=400)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--radius", "-K", type=float, default=10.0,
                    help="compact-set radius probed by the diagnostics")
    sp.add_argument("--stride", type=int, default=100)
    sp.add_argument("--max-records", type=int, default=2_000_000)
    sp.add_argument("--csv", help="write the thinned ensemble CSV here")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("check", help="run the self-check suites")
    sp.add_argument("--suite", choices=("specfun", "generator", "all"),
                    default="all")
    common(sp)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
