"""Command-line front end.

    postsel weak-values --scenario three-box-intro
    postsel sweep --scenario three-box-intro --mode loss --paths 1,2 --grid 0:1:0.1
    postsel design --targets 1,-1,1 --out designed.json
    postsel check oracle

Reports are JSON on stdout. ``--out`` writes the CSV table (sweep) or the
scenario file (design). Exit status is 0 only when every computation
succeeded and every check held.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import shlex
import sys
from decimal import Decimal
from pathlib import Path

import numpy as np

from . import __version__
from .checks import SUITES, run_suite
from .counting import DEFAULT_TRIALS, RunConfig, apply_visibility, sweep_loss, sweep_pointer_counts
from .errors import PostselError
from .pointer import extrapolate_weak_value, sweep_strength
from .prepost import basis_projectors, marginal_projectors, sum_rule_residual, weak_value
from .scenario_file import dumps_scenario, encode_complex, loss_csv, pointer_csv, resolve_scenario
from .scenarios import design_scenario

SEED_ENV = "POSTSEL_SEED"
DESIGN_TOL = 1e-9


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (Decimal(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise UsageError(f"bad grid {text!r}")
            n = int((stop - start) / step)
            return [float(start + i * step) for i in range(n + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None


def parse_targets(text: str) -> list[complex]:
    try:
        return [complex(x.strip().replace(" ", "")) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad targets {text!r}: {exc}") from None


def _seed(args) -> tuple[int, bool]:
    """Seed from --seed, else $POSTSEL_SEED, else a fresh one (echoed)."""
    if args.seed is not None:
        return args.seed, False
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env), True
    return secrets.randbelow(2**63), True


def _report(argv, config, outputs, seed=None) -> dict:
    rep = {
        "command": "postsel " + shlex.join(argv),
        "config": config,
        "outputs": outputs,
        "version": __version__,
    }
    if seed is not None:
        rep["seed"] = seed
    return rep


def _wv(z) -> dict:
    # + 0.0 turns -0.0 into 0.0
    return {"re": float(z.real) + 0.0, "im": float(z.imag) + 0.0}


# --- commands ---------------------------------------------------------------


def cmd_weak_values(args, argv):
    spec = resolve_scenario(args.scenario)
    pp = spec.prepost
    space = pp.space
    groups = []
    if args.joint or len(space.subsystems) == 1:
        projs = basis_projectors(space)
        groups.append([(space.label_str(l), p) for l, p in zip(space.labels, projs)])
    else:
        for name in space.names:
            groups.append(list(marginal_projectors(space, name).items()))
    values = []
    residual = 0.0
    for group in groups:
        for label, p in group:
            values.append({"projector": label, **_wv(weak_value(p, pp))})
        residual = max(residual, sum_rule_residual([p for _, p in group], pp))
    outputs = {
        "weak_values": values,
        "sum_rule_residual": residual,
        "postselection_probability": pp.probability,
        "overlap_abs": abs(pp.overlap),
    }
    config = {"scenario": spec.name, "joint": bool(args.joint)}
    return _report(argv, config, outputs), 0


def cmd_sweep(args, argv):
    spec = resolve_scenario(args.scenario)
    if args.visibility is not None:
        spec = apply_visibility(spec, args.visibility)
    grid = parse_grid(args.grid)
    if not grid:
        raise UsageError("empty grid")

    if args.mode == "loss":
        paths = [p.strip() for p in (args.paths or "").split(",") if p.strip()]
        if not paths:
            raise UsageError("--mode loss needs --paths")
        for p in paths:
            try:
                spec.space.index(p)
            except PostselError:
                raise UsageError(f"unknown path {p!r}") from None
        if any(not 0.0 <= t <= 1.0 for t in grid):
            raise UsageError("transmission grid values must lie in [0, 1]")
        seed, echoed = _seed(args)
        cfg = RunConfig(trials=args.trials or DEFAULT_TRIALS, seed=seed)
        series = sweep_loss(spec, paths, grid, cfg)
        table = loss_csv(series, loss_column=args.loss_column)
        outputs = {
            "rows": [
                {"T": t, "analytic_p": p, "counts": c}
                for t, p, c in zip(series.values, series.analytic, series.counts)
            ],
        }
        config = {"scenario": spec.name, "mode": "loss", "paths": paths, "grid": grid,
                  "trials": cfg.trials, "visibility": spec.visibility}
        argv = list(argv) + (["--seed", str(seed)] if echoed else [])
    else:
        path = args.path or (args.paths.split(",")[0].strip() if args.paths else None)
        if path is None:
            raise UsageError("--mode pointer needs --path")
        try:
            spec.space.index(path)
        except PostselError:
            raise UsageError(f"unknown path {path!r}") from None
        if any(not 0.0 < g <= 1.0 for g in grid):
            raise UsageError("strength grid values must lie in (0, 1]")
        seed = None
        if args.trials:
            seed, echoed = _seed(args)
            cfg = RunConfig(trials=args.trials, seed=seed)
            samples = sweep_pointer_counts(spec, path, grid, cfg)
            argv = list(argv) + (["--seed", str(seed)] if echoed else [])
        else:
            samples = sweep_strength(spec.prepost, path, grid, spec.visibility)
        est = extrapolate_weak_value(samples, model=args.fit)
        table = pointer_csv(samples)
        outputs = {
            "samples": [{"G": s.G, "P_plus": s.P_plus, "R": s.R} for s in samples],
            "intercept": est.intercept,
            "slope": est.slope,
            "fit_residual": est.residual,
            "fit_model": est.model,
        }
        config = {"scenario": spec.name, "mode": "pointer", "path": path, "grid": grid,
                  "trials": args.trials, "visibility": spec.visibility}

    if args.out:
        Path(args.out).write_text(table)
    if args.format == "csv":
        return table, 0
    return _report(argv, config, outputs, seed), 0


def cmd_design(args, argv):
    targets = parse_targets(args.targets)
    spec = design_scenario(targets, name=args.name)
    pp = spec.prepost
    got = [weak_value(p, pp) for p in basis_projectors(pp.space)]
    dev = max(abs(g - t) for g, t in zip(got, targets))
    if args.out:
        Path(args.out).write_text(dumps_scenario(spec))
    outputs = {
        "targets": [encode_complex(t) for t in targets],
        "weak_values": [_wv(g) for g in got],
        "max_deviation": dev,
        "postselection_probability": pp.probability,
        "pre": [encode_complex(a) for a in pp.pre.amps],
        "post": [encode_complex(a) for a in pp.post.amps],
    }
    return _report(argv, {"targets": args.targets, "out": args.out}, outputs), 0 if dev <= DESIGN_TOL else 1


def cmd_check(args, argv):
    suites = SUITES if args.suite == "all" else (args.suite,)
    phis = tuple(parse_grid(args.phi)) if args.phi else (0.01, 0.05, 0.1)
    seed, echoed = _seed(args)
    checks = []
    for suite in suites:
        for c in run_suite(suite, seed=seed, phis=phis):
            checks.append({"suite": suite, "check": c.name, "max_deviation": c.deviation,
                           "tolerance": c.tolerance, "passed": c.passed})
    failed = [c["check"] for c in checks if not c["passed"]]
    argv = list(argv) + (["--seed", str(seed)] if echoed else [])
    outputs = {"checks": checks, "failed": failed, "passed": not failed}
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"{status} [{c['suite']}] {c['check']}: {c['max_deviation']:.3e} (tol {c['tolerance']:.1e})", file=sys.stderr)
    return _report(argv, {"suites": list(suites), "phi": list(phis)}, outputs, seed), 1 if failed else 0


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="postsel", description="Weak values, losses, and negation under pre/postselection.")
    parser.add_argument("--version", action="version", version=f"postsel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weak-values", help="projector weak values of a scenario")
    p.add_argument("--scenario", required=True, help="built-in name or scenario JSON file")
    p.add_argument("--joint", action="store_true", help="joint basis projectors for composite spaces")
    p.set_defaults(func=cmd_weak_values)

    p = sub.add_parser("sweep", help="loss or pointer sweep")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=("loss", "pointer"), required=True)
    p.add_argument("--paths", help="comma-separated lossy paths (loss mode)")
    p.add_argument("--path", help="marked path (pointer mode)")
    p.add_argument("--grid", required=True, help="start:stop:step or comma list")
    p.add_argument("--trials", type=int, help=f"photon pairs per setting (loss default {DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int)
    p.add_argument("--visibility", type=float, help="damp interference cross-terms")
    p.add_argument("--fit", choices=("pointer", "linear"), default="pointer")
    p.add_argument("--loss-column", action="store_true", help="add loss = 1 - T to the CSV")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the CSV table here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("design", help="pre/post states for target weak values")
    p.add_argument("--targets", required=True, help="comma-separated, e.g. 1,-1,1 or 0.5+0.5j,0.5-0.5j")
    p.add_argument("--name", default="designed")
    p.add_argument("--out", help="write the scenario JSON here")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--phi", help="angles for the appendix suite (comma list or start:stop:step)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args, argv)
    except UsageError as exc:
        parser.error(str(exc))
    except PostselError as exc:
        print(f"postsel: {type(exc).__name__}: {exc}", file=sys.stderr)
        overlap = getattr(exc, "overlap", None)
        if overlap is not None:
            print(f"postsel: |<f|i>| diagnostic = {overlap:.3e}", file=sys.stderr)
        return 1
    if isinstance(report, str):
        sys.stdout.write(report)
    else:
        sys.stdout.write(json.dumps(report, indent=2, default=_json_default) + "\n")
    return code


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return encode_complex(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


if __name__ == "__main__":
    sys.exit(main())
