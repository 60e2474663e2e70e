"""Command-line front end.

Exit codes: 0 success (warnings allowed), 1 I/O failure, 2 invalid scenario
or gains, 3 divergence or actuator-budget overrun during integration.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import yaml

from .control import ConstraintViolation, SaturationBudgetError
from .integrate import DivergenceError
from .model import ParameterError
from .reference import AssumptionViolation, generate_reference
from .report import build_report
from .scenario_io import ScenarioFileError, bundled_scenarios, load_scenario
from .sim import (
    MODES,
    ConvergenceThresholds,
    prepare,
    read_csv,
    reference_table,
    run,
    sample_initial_conditions,
    sweep,
    write_table,
)

OUT_ENV = "VESSELTRACK_OUT"
EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2, 3

# Rows kept in a run CSV unless --every is given.
DEFAULT_MAX_ROWS = 60_000

# Scenario field -> command-line flag, for error messages.
FLAG_FOR_FIELD = {
    "harness_lambda": "--lambda",
    "harness_F0": "--F0",
    "diff_gain": "--diff-gain",
    "step": "--step",
    "horizon": "--horizon",
    "mode": "--mode",
}

log = logging.getLogger("vesseltrack")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _flagged(exc: Exception, given: set[str]) -> str:
    msg = str(exc)
    for fld, flag in FLAG_FOR_FIELD.items():
        if msg.startswith(fld) and fld in given:
            return f"{flag}: {msg}"
    return msg


def _out_dir(arg) -> Path:
    out = Path(arg or os.environ.get(OUT_ENV) or "out")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc.strerror}", EXIT_IO) from None
    if not os.access(out, os.W_OK):
        raise CliError(f"output directory {out} is not writable", EXIT_IO)
    return out


def _load(name):
    try:
        return load_scenario(name)
    except FileNotFoundError as exc:
        raise CliError(str(exc), EXIT_IO) from None
    except (ScenarioFileError, ParameterError, ValueError) as exc:
        raise CliError(str(exc), EXIT_INVALID) from None


def _render_checks(checks) -> str:
    lines = []
    for c in checks:
        status = "PASS" if c.passed else ("WARNING" if c.severity == "warning" else "FAIL")
        lines.append(f"  {status:<8} {c.name:<40} {c.lhs: .6g} vs {c.rhs: .6g}")
    return "\n".join(lines)


# --- commands ---------------------------------------------------------------


def cmd_list(args) -> int:
    for name in bundled_scenarios():
        print(name)
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = _load(args.scenario)
    try:
        report = build_report(scenario)
    except ConstraintViolation as exc:
        if args.json:
            print(json.dumps({"error": str(exc), "constraints": [c._asdict() for c in exc.checks]}, indent=2))
        else:
            print(f"scenario: {scenario.name}\n\nconstraints\n{_render_checks(exc.checks)}")
            print(f"\nhard failure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ParameterError, AssumptionViolation) as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    print(report.to_json() if args.json else report.render())
    return EXIT_INVALID if report.hard_failures else EXIT_OK


def _run_overrides(args) -> dict:
    changes = {}
    for attr, fld in (
        ("mode", "mode"),
        ("step", "step"),
        ("horizon", "horizon"),
        ("seed", "seed"),
        ("F0", "harness_F0"),
        ("lam", "harness_lambda"),
        ("diff_gain", "diff_gain"),
        ("control_hold", "control_hold"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            changes[fld] = value
    return changes


def cmd_run(args) -> int:
    base = _load(args.scenario)
    changes = _run_overrides(args)
    try:
        scenario = base.with_overrides(**changes)
        setup = prepare(scenario)
    except ConstraintViolation as exc:
        print(f"constraints\n{_render_checks(exc.checks)}", file=sys.stderr)
        raise CliError(f"hard failure: {exc}", EXIT_INVALID) from None
    except (ParameterError, AssumptionViolation) as exc:
        raise CliError(_flagged(exc, set(changes)), EXIT_INVALID) from None
    out = _out_dir(args.out)
    try:
        record = run(scenario, setup)
    except (DivergenceError, SaturationBudgetError) as exc:
        raise CliError(f"run aborted: {exc}", EXIT_RUNTIME) from None

    every = args.every or max(1, scenario.n_steps // DEFAULT_MAX_ROWS)
    csv_path = out / f"{scenario.name}.csv"
    try:
        record.to_csv(csv_path, every=every)
        figures = []
        if args.plots:
            from .plots import plot_run

            data = read_csv(csv_path)
            figures = plot_run(data, out, setup.sp.d)
    except OSError as exc:
        raise CliError(f"cannot write artifacts to {out}: {exc}", EXIT_IO) from None

    te = record.terminal_errors()
    print(f"wrote {csv_path} ({len(record) // every + (len(record) % every > 0)} rows, every {every} steps)")
    for f in figures:
        print(f"wrote {f}")
    for ev in record.events:
        if ev.kind == "constraint-warning":
            continue  # already logged by prepare()
        print(f"event s={ev.s:.6g} {ev.kind}: {ev.message}")
    print(
        "terminal errors: "
        + ", ".join(f"{k} {v:.3e}" for k, v in te.items())
        + f"; integral of |f| {record.error_integral:.6g}"
    )
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plots import plot_run

    try:
        data = read_csv(args.csv)
    except OSError as exc:
        raise CliError(f"cannot read {args.csv}: {exc}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    if len(data["s"]) < 2:
        raise CliError("run table needs at least two rows", EXIT_INVALID)
    d = float(data["s"][1] / data["t"][1])
    for f in plot_run(data, _out_dir(args.out), d):
        print(f"wrote {f}")
    return EXIT_OK


def cmd_reference(args) -> int:
    scenario = _load(args.scenario)
    try:
        setup = prepare(scenario)
    except (ConstraintViolation, ParameterError, AssumptionViolation) as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    horizon = args.horizon or scenario.horizon
    step = args.step or scenario.step
    traj = generate_reference(
        scenario.reference, setup.ref0, setup.sp, horizon, step, (setup.gains.tau1_max, setup.gains.tau2_max)
    )
    path = _out_dir(args.out) / f"{scenario.name}-reference.csv"
    write_table(reference_table(traj, setup.sp.d), path, args.every or 1)
    print(f"wrote {path}")
    return EXIT_OK


def load_grid(path, base, setup) -> tuple[list[dict], ConvergenceThresholds]:
    """Expand a grid file into a list of Scenario overrides.

    Recognised sections (any combination, concatenated in this order):
    ``runs`` (explicit list of overrides), ``ic_box`` ({n, half_width,
    seed}) and ``harness`` ({F0: [...], lambda: [...]}, full product).
    Top-level ``horizon``/``step`` apply to every entry; ``thresholds``
    sets the convergence test.
    """
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read grid {path}: {exc.strerror}", EXIT_IO) from None
    except yaml.YAMLError as exc:
        raise CliError(f"{path}: parse error: {exc}", EXIT_INVALID) from None
    known = {"runs", "ic_box", "harness", "horizon", "step", "thresholds"}
    if not isinstance(doc, dict) or not doc:
        raise CliError(f"{path}: grid must be a non-empty mapping", EXIT_INVALID)
    unknown = set(doc) - known
    if unknown:
        raise CliError(f"{path}: unknown grid key(s): {', '.join(sorted(unknown))}", EXIT_INVALID)
    grid: list[dict] = [dict(r) for r in doc.get("runs") or []]
    box = doc.get("ic_box")
    if box:
        ics = sample_initial_conditions(
            int(box["n"]), int(box.get("seed", base.seed)), setup, float(box.get("half_width", 200.0))
        )
        grid += [
            {"vessel_init": ic, "ref_init": tuple(setup.ref0), "initial_units": "normalized"} for ic in ics
        ]
    harness = doc.get("harness")
    if harness:
        grid += [
            {"mode": "output-harness", "harness_F0": float(f0), "harness_lambda": float(lam)}
            for f0 in harness["F0"]
            for lam in harness["lambda"]
        ]
    common = {k: float(doc[k]) for k in ("horizon", "step") if k in doc}
    grid = [{**common, **g} for g in grid]
    th = ConvergenceThresholds(**{k: float(v) for k, v in (doc.get("thresholds") or {}).items()})
    return grid, th


def cmd_sweep(args) -> int:
    base = _load(args.scenario)
    try:
        setup = prepare(base)
    except (ConstraintViolation, ParameterError, AssumptionViolation) as exc:
        raise CliError(f"base scenario invalid: {exc}", EXIT_INVALID) from None
    grid, thresholds = load_grid(args.grid, base, setup)
    if not grid:
        raise CliError(f"{args.grid}: grid is empty", EXIT_INVALID)
    out = _out_dir(args.out)
    every = args.every or max(1, base.n_steps // DEFAULT_MAX_ROWS)
    result = sweep(base, grid, thresholds=thresholds, max_workers=args.workers, csv_dir=out, every=every)
    summary = result.to_csv(out / "summary.csv")
    for row in result.rows:
        extra = f"  ({row.detail})" if row.detail else ""
        print(f"run {row.run_id:3d}  {row.status:<14} |e| {row.terminal_error_norm:.3e}  exit s {row.sat_exit_time:.4g}{extra}")
    print(f"wrote {summary}")
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vesseltrack", description="Saturated tracking control for a surface vessel.")
    p.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list", help="list bundled scenarios")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("validate", help="derive constants and check gain constraints")
    s.add_argument("scenario", help="scenario file or bundled scenario name")
    s.add_argument("--json", action="store_true", help="machine-readable report")
    s.set_defaults(func=cmd_validate)

    out_help = f"output directory (default ${OUT_ENV} or ./out)"
    s = sub.add_parser("run", help="simulate one scenario")
    s.add_argument("scenario")
    s.add_argument("--out", help=out_help)
    s.add_argument("--csv", action="store_true", help="write the run table (always written)")
    s.add_argument("--plots", action="store_true", help="also write the six SVG figures")
    s.add_argument("--mode", choices=MODES)
    s.add_argument("--step", type=float)
    s.add_argument("--horizon", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--F0", type=float, help="harness error amplitude")
    s.add_argument("--lambda", dest="lam", type=float, help="harness decay rate (> 0)")
    s.add_argument("--diff-gain", type=float, help="differentiator gain L")
    s.add_argument("--control-hold", choices=("continuous", "zoh"))
    s.add_argument("--every", type=int, help="keep every N-th sample in the CSV")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("plot", help="draw the six figures from a run CSV")
    s.add_argument("csv")
    s.add_argument("--out", help=out_help)
    s.set_defaults(func=cmd_plot)

    s = sub.add_parser("reference", help="export the reference trajectory as a run-table CSV")
    s.add_argument("scenario")
    s.add_argument("--out", help=out_help)
    s.add_argument("--step", type=float)
    s.add_argument("--horizon", type=float)
    s.add_argument("--every", type=int)
    s.set_defaults(func=cmd_reference)

    s = sub.add_parser("sweep", help="run a scenario over a grid of overrides")
    s.add_argument("scenario")
    s.add_argument("--grid", required=True, help="YAML grid file")
    s.add_argument("--out", help=out_help)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--every", type=int)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
