"""Closed-loop simulation of the vessel tracking its virtual reference."""
from __future__ import annotations

import csv
import logging
import math
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import diagnostics as dg
from .control import (
    C1Report,
    ConstraintCheck,
    ConstraintViolation,
    ConstraintWarning,
    ControllerGains,
    SaturationBudgetError,
    assemble_inputs,
    check_c1,
    error_transform,
    output_feedback,
    speed_limsup,
    state_feedback,
    synthesize_gains,
    yaw_rate_limsup,
)
from .integrate import DivergenceError, rk4_step
from .model import (
    MONOHULL,
    BETA_RULES,
    ControlInput,
    ParameterError,
    PhysicalParams,
    PrimitiveConstants,
    ScaledParams,
    VesselState,
    derive_primitive_constants,
    normalize_state,
    scale_params,
)
from .observer import HighGainDifferentiator, SyntheticErrorHarness, estimate_from_pose_derivatives
from .reference import AssumptionViolation, ReferenceInput, ReferenceTrajectory

log = logging.getLogger(__name__)

MODES = ("state", "output-diff", "output-harness")
CONTROL_HOLDS = ("continuous", "zoh")
DIVERGENCE_LIMIT = 1e9

CSV_COLUMNS = (
    "s", "t",
    "x", "y", "psi", "u", "v", "r",
    "x_re", "y_re", "psi_re", "u_re", "v_re", "r_re",
    "e_x", "e_y", "e_u", "e_v", "e_psi", "e_r",
    "tau1", "tau2", "w1", "w2",
    "V", "Vuv", "G", "z", "W1", "W2", "Wt1", "Wt2",
    "f_u", "f_v", "f_r",
)  # fmt: skip

_EXPR = re.compile(r"^\s*(?:(?P<k1>[-+.\deE]+)\s*\*\s*)?a1\s*(?:(?P<op>[*/])\s*(?P<k2>[-+.\deE]+))?\s*$")


def resolve_gain(value, a1: float) -> float:
    """A number, or an expression in ``a1`` such as ``"a1/4"`` or ``"0.5*a1"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _EXPR.match(value)
        if m:
            out = a1 * float(m["k1"] or 1.0)
            if m["op"] == "*":
                out *= float(m["k2"])
            elif m["op"] == "/":
                out /= float(m["k2"])
            return out
        try:
            return float(value)
        except ValueError:
            pass
    raise ParameterError(f"cannot interpret gain value {value!r}")


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one closed-loop run.

    Initial states are given in ``initial_units`` ("physical": m, rad, m/s,
    rad/s; "normalized": the control model's units).  Reference inputs are
    always normalized.  Gains may be numbers or expressions in ``a1``.
    """

    name: str = "custom"
    params: PhysicalParams = MONOHULL
    rho: float | str = "a1/4"
    gains: dict = field(default_factory=dict)
    reference: ReferenceInput = ReferenceInput(10.0, 0.05)
    vessel_init: tuple = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    ref_init: tuple = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    initial_units: str = "physical"
    horizon: float = 600.0
    step: float = 1e-3
    mode: str = "state"
    harness_F0: float = 0.0
    harness_lambda: float = 1.0
    harness_shape: tuple = (1.0, 1.0, 1.0)
    diff_gain: float = 50.0
    control_hold: str = "continuous"
    beta_rule: str = "exact"
    kappa_override: float | None = None
    strict_gains: bool = False
    seed: int = 0

    def __post_init__(self):
        if not (self.step > 0):
            raise ParameterError(f"step must be > 0, got {self.step!r}")
        if not (self.horizon >= self.step):
            raise ParameterError(f"horizon must be >= step, got {self.horizon!r}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.control_hold not in CONTROL_HOLDS:
            raise ParameterError(f"control_hold must be one of {CONTROL_HOLDS}, got {self.control_hold!r}")
        if self.beta_rule not in BETA_RULES:
            raise ParameterError(f"beta_rule must be one of {BETA_RULES}, got {self.beta_rule!r}")
        if self.initial_units not in ("physical", "normalized"):
            raise ParameterError(f"initial_units must be 'physical' or 'normalized', got {self.initial_units!r}")
        if len(self.vessel_init) != 6 or len(self.ref_init) != 6:
            raise ParameterError("initial states need six components (x, y, psi, u, v, r)")
        if self.mode == "output-harness":
            if not (self.harness_lambda > 0):
                raise ParameterError(f"harness_lambda must be > 0, got {self.harness_lambda!r}")
            if not (self.harness_F0 >= 0):
                raise ParameterError(f"harness_F0 must be >= 0, got {self.harness_F0!r}")
        if self.mode == "output-diff" and not (self.diff_gain > 0):
            raise ParameterError(f"diff_gain must be > 0, got {self.diff_gain!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.step))

    def with_overrides(self, **changes) -> "Scenario":
        """``replace`` that merges a ``gains`` dict instead of overwriting it."""
        if "gains" in changes:
            changes["gains"] = {**self.gains, **changes["gains"]}
        return replace(self, **changes)


class Setup(NamedTuple):
    constants: PrimitiveConstants
    sp: ScaledParams
    gains: ControllerGains
    checks: tuple[ConstraintCheck, ...]
    c1: C1Report
    vessel0: VesselState
    ref0: VesselState
    warnings: tuple[str, ...]


def prepare(scenario: Scenario) -> Setup:
    """Derive constants, gains, ceilings and normalized initial states."""
    k = derive_primitive_constants(scenario.params)
    a1 = k.a / k.d
    rho = resolve_gain(scenario.rho, a1)
    sp = scale_params(k, rho, beta_rule=scenario.beta_rule, kappa_override=scenario.kappa_override)
    v0 = VesselState(*map(float, scenario.vessel_init))
    r0 = VesselState(*map(float, scenario.ref_init))
    if scenario.initial_units == "physical":
        v0, r0 = normalize_state(v0, sp), normalize_state(r0, sp)
    overrides = {name: resolve_gain(val, a1) for name, val in scenario.gains.items()}
    tau_re = ControlInput(*scenario.reference.peaks())
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConstraintWarning)
        gains, checks = synthesize_gains(
            sp,
            overrides,
            tau_re=tau_re,
            vessel_speed0=math.hypot(v0.u, v0.v),
            ref_speed0=math.hypot(r0.u, r0.v),
            strict=scenario.strict_gains,
        )
    notes = tuple(str(w.message) for w in caught if issubclass(w.category, ConstraintWarning))
    for note in notes:
        log.warning(note)
    scenario.reference.check_bounds(gains.tau1_max, gains.tau2_max)
    return Setup(k, sp, gains, checks, check_c1(gains, sp), v0, r0, notes)


class Event(NamedTuple):
    s: float
    kind: str
    message: str


@dataclass(frozen=True)
class RunRecord:
    scenario: Scenario
    setup: Setup
    data: dict  # column name -> ndarray, in CSV_COLUMNS order
    events: tuple[Event, ...]
    sat_exit_index: int | None
    error_integral: float  # integral of ||f|| (closed form in harness mode)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[name]

    def __len__(self) -> int:
        return len(self.data["s"])

    @property
    def gains(self) -> ControllerGains:
        return self.setup.gains

    @property
    def sp(self) -> ScaledParams:
        return self.setup.sp

    @property
    def step(self) -> float:
        return self.scenario.step

    @property
    def sat_exit_time(self) -> float | None:
        i = self.sat_exit_index
        return None if i is None else float(self.data["s"][i])

    def terminal_errors(self) -> dict[str, float]:
        d = {name: float(self.data[name][-1]) for name in ("e_x", "e_y", "e_u", "e_v", "e_psi", "e_r")}
        return {
            "position": math.hypot(d["e_x"], d["e_y"]),
            "heading": abs(d["e_psi"]),
            "velocity": math.hypot(d["e_u"], d["e_v"]),
            "yaw_rate": abs(d["e_r"]),
            "norm": math.sqrt(sum(v * v for v in d.values())),
        }

    def table(self, every: int = 1) -> np.ndarray:
        return np.column_stack([self.data[c][::every] for c in CSV_COLUMNS])

    def to_csv(self, path, every: int = 1) -> Path:
        return write_table(self.data, path, every)


def read_csv(path) -> dict[str, np.ndarray]:
    """Load a run CSV into a column dict; the header must match CSV_COLUMNS."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header {header[:5]}...")
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: arr[:, i] for i, name in enumerate(CSV_COLUMNS)}


def reference_table(traj: ReferenceTrajectory, d: float) -> dict[str, np.ndarray]:
    """A reference trajectory in the run-table schema.

    The rows describe a vessel sitting exactly on the reference, so error,
    feedback and observation columns are zero and ``tau1``/``tau2`` hold the
    reference inputs.
    """
    n = len(traj)
    zero = np.zeros(n)
    data = {"s": np.asarray(traj.times, dtype=float), "t": np.asarray(traj.times, dtype=float) / d}
    for i, name in enumerate(VesselState._fields):
        data[name] = traj.states[:, i]
        data[name + "_re"] = traj.states[:, i]
    data["tau1"], data["tau2"] = traj.inputs[:, 0], traj.inputs[:, 1]
    data["Vuv"] = 0.5 * (traj.states[:, 3] ** 2 + traj.states[:, 4] ** 2)
    return {c: data.get(c, zero) for c in CSV_COLUMNS}


def write_table(data: dict, path, every: int = 1) -> Path:
    path = Path(path)
    table = np.column_stack([np.asarray(data[c])[::every] for c in CSV_COLUMNS])
    np.savetxt(path, table, delimiter=",", fmt="%.17g", header=",".join(CSV_COLUMNS), comments="")
    return path


def reference_from_table(data: dict, beta: float) -> ReferenceTrajectory:
    """Recover the reference part of a run table.

    Reference inputs are reconstructed from the recorded control split:
    ``tau1_re = tau1 - w1`` and ``tau2_re = tau2 - w2 + beta (u_hat v_hat - u_re v_re)``,
    with the estimates taken as true velocity minus observation error.
    """
    s = np.asarray(data["s"], dtype=float)
    if len(s) < 2:
        raise ValueError("a reference table needs at least two rows")
    states = np.column_stack([data[n + "_re"] for n in VesselState._fields])
    uh = data["u"] - data["f_u"]
    vh = data["v"] - data["f_v"]
    t1 = data["tau1"] - data["w1"]
    t2 = data["tau2"] - data["w2"] + beta * (uh * vh - data["u_re"] * data["v_re"])
    return ReferenceTrajectory(s, states, np.column_stack([t1, t2]), float(s[1] - s[0]))


class _Loop:
    """Control law and stage derivative for one run."""

    def __init__(self, scenario: Scenario, setup: Setup):
        self.sp = setup.sp
        self.gains = setup.gains
        self.beta = setup.sp.beta
        self.ceilings = (setup.gains.tau1_max, setup.gains.tau2_max)
        self.reference = scenario.reference
        self.mode = scenario.mode
        self.continuous = scenario.control_hold == "continuous"
        self.harness = None
        if scenario.mode == "output-harness":
            self.harness = SyntheticErrorHarness(
                scenario.harness_F0, scenario.harness_lambda, tuple(scenario.harness_shape)
            )

    def law(self, ves: VesselState, ref: VesselState, tau_re: ControlInput, est):
        e = error_transform(ves, ref)
        if est is None:
            w1, w2 = state_feedback(e, self.gains)
            uv = (ves.u, ves.v)
        else:
            w1, w2 = output_feedback(e, (est[0] - ref.u, est[1] - ref.v, est[2] - ref.r), self.gains)
            uv = (est[0], est[1])
        tau = assemble_inputs(w1, w2, uv, ref, tau_re, self.beta, self.ceilings)
        return tau, w1, w2, e

    def estimate(self, t: float, ves: VesselState, held):
        if self.mode == "state":
            return None
        if self.harness is not None:
            return self.harness.estimate(t, ves.u, ves.v, ves.r)
        return held

    def rhs(self, t: float, X: Sequence[float], hold):
        # Flat copy of law() + normalized_derivative() for the RK4 stages;
        # must stay operation-for-operation identical (see test_sim).
        tau_re, tau_held, est_held = hold
        x, y, psi, u, v, r, xr, yr, psir, ur, vr, rr = X
        t1re, t2re = tau_re
        sp = self.sp
        rho, crho, a1, b1, beta = sp.rho, sp.c * sp.rho, sp.a1, sp.b1, sp.beta
        if tau_held is not None:
            t1, t2 = tau_held
        else:
            if self.mode == "state":
                uh, vh, rh = u, v, r
            elif self.harness is not None:
                uh, vh, rh = self.harness.estimate(t, u, v, r)[:3]
            else:
                uh, vh, rh = est_held[:3]
            g = self.gains
            c, s = math.cos(psir), math.sin(psir)
            ex = c * (x - xr) + s * (y - yr)
            eu = uh - ur
            q1 = g.xi * eu / g.U1
            q2 = g.M * (ex + eu / g.mu)
            q3 = (g.k1 * (psi - psir) + (g.k2 - 1.0) * (rh - rr)) / g.U2
            w1 = -g.U1 * (q1 / max(1.0, abs(q1))) - g.rho * (q2 / max(1.0, abs(q2)))
            w2 = -g.U2 * (q3 / max(1.0, abs(q3)))
            t1 = t1re + w1
            t2 = t2re + w2 - beta * (uh * vh - ur * vr)
            if abs(t1) > self.ceilings[0] or abs(t2) > self.ceilings[1]:
                raise SaturationBudgetError(
                    f"assembled input ({t1:.6g}, {t2:.6g}) exceeds ceilings {self.ceilings} (stage s = {t:.6g})"
                )
        cp, spsi = math.cos(psi), math.sin(psi)
        pu, pv = rho * u, crho * v
        cr, sr = math.cos(psir), math.sin(psir)
        pur, pvr = rho * ur, crho * vr
        return (
            cp * pu - spsi * pv,
            spsi * pu + cp * pv,
            r,
            -a1 * u + r * v + t1,
            -b1 * v - r * u,
            beta * u * v - r + t2,
            cr * pur - sr * pvr,
            sr * pur + cr * pvr,
            rr,
            -a1 * ur + rr * vr + t1re,
            -b1 * vr - rr * ur,
            beta * ur * vr - rr + t2re,
        )


def run(scenario: Scenario, setup: Setup | None = None) -> RunRecord:
    """Co-integrate vessel and reference on the scenario grid with RK4.

    With ``control_hold="continuous"`` the feedback is re-evaluated at every
    RK4 stage; with ``"zoh"`` the sampled input is held over the step.
    Velocity estimates from the differentiator are always held over a step.
    """
    setup = setup or prepare(scenario)
    loop = _Loop(scenario, setup)
    sp = setup.sp
    h = scenario.step
    n = scenario.n_steps
    events = [Event(0.0, "constraint-warning", msg) for msg in setup.warnings]
    if not setup.c1.satisfied:
        events.append(Event(0.0, "c1-violated", f"C1 lhs {setup.c1.lhs:.6g} >= rhs {setup.c1.rhs:.6g}"))

    hgd = HighGainDifferentiator(scenario.diff_gain, h, channels=3) if scenario.mode == "output-diff" else None

    ves_a = np.empty((n + 1, 6))
    ref_a = np.empty((n + 1, 6))
    err_a = np.empty((n + 1, 6))
    ctl_a = np.empty((n + 1, 4))
    est_a = np.empty((n + 1, 3))
    X = tuple(setup.vessel0) + tuple(setup.ref0)
    for k in range(n + 1):
        t = k * h
        ves = VesselState(*X[:6])
        ref = VesselState(*X[6:])
        tau_re = loop.reference.at(t)
        est = None
        if hgd is not None:
            rates = hgd.update((ves.x, ves.y, ves.psi))
            est = estimate_from_pose_derivatives(rates[0], rates[1], rates[2], ves.psi, sp)
        elif loop.harness is not None:
            est = loop.harness.estimate(t, ves.u, ves.v, ves.r)
        try:
            tau, w1, w2, e = loop.law(ves, ref, tau_re, est)
        except SaturationBudgetError as exc:
            raise SaturationBudgetError(f"{exc} (s = {t:.6g})") from None
        ves_a[k] = ves
        ref_a[k] = ref
        err_a[k] = e
        ctl_a[k] = (tau.tau1, tau.tau2, w1, w2)
        est_a[k] = ves[3:] if est is None else est[:3]
        if k == n:
            break
        hold = (tau_re, None if loop.continuous else tau, est)
        X = rk4_step(loop.rhs, t, X, hold, h)
        if max(map(abs, X)) > DIVERGENCE_LIMIT:
            raise DivergenceError(f"state magnitude exceeded {DIVERGENCE_LIMIT:g}", t + h)

    return _assemble_record(scenario, setup, ves_a, ref_a, err_a, ctl_a, est_a, events)


def _assemble_record(scenario, setup, ves_a, ref_a, err_a, ctl_a, est_a, events) -> RunRecord:
    sp, gains = setup.sp, setup.gains
    h = scenario.step
    n1 = len(ves_a)
    s = np.arange(n1) * h
    data = {"s": s, "t": s / sp.d}
    for i, name in enumerate(VesselState._fields):
        data[name] = ves_a[:, i]
    for i, name in enumerate(VesselState._fields):
        data[name + "_re"] = ref_a[:, i]
    for i, name in enumerate(("e_x", "e_y", "e_u", "e_v", "e_psi", "e_r")):
        data[name] = err_a[:, i]
    for i, name in enumerate(("tau1", "tau2", "w1", "w2")):
        data[name] = ctl_a[:, i]
    V, z = dg.yaw_lyapunov(data["e_psi"], data["e_r"], gains)
    data["V"] = V
    data["Vuv"] = 0.5 * (data["u"] ** 2 + data["v"] ** 2)
    data["G"] = 0.5 * (data["e_u"] ** 2 + data["e_v"] ** 2)
    data["z"] = z
    W1, W2 = dg.composite_position(data["e_x"], data["e_y"], data["e_u"], data["e_v"], gains.mu)
    data["W1"], data["W2"] = W1, W2
    data["Wt1"], data["Wt2"] = dg.rotate(data["psi_re"], W1, W2)
    f = ves_a[:, 3:] - est_a
    data["f_u"], data["f_v"], data["f_r"] = f[:, 0], f[:, 1], f[:, 2]
    data = {c: data[c] for c in CSV_COLUMNS}

    exit_idx = dg.saturation_exit_index(z)
    if exit_idx is None:
        events.append(Event(float(s[-1]), "saturated-at-end", "heading loop still saturated at the horizon"))
    else:
        events.append(Event(float(s[exit_idx]), "saturation-exit", "heading loop enters its linear region"))
    if scenario.mode == "output-harness":
        integral = scenario.harness_F0 / scenario.harness_lambda
    else:
        integral = dg.trapezoid(np.sqrt((f**2).sum(axis=1)), h)
    return RunRecord(scenario, setup, data, tuple(events), exit_idx, integral)


# --- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceThresholds:
    position: float = 1e-2
    heading: float = 1e-3
    velocity: float = 1e-3

    def scaled(self, factor: float) -> "ConvergenceThresholds":
        return ConvergenceThresholds(self.position * factor, self.heading * factor, self.velocity * factor)

    def met_by(self, record: RunRecord) -> bool:
        te = record.terminal_errors()
        return te["position"] < self.position and te["heading"] < self.heading and te["velocity"] < self.velocity


class SweepRow(NamedTuple):
    run_id: int
    terminal_error_norm: float
    sat_exit_time: float
    status: str  # converged | not-converged | rejected | diverged
    detail: str = ""


SUMMARY_COLUMNS = ("run_id", "terminal_error_norm", "sat_exit_time", "status")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    records: tuple  # RunRecord or None per row (only when kept)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SUMMARY_COLUMNS)
            for row in self.rows:
                w.writerow([row.run_id, repr(row.terminal_error_norm), repr(row.sat_exit_time), row.status])
        return path

    def statuses(self) -> list[str]:
        return [r.status for r in self.rows]


def _sweep_one(args):
    run_id, scenario, thresholds, csv_dir, every, keep = args
    nan = float("nan")
    try:
        setup = prepare(scenario)
    except (ConstraintViolation, ParameterError, AssumptionViolation) as exc:
        return SweepRow(run_id, nan, nan, "rejected", str(exc)), None
    try:
        rec = run(scenario, setup)
    except (DivergenceError, SaturationBudgetError) as exc:
        return SweepRow(run_id, nan, nan, "diverged", str(exc)), None
    if csv_dir is not None:
        rec.to_csv(Path(csv_dir) / f"run_{run_id:03d}.csv", every=every)
    exit_t = rec.sat_exit_time
    row = SweepRow(
        run_id,
        rec.terminal_errors()["norm"],
        nan if exit_t is None else exit_t,
        "converged" if thresholds.met_by(rec) else "not-converged",
    )
    return row, (rec if keep else None)


def sweep(
    base: Scenario,
    grid: Sequence[dict],
    *,
    thresholds: ConvergenceThresholds = ConvergenceThresholds(),
    max_workers: int = 1,
    csv_dir=None,
    every: int = 1,
    keep_records: bool = False,
) -> SweepResult:
    """Run ``base`` once per grid entry (a dict of Scenario field overrides).

    Per-run failures are reported in the summary rather than raised.  With
    ``max_workers > 1`` runs execute in separate processes and records are
    not returned.
    """
    if not grid:
        raise ValueError("sweep grid is empty")
    jobs = []
    for i, changes in enumerate(grid):
        try:
            scenario = base.with_overrides(**changes)
        except (ParameterError, TypeError) as exc:
            jobs.append((i, exc))
            continue
        jobs.append((i, (i, scenario, thresholds, csv_dir, every, keep_records and max_workers == 1)))
    nan = float("nan")
    todo = [j for _, j in jobs if not isinstance(j, Exception)]
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            done = dict(zip((a[0] for a in todo), pool.map(_sweep_one, todo)))
    else:
        done = {a[0]: _sweep_one(a) for a in todo}
    rows, records = [], []
    for i, job in jobs:
        if isinstance(job, Exception):
            rows.append(SweepRow(i, nan, nan, "rejected", str(job)))
            records.append(None)
        else:
            row, rec = done[i]
            rows.append(row)
            records.append(rec)
    return SweepResult(tuple(rows), tuple(records))


def sample_initial_conditions(
    n: int,
    seed: int,
    setup: Setup,
    half_width: float = 200.0,
    center: tuple[float, float] = (0.0, 0.0),
) -> list[tuple[float, ...]]:
    """Normalized initial vessel states: positions in a square box, heading in
    ``[-pi, pi]``, ``(u, v)`` uniform in the asymptotic speed ball and ``r``
    within the yaw-rate bound."""
    g, sp = setup.gains, setup.sp
    radius = speed_limsup(g.tau1_max, sp.a1, g.m_rate, "nominal")
    r_max = yaw_rate_limsup(g.tau1_max, g.tau2_max, sp.beta, sp.a1, g.m_rate)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x, y = rng.uniform(-half_width, half_width, size=2) + np.asarray(center)
        psi = rng.uniform(-math.pi, math.pi)
        rad = radius * math.sqrt(rng.uniform())
        ang = rng.uniform(-math.pi, math.pi)
        r = rng.uniform(-r_max, r_max)
        out.append((float(x), float(y), float(psi), rad * math.cos(ang), rad * math.sin(ang), float(r)))
    return out
