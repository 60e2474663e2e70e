"""Reference trajectories from a virtual vessel driven by reference inputs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .integrate import rk4_step
from .model import ControlInput, ScaledParams, VesselState, normalized_derivative


class AssumptionViolation(ValueError):
    """Reference inputs or states break the boundedness assumption."""


@dataclass(frozen=True)
class Schedule:
    """Piecewise-linear time series; held constant outside its support."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise ValueError("schedule needs equally many (>= 1) times and values")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("schedule times must be strictly increasing")

    def __call__(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def peak(self) -> float:
        return max(abs(v) for v in self.values)


Signal = Union[float, Schedule]


def _value(sig: Signal, t: float) -> float:
    return sig(t) if isinstance(sig, Schedule) else float(sig)


def _peak(sig: Signal) -> float:
    return sig.peak() if isinstance(sig, Schedule) else abs(float(sig))


@dataclass(frozen=True)
class ReferenceInput:
    tau1: Signal
    tau2: Signal

    def at(self, t: float) -> ControlInput:
        return ControlInput(_value(self.tau1, t), _value(self.tau2, t))

    @property
    def is_constant(self) -> bool:
        return not isinstance(self.tau1, Schedule) and not isinstance(self.tau2, Schedule)

    def peaks(self) -> tuple[float, float]:
        return _peak(self.tau1), _peak(self.tau2)

    def check_bounds(self, tau1_max: float, tau2_max: float) -> None:
        p1, p2 = self.peaks()
        if p1 > tau1_max or p2 > tau2_max:
            raise AssumptionViolation(
                f"reference input peaks ({p1:.6g}, {p2:.6g}) exceed ceilings ({tau1_max:.6g}, {tau2_max:.6g})"
            )


@dataclass(frozen=True)
class ReferenceTrajectory:
    times: np.ndarray  # scaled time
    states: np.ndarray  # (n, 6): x, y, psi, u, v, r
    inputs: np.ndarray  # (n, 2): held input over [t_k, t_k+1)
    step: float

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> VesselState:
        return VesselState(*map(float, self.states[k]))

    def column(self, name: str) -> np.ndarray:
        return self.states[:, VesselState._fields.index(name)]


def _ref_rhs(sp: ScaledParams):
    def f(t, s, tau):
        return normalized_derivative(VesselState(*s), tau, sp)

    return f


def generate_reference(
    ref_input: ReferenceInput,
    init: VesselState,
    sp: ScaledParams,
    horizon: float,
    step: float,
    ceilings: tuple[float, float] | None = None,
) -> ReferenceTrajectory:
    """Integrate the virtual vessel with RK4; inputs are held over each step."""
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step!r}")
    if not horizon > 0:
        raise ValueError(f"horizon must be > 0, got {horizon!r}")
    if ceilings is not None:
        ref_input.check_bounds(*ceilings)
    n = int(round(horizon / step))
    f = _ref_rhs(sp)
    states = np.empty((n + 1, 6))
    inputs = np.empty((n + 1, 2))
    s = tuple(map(float, init))
    for k in range(n + 1):
        t = k * step
        tau = ref_input.at(t)
        states[k] = s
        inputs[k] = tau
        if k < n:
            s = rk4_step(f, t, s, tau, step)
    return ReferenceTrajectory(np.arange(n + 1) * step, states, inputs, step)


class Assumption1Report(NamedTuple):
    max_abs_u: float
    max_abs_v: float
    max_abs_tau1: float
    max_abs_tau2: float
    bounds_ok: bool
    window: float
    heading_variation: float
    threshold: float
    flag: str  # "OK" or "LIKELY-VIOLATED"
    note: str = (
        "heuristic: divergence of the reference heading cannot be certified from a finite trace"
    )


def check_assumption1(
    traj: ReferenceTrajectory,
    window: float,
    *,
    threshold: float = 1e-3,
    speed_bound: float = math.inf,
    tau_bounds: tuple[float, float] = (math.inf, math.inf),
) -> Assumption1Report:
    """Boundedness of the reference plus a witness that its heading keeps moving.

    The witness is the total variation of ``psi_re`` over the trailing
    ``window``; below ``threshold`` the heading looks convergent.
    """
    duration = traj.times[-1] - traj.times[0]
    if not window > 0:
        raise ValueError(f"window must be > 0, got {window!r}")
    if window > duration:
        raise ValueError(f"window {window} longer than trajectory ({duration})")
    u = np.abs(traj.column("u")).max()
    v = np.abs(traj.column("v")).max()
    t1, t2 = np.abs(traj.inputs).max(axis=0)
    ok = u <= speed_bound and v <= speed_bound and t1 <= tau_bounds[0] and t2 <= tau_bounds[1]
    start = np.searchsorted(traj.times, traj.times[-1] - window - 1e-12 * max(1.0, window))
    psi = traj.column("psi")[start:]
    variation = float(np.abs(np.diff(psi)).sum())
    return Assumption1Report(
        max_abs_u=float(u),
        max_abs_v=float(v),
        max_abs_tau1=float(t1),
        max_abs_tau2=float(t2),
        bounds_ok=bool(ok),
        window=float(window),
        heading_variation=variation,
        threshold=threshold,
        flag="OK" if variation >= threshold else "LIKELY-VIOLATED",
    )
