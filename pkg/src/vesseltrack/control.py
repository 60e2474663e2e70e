"""Saturated tracking control for the normalized vessel model.

Position-error channel (surge force)::

    w1 = -U1 sat(xi e_u / U1) - rho sat(M (e_x + e_u / mu))

Heading channel (yaw moment)::

    w2 = -U2 sat((k1 e_psi + (k2 - 1) e_r) / U2)

with the yaw moment actually applied being
``tau2 = tau2_re + w2 - beta (u v - u_re v_re)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

from .model import ControlInput, ParameterError, ScaledParams, VesselState


class ConstraintViolation(ValueError):
    """Gains violate one or more hard constraints."""

    def __init__(self, failures, checks=()):
        self.failures = tuple(failures)
        self.checks = tuple(checks)
        lines = "; ".join(f"{c.name}: {c.lhs:.6g} vs {c.rhs:.6g}" for c in self.failures)
        super().__init__(f"infeasible gains ({lines})")


class SaturationBudgetError(RuntimeError):
    """An assembled input exceeds its actuator ceiling."""


class ConstraintWarning(UserWarning):
    pass


def saturate(x: float) -> float:
    return x / max(1.0, abs(x))


def saturation_potential(x: float) -> float:
    """Antiderivative of ``saturate`` vanishing at 0."""
    ax = abs(x)
    return 0.5 * x * x if ax <= 1.0 else ax - 0.5


class ErrorState(NamedTuple):
    e_x: float
    e_y: float
    e_u: float
    e_v: float
    e_psi: float
    e_r: float


def error_transform(vessel: VesselState, ref: VesselState) -> ErrorState:
    """Tracking errors with the position error in the reference heading frame."""
    c, s = math.cos(ref.psi), math.sin(ref.psi)
    dx, dy = vessel.x - ref.x, vessel.y - ref.y
    return ErrorState(
        c * dx + s * dy,
        -s * dx + c * dy,
        vessel.u - ref.u,
        vessel.v - ref.v,
        vessel.psi - ref.psi,
        vessel.r - ref.r,
    )


@dataclass(frozen=True)
class ControllerGains:
    U1: float
    U2: float
    rho: float
    xi: float
    mu: float
    M: float
    k1: float
    k2: float
    alpha: float
    tau1_max: float
    tau2_max: float
    m_rate: float
    C0: float

    @property
    def w1_bound(self) -> float:
        return self.U1 + self.rho


class ConstraintCheck(NamedTuple):
    name: str
    lhs: float
    rhs: float
    passed: bool
    severity: str  # "error" or "warning" when failing


class C1Report(NamedTuple):
    lhs: float
    rhs: float
    satisfied: bool
    rho_floor: float


def m_rate(sp: ScaledParams) -> float:
    return min(sp.a1 / 2.0, sp.b1)


def u1_floor(sp: ScaledParams) -> float:
    """Lower bound on U1 from the velocity-error analysis."""
    b1c = sp.b1 / sp.c
    return abs(sp.a1 - b1c) * sp.rho / min(sp.a1, b1c)


def speed_limsup(tau1_max: float, a1: float, m: float, rule: str = "nominal") -> float:
    """Asymptotic bound on ||(u, v)|| under ``|tau1| <= tau1_max``.

    ``"nominal"`` is ``tau1_max / (2 sqrt(a1 m))``.  ``"storage"`` is
    ``tau1_max / sqrt(2 a1 m)``, the radius at which the storage function
    ``(u^2 + v^2) / 2`` stops decreasing; it is attained by the surge
    equilibrium ``tau1 / a1`` when ``m = a1 / 2``.
    """
    if rule == "nominal":
        return tau1_max / (2.0 * math.sqrt(a1 * m))
    if rule == "storage":
        return tau1_max / math.sqrt(2.0 * a1 * m)
    raise ParameterError(f"unknown speed bound rule {rule!r}")


def yaw_rate_limsup(tau1_max: float, tau2_max: float, beta: float, a1: float, m: float) -> float:
    return tau2_max + abs(beta) * tau1_max**2 / (2.0 * a1 * m)


def velocity_error_limsup(sp: ScaledParams) -> float:
    """Bound on ||(e_u, e_v)|| once the heading loop is linear."""
    a_t = min(sp.a1, sp.b1 / sp.c)
    m2 = min(a_t / 2.0, sp.b1)
    return sp.rho / math.sqrt(m2 * a_t)


def adopted_ceilings(
    sp: ScaledParams,
    U1: float,
    U2: float,
    tau_re: ControlInput,
    vessel_speed0: float = 0.0,
    ref_speed0: float = 0.0,
) -> tuple[float, float, float]:
    """Actuator ceilings sized to the demand the control law can produce.

    ``tau1_max = |tau1_re| + U1 + rho``.  The yaw ceiling adds ``U2`` and a
    budget for the Munk cancellation ``beta (u v - u_re v_re)``; each product
    is bounded by ``R^2 / 2`` where ``R`` is the larger of the initial speed
    and the asymptotic speed radius, since ``||(u, v)||`` cannot grow while
    it is outside that radius.  Returns ``(tau1_max, tau2_max, C0)`` with
    ``C0`` the reference speed bound used for ``u_max + v_max``.
    """
    # same association as tau_re + w1 so a fully saturated demand lands on the ceiling exactly
    t1 = abs(tau_re.tau1) + (U1 + sp.rho)
    m = m_rate(sp)
    radius = speed_limsup(t1, sp.a1, m, "storage")
    r_vessel = max(vessel_speed0, radius)
    r_ref = max(ref_speed0, radius)
    t2 = abs(tau_re.tau2) + U2 + abs(sp.beta) * 0.5 * (r_vessel**2 + r_ref**2)
    return t1, t2, 2.0 * r_ref


GAIN_FIELDS = ("U1", "U2", "M", "k1", "k2", "xi", "mu", "tau1_max", "tau2_max", "C0")


def synthesize_gains(
    sp: ScaledParams,
    overrides: dict | None = None,
    *,
    tau_re: ControlInput = ControlInput(0.0, 0.0),
    vessel_speed0: float = 0.0,
    ref_speed0: float = 0.0,
    strict: bool = False,
) -> tuple[ControllerGains, tuple[ConstraintCheck, ...]]:
    """Fill in the gain set and evaluate every constraint once.

    Unspecified gains default to k1 = k2 = 10, U2 = 0.1, U1 = a1/2, M = 0.1;
    xi and mu come from ``a1 + xi = mu rho`` and ``b1 = mu c rho``.  A
    failing U1 lower bound only warns unless ``strict``; any other failure
    raises ConstraintViolation.  Ceilings not given as overrides are sized
    by ``adopted_ceilings`` from ``tau_re`` and the initial speeds.
    """
    o = dict(overrides or {})
    unknown = set(o) - set(GAIN_FIELDS)
    if unknown:
        raise ParameterError(f"unknown gain override(s): {sorted(unknown)}")
    U1 = float(o.get("U1", sp.a1 / 2.0))
    U2 = float(o.get("U2", 0.1))
    M = float(o.get("M", 0.1))
    k1 = float(o.get("k1", 10.0))
    k2 = float(o.get("k2", 10.0))
    xi = float(o.get("xi", sp.xi))
    mu = float(o.get("mu", sp.mu))
    rho = sp.rho
    m = m_rate(sp)
    auto1, auto2, auto_c0 = adopted_ceilings(sp, U1, U2, tau_re, vessel_speed0, ref_speed0)
    t1max = float(o.get("tau1_max", auto1))
    t2max = float(o.get("tau2_max", auto2))
    C0 = float(o.get("C0", auto_c0))

    checks = (
        ConstraintCheck("a1 > U1 + rho", sp.a1, U1 + rho, sp.a1 > U1 + rho, "error"),
        ConstraintCheck(
            "U1 > |a1 - b1/c| rho / min(a1, b1/c)", U1, u1_floor(sp), U1 > u1_floor(sp), "warning"
        ),
        ConstraintCheck("U2 > 0", U2, 0.0, U2 > 0, "error"),
        ConstraintCheck("M > 0", M, 0.0, M > 0, "error"),
        ConstraintCheck("k1 > k2 - 1", k1, k2 - 1.0, k1 > k2 - 1.0, "error"),
        ConstraintCheck("k2 - 1 > 0", k2 - 1.0, 0.0, k2 - 1.0 > 0, "error"),
        ConstraintCheck(
            "a1 + xi = mu rho", sp.a1 + xi, mu * rho, math.isclose(sp.a1 + xi, mu * rho, rel_tol=1e-9), "error"
        ),
        ConstraintCheck(
            "b1 = mu c rho", sp.b1, mu * sp.c * rho, math.isclose(sp.b1, mu * sp.c * rho, rel_tol=1e-9), "error"
        ),
    )
    hard = [c for c in checks if not c.passed and (c.severity == "error" or strict)]
    if hard:
        raise ConstraintViolation(hard, checks)
    for c in checks:
        if not c.passed:
            warnings.warn(
                f"gain constraint {c.name} fails ({c.lhs:.6g} vs {c.rhs:.6g})", ConstraintWarning, stacklevel=2
            )
    gains = ControllerGains(
        U1=U1,
        U2=U2,
        rho=rho,
        xi=xi,
        mu=mu,
        M=M,
        k1=k1,
        k2=k2,
        alpha=(k1 - k2 + 1.0) / U2**2,
        tau1_max=t1max,
        tau2_max=t2max,
        m_rate=m,
        C0=C0,
    )
    return gains, checks


def with_ceilings(gains: ControllerGains, tau1_max: float, tau2_max: float) -> ControllerGains:
    return replace(gains, tau1_max=tau1_max, tau2_max=tau2_max)


def check_c1(gains: ControllerGains, sp: ScaledParams) -> C1Report:
    """Evaluate the yaw-budget condition ``beta tau1_max^2 / (a1 m) < tau2_max``."""
    if not (gains.tau1_max > 0 and gains.tau2_max > 0):
        raise ParameterError("actuator ceilings must be positive")
    m = min(sp.a1 / 2.0, sp.b1)
    lhs = sp.beta * gains.tau1_max**2 / (sp.a1 * m)
    # floor on rho in terms of the physical ceilings
    t1_bar = gains.tau1_max * sp.rho * sp.d**2
    t2_bar = gains.tau2_max * sp.d**2
    floor = (t1_bar / sp.d) * math.sqrt(abs(sp.beta) / (sp.a1 * m * t2_bar))
    return C1Report(lhs=lhs, rhs=gains.tau2_max, satisfied=lhs < gains.tau2_max, rho_floor=floor)


def heading_argument(e_psi: float, e_r: float, gains: ControllerGains) -> float:
    return (gains.k1 * e_psi + (gains.k2 - 1.0) * e_r) / gains.U2


def state_feedback(e: ErrorState, gains: ControllerGains) -> tuple[float, float]:
    U1, rho = gains.U1, gains.rho
    w1 = -U1 * saturate(gains.xi * e.e_u / U1) - rho * saturate(gains.M * (e.e_x + e.e_u / gains.mu))
    w2 = -gains.U2 * saturate(heading_argument(e.e_psi, e.e_r, gains))
    return w1, w2


def output_feedback(
    pose_error: ErrorState,
    velocity_error_estimate: tuple[float, float, float],
    gains: ControllerGains,
) -> tuple[float, float]:
    """Same law as ``state_feedback`` with estimated velocity errors.

    Only ``e_x, e_y, e_psi`` of ``pose_error`` are used; they come from
    measured pose.  ``velocity_error_estimate`` is ``(e_u_hat, e_v_hat, e_r_hat)``.
    """
    eu, ev, er = velocity_error_estimate
    return state_feedback(pose_error._replace(e_u=eu, e_v=ev, e_r=er), gains)


def assemble_inputs(
    w1: float,
    w2: float,
    velocities: tuple[float, float],
    ref: VesselState,
    tau_re: ControlInput,
    beta: float,
    ceilings: tuple[float, float] | None = None,
) -> ControlInput:
    """Add feedforward and Munk cancellation to the saturated feedback.

    ``velocities`` is ``(u, v)`` or its estimate ``(u_hat, v_hat)``.
    """
    u, v = velocities
    tau1 = tau_re.tau1 + w1
    tau2 = tau_re.tau2 + w2 - beta * (u * v - ref.u * ref.v)
    if ceilings is not None:
        t1max, t2max = ceilings
        if abs(tau1) > t1max or abs(tau2) > t2max:
            raise SaturationBudgetError(
                f"assembled input ({tau1:.6g}, {tau2:.6g}) exceeds ceilings ({t1max:.6g}, {t2max:.6g})"
            )
    return ControlInput(tau1, tau2)
