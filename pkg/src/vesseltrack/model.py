"""3-DOF surge/sway/yaw vessel model and its normalized control form.

The physical model is written in physical time ``t`` with the per-unit-mass
inputs ``tau1_bar = tau_u / m1`` and ``tau2_bar = tau_r / m3``.  The control
model runs in the scaled time ``s = d * t`` with velocities
``(u / (d rho), v / (d c rho), r / d)`` and inputs
``(tau1_bar / (rho d^2), tau2_bar / d^2)``.  Positions and yaw are shared by
both forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class ParameterError(ValueError):
    """A parameter lies outside its admissible domain."""


class VesselState(NamedTuple):
    x: float
    y: float
    psi: float  # unwrapped
    u: float
    v: float
    r: float

    @property
    def pose(self) -> tuple[float, float, float]:
        return self.x, self.y, self.psi

    @property
    def velocities(self) -> tuple[float, float, float]:
        return self.u, self.v, self.r


class ControlInput(NamedTuple):
    tau1: float
    tau2: float


ZERO_STATE = VesselState(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class PhysicalParams:
    """Diagonal inertia (m1, m2, m3) and linear damping (d1, d2, d3)."""

    m1: float
    m2: float
    m3: float
    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "d1", "d2", "d3"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")


# Monohull supply vessel, 32 m long.
MONOHULL = PhysicalParams(m1=120e3, m2=172.9e3, m3=636e5, d1=215e2, d2=97e3, d3=802e4)


@dataclass(frozen=True)
class PrimitiveConstants:
    a: float
    b: float
    c: float
    d: float
    kappa: float


@dataclass(frozen=True)
class ScaledParams:
    """Constants of the normalized model.

    ``beta_rule`` records how the Munk coefficient was derived: ``"exact"``
    is ``kappa * c * rho**2`` (the value that makes the normalization an exact
    change of variables) and ``"inverse"`` is ``kappa / (c * rho**2)``.
    """

    a1: float
    b1: float
    c: float
    d: float
    beta: float
    rho: float
    mu: float
    xi: float
    kappa: float
    beta_rule: str = "exact"

    @property
    def D(self) -> np.ndarray:
        return np.diag([self.a1, self.b1])

    @property
    def D_rho(self) -> np.ndarray:
        return np.diag([self.rho, self.c * self.rho])

    @property
    def A1(self) -> np.ndarray:
        return A1


def derive_primitive_constants(p: PhysicalParams) -> PrimitiveConstants:
    return PrimitiveConstants(
        a=p.d1 / p.m1,
        b=p.d2 / p.m2,
        c=p.m1 / p.m2,
        d=p.d3 / p.m3,
        kappa=(p.m1 - p.m2) / p.m3,
    )


BETA_RULES = ("exact", "inverse")


def munk_coefficient(kappa: float, c: float, rho: float, rule: str = "exact") -> float:
    if rule == "exact":
        return kappa * c * rho**2
    if rule == "inverse":
        return kappa / (c * rho**2)
    raise ParameterError(f"unknown beta rule {rule!r}; expected one of {BETA_RULES}")


def scale_params(
    k: PrimitiveConstants,
    rho: float,
    *,
    beta_rule: str = "exact",
    kappa_override: float | None = None,
) -> ScaledParams:
    """Normalize the primitive constants for velocity scale ``rho``.

    ``kappa_override`` replaces the signed kappa computed from the masses
    (e.g. to reproduce a listing that prints ``|kappa|``).
    """
    if not (math.isfinite(rho) and rho > 0):
        raise ParameterError(f"rho must be finite and > 0, got {rho!r}")
    for name in ("a", "b", "c", "d"):
        if getattr(k, name) <= 0:
            raise ParameterError(f"{name} must be > 0, got {getattr(k, name)!r}")
    kappa = k.kappa if kappa_override is None else float(kappa_override)
    a1 = k.a / k.d
    b1 = k.b / k.d
    return ScaledParams(
        a1=a1,
        b1=b1,
        c=k.c,
        d=k.d,
        beta=munk_coefficient(kappa, k.c, rho, beta_rule),
        rho=rho,
        mu=b1 / (k.c * rho),
        xi=b1 / k.c - a1,
        kappa=kappa,
        beta_rule=beta_rule,
    )


def rotation(psi: float) -> np.ndarray:
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array([[cp, -sp], [sp, cp]])


def coupling_matrix(c: float) -> np.ndarray:
    """Munk/Coriolis coupling matrix of the physical velocity equations."""
    return np.array([[0.0, -1.0 / c], [c, 0.0]])


def normalized_coupling(c: float, rho: float) -> np.ndarray:
    """``D_rho^-1 A_c D_rho`` evaluated numerically."""
    d_rho = np.diag([rho, c * rho])
    return np.linalg.inv(d_rho) @ coupling_matrix(c) @ d_rho


# The normalized coupling is the rotation generator for every (c, rho).
A1 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _check_finite(*values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise ParameterError(f"non-finite input: {values!r}")


def physical_derivative(s: VesselState, tau_bar: ControlInput, k: PrimitiveConstants) -> VesselState:
    x, y, psi, u, v, r = s
    t1, t2 = tau_bar
    _check_finite(*s, t1, t2)
    cp, sp = math.cos(psi), math.sin(psi)
    return VesselState(
        u * cp - v * sp,
        u * sp + v * cp,
        r,
        v * r / k.c - k.a * u + t1,
        -k.c * u * r - k.b * v,
        k.kappa * u * v - k.d * r + t2,
    )


def normalized_derivative(s: VesselState, tau: ControlInput, sp: ScaledParams) -> VesselState:
    x, y, psi, u, v, r = s
    t1, t2 = tau
    _check_finite(*s, t1, t2)
    return _normalized_rhs(psi, u, v, r, t1, t2, sp.rho, sp.c * sp.rho, sp.a1, sp.b1, sp.beta)


def _normalized_rhs(psi, u, v, r, t1, t2, rho, crho, a1, b1, beta):
    # -r A1 (u, v) = (r v, -r u)
    cp, spsi = math.cos(psi), math.sin(psi)
    pu, pv = rho * u, crho * v
    return VesselState(
        cp * pu - spsi * pv,
        spsi * pu + cp * pv,
        r,
        -a1 * u + r * v + t1,
        -b1 * v - r * u,
        beta * u * v - r + t2,
    )


def normalize_state(s: VesselState, sp: ScaledParams) -> VesselState:
    d, rho, c = sp.d, sp.rho, sp.c
    return VesselState(s.x, s.y, s.psi, s.u / (d * rho), s.v / (d * c * rho), s.r / d)


def denormalize_state(s: VesselState, sp: ScaledParams) -> VesselState:
    d, rho, c = sp.d, sp.rho, sp.c
    return VesselState(s.x, s.y, s.psi, s.u * d * rho, s.v * d * c * rho, s.r * d)


def normalize_input(tau_bar: ControlInput, sp: ScaledParams) -> ControlInput:
    return ControlInput(tau_bar.tau1 / (sp.rho * sp.d**2), tau_bar.tau2 / sp.d**2)


def denormalize_input(tau: ControlInput, sp: ScaledParams) -> ControlInput:
    return ControlInput(tau.tau1 * sp.rho * sp.d**2, tau.tau2 * sp.d**2)


def scaled_time(t, sp: ScaledParams):
    return sp.d * t


def physical_time(s, sp: ScaledParams):
    return s / sp.d
