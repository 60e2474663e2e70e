"""Velocity estimation for pose-only feedback.

Two sources are provided: a kinematic inversion of estimated pose rates fed
by a high-gain differentiator, and a synthetic harness that perturbs the true
velocities by a prescribed exponentially decaying error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm

from .model import ParameterError, ScaledParams


class SamplingError(ValueError):
    """Samples are not on a uniform grid."""


class ObservationError(NamedTuple):
    f_u: float
    f_v: float
    f_r: float


class VelocityEstimate(NamedTuple):
    u: float
    v: float
    r: float
    t: float = 0.0


def estimate_from_pose_derivatives(
    x_dot: float, y_dot: float, psi_dot: float, psi: float, sp: ScaledParams
) -> VelocityEstimate:
    """Invert the position kinematics: ``(u, v) = D_rho^-1 R(-psi) (x_dot, y_dot)``."""
    c, s = math.cos(psi), math.sin(psi)
    bx = c * x_dot + s * y_dot
    by = -s * x_dot + c * y_dot
    return VelocityEstimate(bx / sp.rho, by / (sp.c * sp.rho), psi_dot)


class HighGainDifferentiator:
    """Second-order high-gain observer per channel.

    Continuous form ``z1' = z2 + 2 L (y - z1)``, ``z2' = L^2 (y - z1)``
    (double pole at ``-L``), discretized exactly for a measurement that is
    linear between samples, so ramps are reproduced without lag.  The first
    update seeds ``z1`` with the measurement; the second seeds ``z2`` with
    the first finite difference.
    """

    def __init__(self, gain: float, step: float, channels: int = 1):
        if not gain > 0:
            raise ParameterError(f"differentiator gain must be > 0, got {gain!r}")
        if not step > 0:
            raise ParameterError(f"step must be > 0, got {step!r}")
        self.gain = gain
        self.step = step
        # state (z1, z2, y, y') with y' constant over the interval
        aug = np.zeros((4, 4))
        aug[:2, :2] = [[-2.0 * gain, 1.0], [-gain**2, 0.0]]
        aug[:2, 2] = [2.0 * gain, gain**2]
        aug[2, 3] = 1.0
        E = expm(aug * step)
        self._phi = E[:2, :2]
        self._gamma0 = E[:2, 2]
        self._gamma1 = E[:2, 3] / step
        self._z = np.zeros((2, channels))
        self._count = 0
        self._last = None

    @property
    def rate(self) -> np.ndarray:
        return self._z[1].copy()

    def update(self, y) -> np.ndarray:
        """Feed one sample per channel; returns the rate estimate at that sample."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if self._count == 0:
            self._z[0] = y
        elif self._count == 1:
            self._z[1] = (y - self._last) / self.step
            self._z[0] = y
        else:
            self._z = self._phi @ self._z + np.outer(self._gamma0, self._last) + np.outer(self._gamma1, y - self._last)
        self._last = y
        self._count += 1
        return self._z[1].copy()


def high_gain_differentiator(samples, gain: float, step: float | None = None, times=None) -> np.ndarray:
    """Rate estimates for uniformly sampled ``samples`` (shape ``(n,)`` or ``(n, k)``).

    Either ``step`` or a uniform ``times`` grid must be given.
    """
    y = np.asarray(samples, dtype=float)
    if times is not None:
        t = np.asarray(times, dtype=float)
        dt = np.diff(t)
        if len(dt) == 0 or not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
            raise SamplingError("high-gain differentiator needs uniformly spaced samples")
        if step is not None and not math.isclose(step, dt[0], rel_tol=1e-9):
            raise SamplingError(f"step {step} disagrees with sample spacing {dt[0]}")
        step = float(dt[0])
    if step is None:
        raise SamplingError("either step or times is required")
    squeeze = y.ndim == 1
    y2 = y.reshape(len(y), -1)
    hgd = HighGainDifferentiator(gain, step, channels=y2.shape[1])
    out = np.empty_like(y2)
    for i, row in enumerate(y2):
        out[i] = hgd.update(row)
    return out[:, 0] if squeeze else out


@dataclass(frozen=True)
class SyntheticErrorHarness:
    """Observation error ``f(t) = F0 exp(-lam t) * shape / ||shape||``.

    The estimate is ``true - f`` so that ``f = true - estimate``.
    """

    F0: float
    lam: float
    shape: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ParameterError(f"harness decay rate lambda must be > 0, got {self.lam!r}")
        if not (math.isfinite(self.F0) and self.F0 >= 0):
            raise ParameterError(f"harness amplitude F0 must be >= 0, got {self.F0!r}")
        n = math.sqrt(sum(w * w for w in self.shape))
        if n == 0:
            raise ParameterError("harness shape must be non-zero")

    @property
    def direction(self) -> tuple[float, float, float]:
        n = math.sqrt(sum(w * w for w in self.shape))
        return tuple(w / n for w in self.shape)

    def error(self, t: float) -> ObservationError:
        a = self.F0 * math.exp(-self.lam * t)
        du, dv, dr = self.direction
        return ObservationError(a * du, a * dv, a * dr)

    def error_integral(self) -> float:
        """Closed-form integral of ``||f||`` over ``[0, inf)``."""
        return self.F0 / self.lam

    def estimate(self, t: float, u: float, v: float, r: float) -> VelocityEstimate:
        f = self.error(t)
        return VelocityEstimate(u - f.f_u, v - f.f_v, r - f.f_r, t)


def synthetic_error_harness(
    true_velocities: Sequence[float], t: float, F0: float, lam: float, shape=(1.0, 1.0, 1.0)
) -> VelocityEstimate:
    u, v, r = true_velocities
    return SyntheticErrorHarness(F0, lam, tuple(shape)).estimate(t, u, v, r)
