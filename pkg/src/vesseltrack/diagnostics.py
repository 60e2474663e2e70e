"""Vectorized diagnostics evaluated on recorded trajectories."""
from __future__ import annotations

import numpy as np

from .control import ControllerGains


def saturate(x):
    x = np.asarray(x, dtype=float)
    return x / np.maximum(1.0, np.abs(x))


def saturation_potential(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    return np.where(ax <= 1.0, 0.5 * x * x, ax - 0.5)


def heading_argument(e_psi, e_r, gains: ControllerGains):
    return (gains.k1 * np.asarray(e_psi) + (gains.k2 - 1.0) * np.asarray(e_r)) / gains.U2


def yaw_lyapunov(e_psi, e_r, gains: ControllerGains):
    """``V = alpha/2 e_r^2 + S(z)`` and its argument ``z``."""
    z = heading_argument(e_psi, e_r, gains)
    return 0.5 * gains.alpha * np.asarray(e_r) ** 2 + saturation_potential(z), z


def yaw_lyapunov_rate(e_r, z, gains: ControllerGains):
    """Closed-form ``dV/dt = -alpha e_r^2 - (k2 - 1) sat(z)^2`` along the heading loop."""
    return -gains.alpha * np.asarray(e_r) ** 2 - (gains.k2 - 1.0) * saturate(z) ** 2


def centered_difference(y, h: float):
    """Derivative at interior samples ``1..n-2``."""
    y = np.asarray(y, dtype=float)
    return (y[2:] - y[:-2]) / (2.0 * h)


def saturation_exit_index(z) -> int | None:
    """First sample after which ``|z| <= 1`` for the rest of the record.

    0 if never saturated, None if still saturated at the last sample.
    """
    sat = np.nonzero(np.abs(np.asarray(z)) > 1.0)[0]
    if len(sat) == 0:
        return 0
    last = int(sat[-1])
    if last == len(z) - 1:
        return None
    return last + 1


def fit_log_decay(t, values, floor: float = 1e-10):
    """Least-squares slope of ``log|values|`` versus ``t``.

    Samples below ``floor`` times the first value are dropped so round-off
    does not flatten the fit.  Returns ``(slope, n_used)``.
    """
    t = np.asarray(t, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = v > floor * v[0]
    if keep.sum() < 2:
        raise ValueError("too few samples above the noise floor to fit a decay rate")
    slope = np.polyfit(t[keep], np.log(v[keep]), 1)[0]
    return float(slope), int(keep.sum())


def composite_position(e_x, e_y, e_u, e_v, mu: float):
    """``W = (e_x, e_y) + (e_u, e_v) / mu``."""
    return np.asarray(e_x) + np.asarray(e_u) / mu, np.asarray(e_y) + np.asarray(e_v) / mu


def rotate(psi, a, b):
    c, s = np.cos(psi), np.sin(psi)
    return c * a - s * b, s * a + c * b


def window_maxima(values, n_windows: int = 10):
    chunks = np.array_split(np.abs(np.asarray(values, dtype=float)), n_windows)
    return np.array([c.max() for c in chunks if len(c)])


def is_monotone_enveloped(values, n_windows: int = 10, rel_slack: float = 0.01, abs_slack: float = 1e-12) -> bool:
    """Windowed maxima of ``|values|`` never increase (up to the given slack)."""
    m = window_maxima(values, n_windows)
    return bool(np.all(m[1:] <= m[:-1] * (1.0 + rel_slack) + abs_slack))


def trapezoid(y, h: float) -> float:
    y = np.asarray(y, dtype=float)
    if len(y) < 2:
        return 0.0
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))
