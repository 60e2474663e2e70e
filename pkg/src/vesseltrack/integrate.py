"""Fixed-step classical Runge-Kutta integration."""
from __future__ import annotations

import math
from typing import Callable, Sequence


class DivergenceError(RuntimeError):
    """The integration produced non-finite or runaway values."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:.6g})")
        self.time = time


def _axpy(x: Sequence[float], a: float, y: Sequence[float]) -> list[float]:
    return [xi + a * yi for xi, yi in zip(x, y)]


def rk4_step(
    f: Callable[[float, Sequence[float], object], Sequence[float]],
    t: float,
    state: Sequence[float],
    hold: object,
    h: float,
) -> tuple[float, ...]:
    """One RK4 step of ``dx/dt = f(t, x, hold)``.

    ``hold`` is passed unchanged to all four stages (zero-order hold of
    whatever input it carries).  Raises DivergenceError if any stage
    derivative is non-finite.
    """
    if not h > 0:
        raise ValueError(f"step must be > 0, got {h!r}")
    k1 = f(t, state, hold)
    k2 = f(t + 0.5 * h, _axpy(state, 0.5 * h, k1), hold)
    k3 = f(t + 0.5 * h, _axpy(state, 0.5 * h, k2), hold)
    k4 = f(t + h, _axpy(state, h, k3), hold)
    out = tuple(
        x + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for x, a, b, c, d in zip(state, k1, k2, k3, k4)
    )
    if not all(math.isfinite(v) for v in out):
        raise DivergenceError("non-finite state after RK4 step", t)
    return out


def integrate_fixed(f, t0: float, state, hold, h: float, n_steps: int) -> list[tuple[float, ...]]:
    """Integrate ``n_steps`` RK4 steps with a constant hold; returns all samples."""
    out = [tuple(state)]
    t = t0
    for _ in range(n_steps):
        state = rk4_step(f, t, state, hold, h)
        t += h
        out.append(state)
    return out
