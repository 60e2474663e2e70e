"""Static SVG figures from a run table."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURES = (
    ("fig1_trajectory", "Reference trajectory and the vessel"),
    ("fig2_position_errors", "Errors e_x and e_y"),
    ("fig3_velocity_errors", "Errors e_u and e_v"),
    ("fig4_heading_errors", "Errors e_psi and e_r"),
    ("fig5_tau1", "Control tau_1"),
    ("fig6_tau2", "Control tau_2"),
)


def _time_axes(ax, data, d: float):
    ax.set_xlabel("scaled time s")
    sec = ax.secondary_xaxis("top", functions=(lambda s: s / d, lambda t: t * d))
    sec.set_xlabel("physical time t [s]")


def _series(ax, data, names, labels, d):
    for name, label in zip(names, labels):
        ax.plot(data["s"], data[name], label=label, lw=1.0)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    _time_axes(ax, data, d)


def plot_run(data: dict, out_dir, d: float, prefix: str = "", max_points: int = 5000) -> list[Path]:
    """Write the six figures as SVG; ``d`` converts scaled to physical time.

    Series are strided down to about ``max_points`` samples to keep the
    vector files small.
    """
    stride = max(1, len(data["s"]) // max_points)
    data = {k: v[::stride] for k, v in data.items()}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for key, title in FIGURES:
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        if key == "fig1_trajectory":
            ax.plot(data["x_re"], data["y_re"], "--", label="reference", lw=1.0)
            ax.plot(data["x"], data["y"], label="vessel", lw=1.0)
            ax.plot(data["x"][:1], data["y"][:1], "o", ms=4)
            ax.set_xlabel("x [m] (normalized and physical coincide)")
            ax.set_ylabel("y [m]")
            ax.set_aspect("equal", adjustable="datalim")
            ax.legend(loc="best")
            ax.grid(True, alpha=0.3)
        elif key == "fig2_position_errors":
            _series(ax, data, ("e_x", "e_y"), ("e_x [m]", "e_y [m]"), d)
        elif key == "fig3_velocity_errors":
            _series(ax, data, ("e_u", "e_v"), ("e_u", "e_v"), d)
            ax.set_ylabel("normalized velocity error")
        elif key == "fig4_heading_errors":
            _series(ax, data, ("e_psi", "e_r"), ("e_psi [rad]", "e_r"), d)
        elif key == "fig5_tau1":
            _series(ax, data, ("tau1",), ("tau_1",), d)
        else:
            _series(ax, data, ("tau2",), ("tau_2",), d)
        ax.set_title(title)
        fig.tight_layout()
        path = out_dir / f"{prefix}{key}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        paths.append(path)
    return paths
