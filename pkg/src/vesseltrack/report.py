"""Scenario validation reports."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .control import C1Report, ConstraintCheck, ControllerGains, speed_limsup
from .model import MONOHULL, munk_coefficient
from .reference import Assumption1Report, check_assumption1, generate_reference
from .sim import Scenario, Setup, prepare

# Rounded constants published alongside the monohull parameter set.
MONOHULL_LISTING = {"a": 0.179, "b": 0.561, "c": 0.694, "d": 0.126, "beta": 0.126, "kappa": 8.32e-4, "a1": 1.421, "b1": 4.449}

# Upper bound on reference samples used for the heading witness.
WITNESS_SAMPLES = 20_000


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    constants: dict
    gains: ControllerGains
    checks: tuple[ConstraintCheck, ...]
    c1: C1Report
    assumption1: Assumption1Report
    notes: tuple[str, ...]

    @property
    def hard_failures(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.passed and c.severity == "error"]

    @property
    def warnings(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.passed and c.severity == "warning"]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "constants": self.constants,
            "gains": asdict(self.gains),
            "constraints": [c._asdict() for c in self.checks],
            "c1": self.c1._asdict(),
            "assumption1": self.assumption1._asdict(),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render(self) -> str:
        lines = [f"scenario: {self.scenario}", "", "derived constants"]
        lines += [f"  {k:<8} {v: .6g}" for k, v in self.constants.items()]
        lines += ["", "gains"]
        lines += [f"  {k:<9} {v: .6g}" for k, v in asdict(self.gains).items()]
        lines += ["", "constraints"]
        for c in self.checks:
            status = "PASS" if c.passed else ("WARNING" if c.severity == "warning" else "FAIL")
            lines.append(f"  {status:<8} {c.name:<40} {c.lhs: .6g} vs {c.rhs: .6g}")
        c1 = self.c1
        lines += [
            "",
            f"C1 (yaw budget)  lhs {c1.lhs:.6g} < rhs {c1.rhs:.6g}: {'satisfied' if c1.satisfied else 'VIOLATED'}"
            f"   (rho floor {c1.rho_floor:.6g})",
        ]
        a = self.assumption1
        lines += [
            "",
            f"reference boundedness: {'ok' if a.bounds_ok else 'VIOLATED'}"
            f"  (max |u_re| {a.max_abs_u:.4g}, |v_re| {a.max_abs_v:.4g})",
            f"reference heading variation over last {a.window:g}: {a.heading_variation:.4g} -> {a.flag}",
            f"  {a.note}",
        ]
        if self.notes:
            lines += ["", "notes"] + [f"  - {n}" for n in self.notes]
        return "\n".join(lines)


def _notes(scenario: Scenario, setup: Setup) -> list[str]:
    k, sp = setup.constants, setup.sp
    notes = []
    if k.kappa < 0:
        notes.append(f"kappa = (m1 - m2)/m3 = {k.kappa:.6g} is negative (m2 > m1); used signed")
    if scenario.kappa_override is not None:
        notes.append(f"kappa overridden to {scenario.kappa_override:.6g}")
    other = "inverse" if sp.beta_rule == "exact" else "exact"
    notes.append(
        f"beta = {sp.beta:.6g} ({sp.beta_rule} rule); the {other} rule would give "
        f"{munk_coefficient(sp.kappa, sp.c, sp.rho, other):.6g}"
    )
    if scenario.params == MONOHULL:
        listed = MONOHULL_LISTING
        notes.append(
            f"listed beta {listed['beta']} equals d, not the derived beta; treated as a typo. "
            f"Listed |kappa| {listed['kappa']} matches the derived magnitude {abs(k.kappa):.4g} but drops the sign"
        )
    for c in setup.checks:
        if not c.passed and c.severity == "warning":
            notes.append(f"{c.name} fails ({c.lhs:.6g} vs {c.rhs:.6g}); run proceeds with a warning")
    g = setup.gains
    notes.append(
        f"asymptotic speed radius: {speed_limsup(g.tau1_max, sp.a1, g.m_rate, 'nominal'):.6g} (nominal form), "
        f"{speed_limsup(g.tau1_max, sp.a1, g.m_rate, 'storage'):.6g} (storage form, used for ceilings)"
    )
    notes.append(
        f"position-correction authority rho/mu = {g.rho / g.mu:.4g} length units per unit scaled time"
    )
    return notes


def build_report(
    scenario: Scenario,
    *,
    window: float | None = None,
    threshold: float = 1e-3,
) -> ScenarioReport:
    """Derive everything about ``scenario`` without simulating the vessel.

    The reference is integrated (on a grid of at most WITNESS_SAMPLES steps)
    only to evaluate its boundedness and heading witness.
    """
    setup = prepare(scenario)
    k, sp, g = setup.constants, setup.sp, setup.gains
    constants = {
        "a": k.a, "b": k.b, "c": k.c, "d": k.d, "kappa": sp.kappa,
        "a1": sp.a1, "b1": sp.b1, "rho": sp.rho, "beta": sp.beta, "mu": sp.mu, "xi": sp.xi,
    }  # fmt: skip
    step = max(scenario.step, scenario.horizon / WITNESS_SAMPLES)
    traj = generate_reference(scenario.reference, setup.ref0, sp, scenario.horizon, step)
    radius = max(speed_limsup(g.tau1_max, sp.a1, g.m_rate, "storage"), math.hypot(setup.ref0.u, setup.ref0.v))
    a1 = check_assumption1(
        traj,
        window if window is not None else scenario.horizon / 10.0,
        threshold=threshold,
        speed_bound=radius,
        tau_bounds=(g.tau1_max, g.tau2_max),
    )
    return ScenarioReport(scenario.name, constants, g, setup.checks, setup.c1, a1, tuple(_notes(scenario, setup)))
