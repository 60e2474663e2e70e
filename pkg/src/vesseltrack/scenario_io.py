"""YAML scenario files.

Layout (``schema: vesseltrack-scenario/1``)::

    name: str
    vessel: {m1, m2, m3, d1, d2, d3}
    normalization: {rho, beta_rule, kappa_override}
    gains: {U1, U2, M, k1, k2, xi, mu, tau1_max, tau2_max, C0}
    reference: {tau1, tau2}           # number or {times: [...], values: [...]}
    initial: {units, vessel: [6], reference: [6]}
    simulation: {horizon, step, control_hold, seed, strict_gains}
    feedback: {mode, harness: {F0, lambda, shape}, differentiator: {gain}}

Only ``schema``, ``vessel``, ``reference`` and ``initial.vessel`` are
required.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import yaml

from .model import PhysicalParams
from .reference import ReferenceInput, Schedule
from .sim import Scenario

SCHEMA = "vesseltrack-scenario/1"

_SPEC = {
    "schema": None,
    "name": None,
    "vessel": {k: None for k in ("m1", "m2", "m3", "d1", "d2", "d3")},
    "normalization": {"rho": None, "beta_rule": None, "kappa_override": None},
    "gains": {k: None for k in ("U1", "U2", "M", "k1", "k2", "xi", "mu", "tau1_max", "tau2_max", "C0")},
    "reference": {"tau1": None, "tau2": None},
    "initial": {"units": None, "vessel": None, "reference": None},
    "simulation": {"horizon": None, "step": None, "control_hold": None, "seed": None, "strict_gains": None},
    "feedback": {
        "mode": None,
        "harness": {"F0": None, "lambda": None, "shape": None},
        "differentiator": {"gain": None},
    },
}
_REQUIRED = (("schema",), ("vessel",), ("reference", "tau1"), ("reference", "tau2"), ("initial", "vessel"))


class ScenarioFileError(ValueError):
    """Malformed scenario document."""


def _key_marks(node, prefix=()):
    """Map key paths to their source marks."""
    out = {}
    if isinstance(node, yaml.MappingNode):
        for knode, vnode in node.value:
            path = prefix + (knode.value,)
            out[path] = knode.start_mark
            out.update(_key_marks(vnode, path))
    return out


def _where(marks, path) -> str:
    m = marks.get(tuple(path))
    return f" (line {m.line + 1}, column {m.column + 1})" if m is not None else ""


def _check_keys(doc, spec, marks, prefix=()):
    if not isinstance(doc, dict):
        raise ScenarioFileError(f"{'.'.join(prefix) or '<root>'}: expected a mapping{_where(marks, prefix)}")
    for key, value in doc.items():
        path = prefix + (key,)
        if key not in spec:
            raise ScenarioFileError(f"unknown key {'.'.join(map(str, path))}{_where(marks, path)}")
        if isinstance(spec[key], dict) and value is not None:
            _check_keys(value, spec[key], marks, path)


def _get(doc, path, default=None):
    cur = doc
    for key in path:
        if not isinstance(cur, dict) or key not in cur or cur[key] is None:
            return default
        cur = cur[key]
    return cur


def _signal(value, path):
    if isinstance(value, dict):
        if set(value) != {"times", "values"}:
            raise ScenarioFileError(f"{'.'.join(path)}: schedule needs exactly 'times' and 'values'")
        return Schedule(tuple(map(float, value["times"])), tuple(map(float, value["values"])))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ScenarioFileError(f"{'.'.join(path)}: expected a number or a schedule, got {value!r}")


def _state(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 6:
        raise ScenarioFileError(f"{'.'.join(path)}: expected a list of six numbers [x, y, psi, u, v, r]")
    return tuple(float(v) for v in value)


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ScenarioFileError(f"{source}: parse error at {where}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ScenarioFileError(f"{source}: parse error: {exc}") from None
    if doc is None:
        raise ScenarioFileError(f"{source}: empty scenario document")
    marks = _key_marks(node)
    _check_keys(doc, _SPEC, marks)
    missing = [".".join(p) for p in _REQUIRED if _get(doc, p) is None]
    if missing:
        raise ScenarioFileError(f"{source}: missing required key(s): {', '.join(missing)}")
    if doc["schema"] != SCHEMA:
        raise ScenarioFileError(f"{source}: schema {doc['schema']!r} not supported (expected {SCHEMA!r})")
    vessel = doc["vessel"]
    absent = [k for k in _SPEC["vessel"] if k not in vessel]
    if absent:
        raise ScenarioFileError(f"{source}: missing required key(s): {', '.join('vessel.' + k for k in absent)}")

    kwargs = dict(
        name=str(doc.get("name") or Path(source).stem),
        params=PhysicalParams(**{k: float(vessel[k]) for k in _SPEC["vessel"]}),
        gains=dict(doc.get("gains") or {}),
        reference=ReferenceInput(
            _signal(doc["reference"]["tau1"], ("reference", "tau1")),
            _signal(doc["reference"]["tau2"], ("reference", "tau2")),
        ),
        vessel_init=_state(doc["initial"]["vessel"], ("initial", "vessel")),
    )
    optional = {
        "rho": ("normalization", "rho"),
        "beta_rule": ("normalization", "beta_rule"),
        "kappa_override": ("normalization", "kappa_override"),
        "initial_units": ("initial", "units"),
        "horizon": ("simulation", "horizon"),
        "step": ("simulation", "step"),
        "control_hold": ("simulation", "control_hold"),
        "seed": ("simulation", "seed"),
        "strict_gains": ("simulation", "strict_gains"),
        "mode": ("feedback", "mode"),
        "harness_F0": ("feedback", "harness", "F0"),
        "harness_lambda": ("feedback", "harness", "lambda"),
        "diff_gain": ("feedback", "differentiator", "gain"),
    }
    for name, path in optional.items():
        value = _get(doc, path)
        if value is not None:
            kwargs[name] = value
    ref_init = _get(doc, ("initial", "reference"))
    if ref_init is not None:
        kwargs["ref_init"] = _state(ref_init, ("initial", "reference"))
    shape = _get(doc, ("feedback", "harness", "shape"))
    if shape is not None:
        kwargs["harness_shape"] = tuple(float(v) for v in shape)
    for name in ("horizon", "step", "harness_F0", "harness_lambda", "diff_gain"):
        if name in kwargs:
            kwargs[name] = float(kwargs[name])
    if "kappa_override" in kwargs:
        kwargs["kappa_override"] = float(kwargs["kappa_override"])
    if "seed" in kwargs:
        kwargs["seed"] = int(kwargs["seed"])
    return Scenario(**kwargs)


def load_scenario(path) -> Scenario:
    """Load a scenario file, or a bundled scenario by name."""
    p = Path(path)
    if not p.exists():
        bundled = resources.files("vesseltrack") / "scenarios" / f"{path}.yaml"
        if bundled.is_file():
            return parse_scenario(bundled.read_text(), str(path))
        raise FileNotFoundError(f"no scenario file or bundled scenario named {str(path)!r}")
    return parse_scenario(p.read_text(), str(p))


def bundled_scenarios() -> list[str]:
    root = resources.files("vesseltrack") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def _signal_doc(sig):
    if isinstance(sig, Schedule):
        return {"times": list(sig.times), "values": list(sig.values)}
    return float(sig)


def scenario_to_dict(s: Scenario) -> dict:
    p = s.params
    return {
        "schema": SCHEMA,
        "name": s.name,
        "vessel": {k: getattr(p, k) for k in _SPEC["vessel"]},
        "normalization": {"rho": s.rho, "beta_rule": s.beta_rule, "kappa_override": s.kappa_override},
        "gains": dict(s.gains),
        "reference": {"tau1": _signal_doc(s.reference.tau1), "tau2": _signal_doc(s.reference.tau2)},
        "initial": {"units": s.initial_units, "vessel": list(s.vessel_init), "reference": list(s.ref_init)},
        "simulation": {
            "horizon": s.horizon,
            "step": s.step,
            "control_hold": s.control_hold,
            "seed": s.seed,
            "strict_gains": s.strict_gains,
        },
        "feedback": {
            "mode": s.mode,
            "harness": {"F0": s.harness_F0, "lambda": s.harness_lambda, "shape": list(s.harness_shape)},
            "differentiator": {"gain": s.diff_gain},
        },
    }


def dump_scenario(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False)


def save_scenario(s: Scenario, path) -> Path:
    path = Path(path)
    path.write_text(dump_scenario(s))
    return path
