"""Saturated global tracking control for an underactuated surface vessel."""
from .control import (
    ControllerGains,
    ErrorState,
    check_c1,
    error_transform,
    output_feedback,
    saturate,
    saturation_potential,
    state_feedback,
    synthesize_gains,
)
from .model import MONOHULL, PhysicalParams, VesselState, derive_primitive_constants, scale_params
from .sim import RunRecord, Scenario, prepare, run, sweep

__all__ = [
    "MONOHULL",
    "ControllerGains",
    "ErrorState",
    "PhysicalParams",
    "RunRecord",
    "Scenario",
    "VesselState",
    "check_c1",
    "derive_primitive_constants",
    "error_transform",
    "output_feedback",
    "prepare",
    "run",
    "saturate",
    "saturation_potential",
    "scale_params",
    "state_feedback",
    "sweep",
    "synthesize_gains",
]
__version__ = "0.1.0"
