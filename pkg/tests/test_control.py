import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vesseltrack import diagnostics as dg
from vesseltrack.control import (
    ConstraintViolation,
    ConstraintWarning,
    ErrorState,
    SaturationBudgetError,
    adopted_ceilings,
    assemble_inputs,
    check_c1,
    error_transform,
    heading_argument,
    output_feedback,
    saturate,
    saturation_potential,
    speed_limsup,
    state_feedback,
    synthesize_gains,
    u1_floor,
    velocity_error_limsup,
    with_ceilings,
)
from vesseltrack.integrate import rk4_step
from vesseltrack.model import MONOHULL, ControlInput, ParameterError, VesselState, derive_primitive_constants, scale_params

K = derive_primitive_constants(MONOHULL)
SP = scale_params(K, K.a / K.d / 4.0)
TAU_RE = ControlInput(10.0, 0.05)


def monohull_gains(**overrides):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstraintWarning)
        return synthesize_gains(SP, overrides, tau_re=TAU_RE)


G, CHECKS = monohull_gains()

reals = st.floats(-1e6, 1e6, allow_nan=False)
moderate = st.floats(-100, 100, allow_nan=False)
errors = st.builds(ErrorState, moderate, moderate, moderate, moderate, moderate, moderate)
states = st.builds(VesselState, moderate, moderate, st.floats(-10, 10), moderate, moderate, moderate)


# --- saturation ---------------------------------------------------------------


@pytest.mark.parametrize("x, y", [(0.0, 0.0), (0.5, 0.5), (-3.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1e300, 1.0)])
def test_saturate_values(x, y):
    assert saturate(x) == y


@given(reals)
def test_saturate_is_odd_and_bounded(x):
    assert saturate(-x) == -saturate(x)
    assert abs(saturate(x)) <= 1.0
    if abs(x) <= 1:
        assert saturate(x) == x


@given(reals, reals)
def test_saturate_is_one_lipschitz(x, y):
    assert abs(saturate(x) - saturate(y)) <= abs(x - y) * (1 + 1e-15) + 1e-300


@pytest.mark.parametrize("x, s", [(0.0, 0.0), (1.0, 0.5), (3.0, 2.5), (-3.0, 2.5), (0.5, 0.125)])
def test_saturation_potential_values(x, s):
    assert saturation_potential(x) == s


@given(st.floats(-50, 50))
def test_saturation_potential_derivative_is_saturation(x):
    h = 1e-6
    fd = (saturation_potential(x + h) - saturation_potential(x - h)) / (2 * h)
    assert fd == pytest.approx(saturate(x), abs=1e-6)


# --- error frame ------------------------------------------------------------------


def test_error_on_reference_is_zero():
    s = VesselState(3.0, -2.0, 1.3, 0.4, 0.1, -0.2)
    assert error_transform(s, s) == ErrorState(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def test_error_with_aligned_reference_is_plain_difference():
    e = error_transform(VesselState(4.0, 1.0, 0.2, 1, 2, 3), VesselState(1.0, -1.0, 0.0, 0, 0, 0))
    assert (e.e_x, e.e_y) == (3.0, 2.0)
    assert (e.e_u, e.e_v, e.e_psi, e.e_r) == (1.0, 2.0, 0.2, 3.0)


def test_error_rotates_into_reference_frame():
    e = error_transform(VesselState(1.0, 0, 0, 0, 0, 0), VesselState(0, 0, math.pi / 2, 0, 0, 0))
    assert e.e_x == pytest.approx(0.0, abs=1e-16)
    assert e.e_y == pytest.approx(-1.0)


def test_heading_error_is_not_wrapped():
    e = error_transform(VesselState(0, 0, 7.0, 0, 0, 0), VesselState(0, 0, -0.5, 0, 0, 0))
    assert e.e_psi == 7.5


@given(states, states, st.floats(-math.pi, math.pi))
def test_feedback_is_invariant_under_earth_frame_rotation(ves, ref, theta):
    c, s = math.cos(theta), math.sin(theta)

    def rot(v):
        return v._replace(x=c * v.x - s * v.y, y=s * v.x + c * v.y, psi=v.psi + theta)

    e0 = error_transform(ves, ref)
    e1 = error_transform(rot(ves), rot(ref))
    np.testing.assert_allclose(e1[:2], e0[:2], atol=1e-9 * (1 + abs(e0.e_x) + abs(e0.e_y)))
    w0 = state_feedback(e0, G)
    w1 = state_feedback(e1, G)
    assert w1[0] == pytest.approx(w0[0], abs=1e-9)
    assert w1[1] == pytest.approx(w0[1], abs=1e-9)


# --- gain synthesis -----------------------------------------------------------------


def test_monohull_gains_and_derived_fields():
    assert G.U1 == pytest.approx(SP.a1 / 2)
    assert G.rho == SP.rho
    assert (G.k1, G.k2, G.U2, G.M) == (10.0, 10.0, 0.1, 0.1)
    assert G.alpha == pytest.approx(100.0)
    assert G.mu == SP.mu and G.xi == SP.xi
    assert G.m_rate == pytest.approx(SP.a1 / 2)


def test_monohull_ledger_main_inequality_passes():
    check = next(c for c in CHECKS if c.name == "a1 > U1 + rho")
    assert check.passed
    assert check.lhs == pytest.approx(1.421, abs=5e-4)
    assert check.rhs == pytest.approx(1.066, abs=5e-4)


def test_monohull_ledger_flags_u1_floor_as_warning():
    check = next(c for c in CHECKS if c.name.startswith("U1 >"))
    assert not check.passed
    assert check.severity == "warning"
    assert check.lhs == pytest.approx(0.7105, abs=1e-4)
    assert check.rhs == pytest.approx(1.247, abs=1e-3)
    assert u1_floor(SP) == check.rhs
    with pytest.warns(ConstraintWarning, match="U1"):
        synthesize_gains(SP, {}, tau_re=TAU_RE)


def test_every_constraint_appears_once():
    names = [c.name for c in CHECKS]
    assert len(names) == len(set(names)) == 8


def test_strict_mode_turns_u1_warning_into_error():
    with pytest.raises(ConstraintViolation, match="U1"):
        synthesize_gains(SP, {}, tau_re=TAU_RE, strict=True)


def test_k1_below_k2_minus_one_is_rejected():
    with pytest.raises(ConstraintViolation) as info:
        monohull_gains(k1=5, k2=7)
    assert [c.name for c in info.value.failures] == ["k1 > k2 - 1"]
    assert len(info.value.checks) == 8


def test_k2_at_most_one_is_rejected():
    with pytest.raises(ConstraintViolation, match="k2 - 1 > 0"):
        monohull_gains(k2=0.5)


def test_identity_overrides_are_checked():
    with pytest.raises(ConstraintViolation, match="mu"):
        monohull_gains(mu=10.0)


def test_unknown_override_is_rejected():
    with pytest.raises(ParameterError, match="gamma"):
        monohull_gains(gamma=1.0)


def test_adopted_ceilings_for_monohull_scenario():
    t1, t2, c0 = adopted_ceilings(SP, G.U1, G.U2, TAU_RE)
    assert t1 == pytest.approx(10.0 + G.U1 + G.rho)
    assert t1 == pytest.approx(11.0656, abs=1e-4)
    r = speed_limsup(t1, SP.a1, G.m_rate, "storage")
    assert t2 == pytest.approx(0.05 + 0.1 + abs(SP.beta) * r**2)
    assert c0 == pytest.approx(2 * r)


@given(st.floats(-50, 50), st.floats(1e-3, 5), st.floats(1e-3, 5), st.sampled_from([-1.0, 1.0]))
def test_fully_saturated_surge_demand_fits_its_ceiling(tau1_re, U1, rho, sign):
    sp = replace(SP, rho=rho)
    t1, t2, _ = adopted_ceilings(sp, U1, 0.1, ControlInput(tau1_re, 0.0))
    g = replace(G, U1=U1, rho=rho)
    w1, _ = state_feedback(ErrorState(sign * 1e9, 0, sign * 1e9, 0, 0, 0), g)
    ref = VesselState(0, 0, 0, 0, 0, 0)
    assemble_inputs(w1, 0.0, (0.0, 0.0), ref, ControlInput(tau1_re, 0.0), 0.0, (t1, t2))


def test_speed_bound_forms():
    assert speed_limsup(4.0, 2.0, 0.5) == pytest.approx(2.0)
    assert speed_limsup(4.0, 2.0, 0.5, "storage") == pytest.approx(2.0 * math.sqrt(2.0))
    # the surge equilibrium tau/a1 sits exactly on the storage radius when m = a1/2
    assert speed_limsup(10.0, SP.a1, SP.a1 / 2, "storage") == pytest.approx(10.0 / SP.a1)
    with pytest.raises(ParameterError):
        speed_limsup(1.0, 1.0, 1.0, "other")


def test_velocity_error_bound_is_positive():
    a_t = min(SP.a1, SP.b1 / SP.c)
    assert velocity_error_limsup(SP) == pytest.approx(SP.rho / math.sqrt(min(a_t / 2, SP.b1) * a_t))


# --- condition C1 ----------------------------------------------------------------------


def test_c1_with_zero_munk_is_trivially_satisfied():
    sp0 = scale_params(K, SP.rho, kappa_override=0.0)
    rep = check_c1(G, sp0)
    assert rep.lhs == 0.0 and rep.satisfied


def test_c1_for_monohull_scenario():
    rep = check_c1(G, SP)
    m = min(SP.a1 / 2, SP.b1)
    assert rep.lhs == SP.beta * G.tau1_max**2 / (SP.a1 * m)
    assert rep.rhs == G.tau2_max
    assert rep.satisfied == (rep.lhs < rep.rhs) and rep.satisfied
    assert rep.rho_floor > 0


def test_c1_scaling_with_rho_under_each_munk_rule():
    for rule, factor in (("inverse", 0.25), ("exact", 4.0)):
        sp1 = scale_params(K, 0.2, beta_rule=rule)
        sp2 = scale_params(K, 0.4, beta_rule=rule)
        assert check_c1(G, sp2).lhs == pytest.approx(factor * check_c1(G, sp1).lhs, rel=1e-14)


def test_c1_rejects_non_positive_ceilings():
    with pytest.raises(ParameterError):
        check_c1(with_ceilings(G, 0.0, 1.0), SP)


# --- feedback laws ---------------------------------------------------------------------


def test_zero_error_gives_zero_feedback():
    assert state_feedback(ErrorState(0, 0, 0, 0, 0, 0), G) == (0.0, 0.0)
    assert output_feedback(ErrorState(0, 0, 0, 0, 0, 0), (0.0, 0.0, 0.0), G) == (0.0, 0.0)


def test_large_errors_saturate_surge_feedback():
    w1, w2 = state_feedback(ErrorState(1e9, 0, 1e9, 0, -1e9, 0), G)
    assert w1 == pytest.approx(-(G.U1 + G.rho), rel=1e-15)
    assert w2 == G.U2


def test_heading_argument_boundary():
    assert heading_argument(0.01, 0.0, G) == pytest.approx(1.0)
    w2 = state_feedback(ErrorState(0, 0, 0, 0, 0.01, 0), G)[1]
    assert w2 == pytest.approx(-0.1)


@given(errors)
def test_feedback_is_bounded(e):
    w1, w2 = state_feedback(e, G)
    assert abs(w1) <= G.U1 + G.rho
    assert abs(w2) <= G.U2


@given(errors)
def test_perfect_estimates_reduce_to_state_feedback(e):
    assert output_feedback(e, (e.e_u, e.e_v, e.e_r), G) == state_feedback(e, G)


@given(errors, st.floats(-1, 1))
def test_estimation_error_moves_surge_feedback_by_a_bounded_amount(e, f):
    w_true = state_feedback(e, G)[0]
    w_est = output_feedback(e, (e.e_u + f, e.e_v, e.e_r), G)[0]
    # xi |f| from the first term plus rho M |f| / mu from the second
    assert abs(w_est - w_true) <= (abs(G.xi) + G.rho * G.M / G.mu) * abs(f) + 1e-12


def test_estimate_offset_of_one_tenth():
    e = ErrorState(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    dw = abs(output_feedback(e, (0.1, 0.0, 0.0), G)[0] - state_feedback(e, G)[0])
    assert dw <= abs(G.xi) * 0.1 + G.rho * G.M * 0.1 / G.mu


def test_output_feedback_ignores_pose_error_velocity_fields():
    e = ErrorState(1.0, 2.0, 99.0, 99.0, 0.003, 99.0)
    assert output_feedback(e, (0.1, 0.2, 0.3), G) == state_feedback(e._replace(e_u=0.1, e_v=0.2, e_r=0.3), G)


# --- input assembly ------------------------------------------------------------------------


def test_feedforward_only_on_reference():
    ref = VesselState(0, 0, 0, 7.0, 0.05, 0.05)
    assert assemble_inputs(0.0, 0.0, (ref.u, ref.v), ref, TAU_RE, SP.beta) == ControlInput(10.0, 0.05)


def test_zero_munk_coefficient_drops_cancellation():
    ref = VesselState(0, 0, 0, 1.0, 2.0, 0.0)
    tau = assemble_inputs(0.3, -0.04, (5.0, -3.0), ref, TAU_RE, 0.0)
    assert tau == ControlInput(10.3, 0.05 - 0.04)


def test_munk_cancellation_term():
    ref = VesselState(0, 0, 0, 1.0, 2.0, 0.0)
    tau = assemble_inputs(0.0, 0.0, (5.0, -3.0), ref, TAU_RE, 0.5)
    assert tau.tau2 == 0.05 - 0.5 * (-15.0 - 2.0)


def test_ceiling_overrun_raises():
    ref = VesselState(0, 0, 0, 0, 0, 0)
    with pytest.raises(SaturationBudgetError):
        assemble_inputs(0.0, 0.0, (1.0, 1.0), ref, ControlInput(12.0, 0.0), 0.0, (G.tau1_max, G.tau2_max))


@given(errors, st.floats(-8, 8), st.floats(-8, 8))
def test_assembled_inputs_respect_saturated_structure(e, u, v):
    ref = VesselState(0, 0, 0, 7.0, 0.05, 0.05)
    w1, w2 = state_feedback(e, G)
    tau = assemble_inputs(w1, w2, (u, v), ref, TAU_RE, SP.beta)
    assert abs(tau.tau1 - TAU_RE.tau1) <= G.U1 + G.rho + 1e-12
    assert abs(tau.tau2 - TAU_RE.tau2 + SP.beta * (u * v - ref.u * ref.v)) <= G.U2 + 1e-12


# --- heading Lyapunov function ------------------------------------------------------------------


@pytest.mark.parametrize("e0", [(0.0005, 0.0), (2.0, -1.0), (-30.0, 4.0)])
def test_heading_lyapunov_decreases_along_closed_loop(e0):
    h = 1e-3

    def f(t, x, _):
        z = heading_argument(x[0], x[1], G)
        return (x[1], -x[1] - G.U2 * saturate(z))

    xs = [e0]
    for k in range(20000):
        xs.append(rk4_step(f, k * h, xs[-1], None, h))
    xs = np.array(xs)
    V, z = dg.yaw_lyapunov(xs[:, 0], xs[:, 1], G)
    Vdot = dg.centered_difference(V, h)
    bound = dg.yaw_lyapunov_rate(xs[1:-1, 1], z[1:-1], G)
    ok = Vdot <= bound + 10 * h**2
    assert ok.mean() >= 0.999
    assert np.all(np.diff(V) <= 1e-12)
