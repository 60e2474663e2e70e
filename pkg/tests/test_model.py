import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vesseltrack.model import (
    A1,
    MONOHULL,
    ControlInput,
    ParameterError,
    PhysicalParams,
    VesselState,
    ZERO_STATE,
    coupling_matrix,
    denormalize_input,
    denormalize_state,
    derive_primitive_constants,
    munk_coefficient,
    normalize_input,
    normalize_state,
    normalized_coupling,
    normalized_derivative,
    physical_derivative,
    rotation,
    scale_params,
)

K = derive_primitive_constants(MONOHULL)
SP = scale_params(K, K.a / K.d / 4.0)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
states = st.builds(VesselState, finite, finite, st.floats(-10, 10), finite, finite, finite)
inputs = st.builds(ControlInput, finite, finite)


# --- constants ----------------------------------------------------------------


def test_monohull_primitive_constants_match_listing():
    assert K.a == pytest.approx(0.179, abs=5e-4)
    assert K.b == pytest.approx(0.561, abs=5e-4)
    assert K.c == pytest.approx(0.694, abs=5e-4)
    assert K.d == pytest.approx(0.126, abs=5e-4)


def test_kappa_is_signed_and_matches_listed_magnitude():
    assert K.kappa == pytest.approx((120e3 - 172.9e3) / 636e5, rel=1e-15)
    assert K.kappa < 0
    assert abs(K.kappa) == pytest.approx(8.32e-4, abs=5e-7)


def test_equal_masses_give_zero_kappa_and_beta():
    p = PhysicalParams(m1=1e5, m2=1e5, m3=1e6, d1=1e3, d2=1e3, d3=1e4)
    k = derive_primitive_constants(p)
    assert k.kappa == 0.0
    for rho in (0.1, 1.0, 7.0):
        assert scale_params(k, rho).beta == 0.0


@pytest.mark.parametrize("name", ["m1", "m2", "m3", "d1", "d2", "d3"])
@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_physical_params_reject_non_positive(name, bad):
    values = dict(m1=1.0, m2=1.0, m3=1.0, d1=1.0, d2=1.0, d3=1.0)
    values[name] = bad
    with pytest.raises(ParameterError, match=name):
        PhysicalParams(**values)


def test_scaled_constants_for_monohull():
    assert SP.a1 == pytest.approx(1.421, abs=5e-4)
    assert SP.b1 == pytest.approx(4.449, abs=5e-4)
    assert SP.rho == pytest.approx(0.3553, abs=1e-4)
    assert SP.mu == pytest.approx(b1_over_crho(SP), rel=1e-15)
    assert SP.mu == pytest.approx(18.04, abs=0.01)
    assert SP.xi == pytest.approx(4.990, abs=1e-3)


def b1_over_crho(sp):
    return sp.b1 / (sp.c * sp.rho)


@pytest.mark.parametrize("rho", [0.05, 0.3553, 1.0, 4.0])
def test_controller_identities_hold_for_any_rho(rho):
    sp = scale_params(K, rho)
    assert sp.a1 + sp.xi == pytest.approx(sp.mu * sp.rho, rel=1e-12)
    assert sp.b1 == pytest.approx(sp.mu * sp.c * sp.rho, rel=1e-12)
    assert sp.a1 == pytest.approx(1.421, abs=5e-4)


@pytest.mark.parametrize("rho", [0.0, -0.1, float("nan")])
def test_scale_params_rejects_bad_rho(rho):
    with pytest.raises(ParameterError, match="rho"):
        scale_params(K, rho)


def test_beta_rules():
    rho = 0.3553
    assert munk_coefficient(K.kappa, K.c, rho, "exact") == K.kappa * K.c * rho**2
    assert munk_coefficient(K.kappa, K.c, rho, "inverse") == K.kappa / (K.c * rho**2)
    assert scale_params(K, rho, beta_rule="inverse").beta == pytest.approx(-9.498e-3, rel=1e-3)
    with pytest.raises(ParameterError):
        munk_coefficient(K.kappa, K.c, rho, "other")


def test_kappa_override_replaces_signed_value():
    sp = scale_params(K, 0.3553, kappa_override=8.32e-4)
    assert sp.kappa == 8.32e-4
    assert sp.beta > 0


# --- matrices -------------------------------------------------------------------


def test_normalized_coupling_is_rotation_generator():
    for rho in (0.1, 0.3553, 2.0):
        np.testing.assert_allclose(normalized_coupling(K.c, rho), [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)
    np.testing.assert_array_equal(A1, [[0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(coupling_matrix(2.0), [[0.0, -0.5], [2.0, 0.0]])


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_a1_is_skew_with_unit_spectral_radius(p, q):
    w = np.array([p, q])
    assert abs(w @ A1 @ w) <= 1e-12 * (w @ w)
    np.testing.assert_array_equal(A1.T, -A1)
    assert max(abs(np.linalg.eigvals(A1))) == pytest.approx(1.0)


# --- derivatives ----------------------------------------------------------------


def test_zero_state_is_equilibrium():
    assert physical_derivative(ZERO_STATE, ControlInput(0.0, 0.0), K) == ZERO_STATE
    assert normalized_derivative(ZERO_STATE, ControlInput(0.0, 0.0), SP) == ZERO_STATE


def test_physical_surge_decay():
    d = physical_derivative(VesselState(0, 0, 0, 1.0, 0, 0), ControlInput(0.0, 0.0), K)
    assert d.x == 1.0 and d.y == 0.0
    assert d.u == -K.a
    assert d.r == 0.0


def test_physical_hand_evaluation():
    d = physical_derivative(VesselState(0, 0, 0, 1.0, 1.0, 1.0), ControlInput(0.0, 0.0), K)
    assert d.u == pytest.approx(1.0 / K.c - K.a, rel=1e-14)
    assert d.v == pytest.approx(-K.c - K.b, rel=1e-14)
    assert d.r == pytest.approx(K.kappa - K.d, rel=1e-14)
    assert d.psi == 1.0
    assert d.u == pytest.approx(1 / 0.694 - 0.179, abs=2e-3)


def test_normalized_surge_decay():
    d = normalized_derivative(VesselState(0, 0, 0, 1.0, 0, 0), ControlInput(0.0, 0.0), SP)
    assert d.x == SP.rho and d.y == 0.0
    assert d.u == -SP.a1


def test_non_finite_state_is_rejected():
    with pytest.raises(ParameterError):
        normalized_derivative(VesselState(0, 0, 0, float("nan"), 0, 0), ControlInput(0.0, 0.0), SP)
    with pytest.raises(ParameterError):
        physical_derivative(ZERO_STATE, ControlInput(float("inf"), 0.0), K)


@given(states, inputs, st.floats(-math.pi, math.pi))
def test_physical_derivative_is_rotation_equivariant(s, tau, theta):
    R = rotation(theta)
    x2, y2 = R @ [s.x, s.y]
    d0 = physical_derivative(s, tau, K)
    d1 = physical_derivative(s._replace(x=x2, y=y2, psi=s.psi + theta), tau, K)
    np.testing.assert_allclose([d1.x, d1.y], R @ [d0.x, d0.y], atol=1e-9)
    np.testing.assert_allclose(d1[2:], d0[2:], rtol=0, atol=0)


@given(states, st.floats(-50, 50))
def test_velocity_subsystem_is_passive(s, tau2):
    d = normalized_derivative(s, ControlInput(0.0, tau2), SP)
    dV = s.u * d.u + s.v * d.v
    bound = -min(SP.a1, SP.b1) * (s.u**2 + s.v**2)
    assert dV <= bound + 1e-9 * (1 + abs(bound))


# --- unit conversions -------------------------------------------------------------


def test_physical_surge_maps_to_normalized_units():
    s = normalize_state(VesselState(0, 0, 0, 50.0, 0, 0), SP)
    assert s.u == pytest.approx(50.0 / (SP.d * SP.rho), rel=1e-15)
    assert s.u == pytest.approx(1117, rel=2e-3)


def test_zero_state_normalizes_to_zero():
    assert normalize_state(ZERO_STATE, SP) == ZERO_STATE


@given(states)
def test_state_round_trip(s):
    back = denormalize_state(normalize_state(s, SP), SP)
    np.testing.assert_allclose(back, s, rtol=1e-12, atol=1e-300)
    assert back[:3] == s[:3]


@given(inputs)
def test_input_round_trip(tau):
    np.testing.assert_allclose(denormalize_input(normalize_input(tau, SP), SP), tau, rtol=1e-12)


@settings(max_examples=50)
@given(states, inputs)
def test_normalized_model_is_exact_change_of_variables(s, tau_bar):
    """d/ds of the normalized state equals the scaled physical derivative."""
    n = normalize_state(s, SP)
    dn = normalized_derivative(n, normalize_input(tau_bar, SP), SP)
    dp = physical_derivative(s, tau_bar, K)
    # pose: d/ds = (1/d) d/dt, velocities scale like the state
    expected = (
        dp.x / SP.d,
        dp.y / SP.d,
        dp.psi / SP.d,
        dp.u / (SP.d * SP.rho) / SP.d,
        dp.v / (SP.d * SP.c * SP.rho) / SP.d,
        dp.r / SP.d / SP.d,
    )
    scale = 1.0 + max(abs(v) for v in expected)
    np.testing.assert_allclose(dn, expected, rtol=1e-9, atol=1e-9 * scale)


def test_inverse_munk_rule_breaks_the_change_of_variables():
    sp = scale_params(K, SP.rho, beta_rule="inverse")
    s = VesselState(0.0, 0.0, 0.0, 5.0, 5.0, 0.0)
    n = normalize_state(s, sp)
    dn = normalized_derivative(n, ControlInput(0.0, 0.0), sp)
    dp = physical_derivative(s, ControlInput(0.0, 0.0), K)
    assert abs(dn.r - dp.r / sp.d**2) > 1e-3 * abs(dp.r / sp.d**2)
