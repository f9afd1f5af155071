"""Normal-mode rotation and effective-coupling oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrdimer import CircuitParams, cooperativities, effective_couplings, hybridize
from kerrdimer.meanfield import MeanFieldSolution
from kerrdimer.model_core import PumpTone, kerr_shifted_frequencies

TWO_PI = 2.0 * math.pi


def _mf_single(a_l, a_r, omega_g=1.0):
    return MeanFieldSolution(
        alpha_L_g=a_l, alpha_R_g=a_r, alpha_L_c=None, alpha_R_c=None,
        n_L=abs(a_l) ** 2, n_R=abs(a_r) ** 2, residual=0.0,
        branch_id=0, omega_g=omega_g)


circuit_st = st.builds(
    CircuitParams,
    omega_L=st.floats(1e9, 9e9).map(lambda f: TWO_PI * f),
    omega_R=st.floats(9e9, 12e9).map(lambda f: TWO_PI * f),
    J=st.floats(1e6, 5e8).map(lambda f: TWO_PI * f),
    kappa=st.floats(1e6, 1e8).map(lambda f: TWO_PI * f),
    gamma=st.floats(0.0, 1e6).map(lambda f: TWO_PI * f),
    K_L=st.floats(1e2, 1e5).map(lambda f: -TWO_PI * f),
    K_R=st.floats(1e2, 1e5).map(lambda f: -TWO_PI * f),
)


@settings(max_examples=80, deadline=None)
@given(circuit_st)
def test_hybridize_matches_linear_eigenproblem(params):
    """Mode frequencies are the eigenvalues of the 2x2 hopping matrix."""
    hyb = hybridize(params)
    h = np.array([[params.omega_L, params.J], [params.J, params.omega_R]])
    w = np.linalg.eigvalsh(h)
    assert hyb.omega_a == pytest.approx(w[0], rel=1e-12)
    assert hyb.omega_b == pytest.approx(w[1], rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(circuit_st)
def test_hybridize_sum_rules(params):
    hyb = hybridize(params)
    # Trace and determinant of the linear block, and the damping split.
    assert hyb.omega_a + hyb.omega_b == pytest.approx(
        params.omega_L + params.omega_R, rel=1e-12)
    assert hyb.omega_a * hyb.omega_b == pytest.approx(
        params.omega_L * params.omega_R - params.J ** 2, rel=1e-12)
    assert hyb.kappa_a + hyb.kappa_b == pytest.approx(params.kappa, rel=1e-12)
    assert 0.0 < hyb.kappa_a <= hyb.kappa_b
    assert math.pi / 4 <= hyb.theta <= math.pi / 2


def test_hybridize_symmetric_limit():
    k = TWO_PI * 44e6
    params = CircuitParams(
        omega_L=TWO_PI * 8.3e9, omega_R=TWO_PI * 8.3e9, J=0.4 * k,
        kappa=k, gamma=0.0, K_L=-TWO_PI * 3e3, K_R=-TWO_PI * 3e3, kappa_R=k)
    hyb = hybridize(params)
    assert hyb.theta == pytest.approx(math.pi / 4, rel=1e-12)
    assert hyb.omega_b - hyb.omega_a == pytest.approx(2.0 * params.J, rel=1e-12)
    assert hyb.kappa_a == pytest.approx(hyb.kappa_b, rel=1e-12)
    # Equal Kerr on both sites: the collective coefficients collapse to
    # K_aa = K_bb = (K_L + K_R)/4 and K_ab = K_L + K_R.
    assert hyb.K_aa == pytest.approx((params.K_L + params.K_R) / 4.0, rel=1e-12)
    assert hyb.K_bb == pytest.approx(hyb.K_aa, rel=1e-12)
    assert hyb.K_ab == pytest.approx(params.K_L + params.K_R, rel=1e-12)


def test_parameter_validation():
    k = TWO_PI * 44e6
    with pytest.raises(ValueError):
        CircuitParams(omega_L=2.0, omega_R=1.0, J=1.0, kappa=k, gamma=0.0,
                      K_L=-1.0, K_R=-1.0)
    with pytest.raises(ValueError):
        CircuitParams(omega_L=1.0, omega_R=2.0, J=1.0, kappa=k, gamma=0.0,
                      K_L=1.0, K_R=-1.0)
    with pytest.raises(ValueError):
        PumpTone(frequency=1.0, power=-1e-9)


def test_kerr_shift_zero_population(device):
    hyb = hybridize(device)
    wt_a, wt_b = kerr_shifted_frequencies(device, _mf_single(0.0j, 0.0j))
    assert wt_a == pytest.approx(hyb.omega_a, rel=1e-15)
    assert wt_b == pytest.approx(hyb.omega_b, rel=1e-15)


def test_kerr_shift_pulls_down(device):
    """Negative Kerr pulls both modes down, by 2 K per photon at most."""
    wt_a, wt_b = kerr_shifted_frequencies(device, _mf_single(10.0 + 0j, 5.0j))
    hyb = hybridize(device)
    assert wt_a < hyb.omega_a
    assert wt_b < hyb.omega_b


def test_effective_couplings_symmetric_oracle():
    """Hand-computed couplings at theta = pi/4 with a simple mean field."""
    k = TWO_PI * 44e6
    params = CircuitParams(
        omega_L=TWO_PI * 8.3e9, omega_R=TWO_PI * 8.3e9, J=0.4 * k,
        kappa=k, gamma=0.0, K_L=-TWO_PI * 3e3, K_R=-TWO_PI * 3e3, kappa_R=k)
    a_l, a_r = 20.0 + 0j, 10.0j
    mf = _mf_single(a_l, a_r, omega_g=TWO_PI * 8.3e9)
    c = effective_couplings(params, mf, frame="single-pump")
    K = params.K_L
    # theta = pi/4: sin^2 = cos^2 = 1/2, sin(2 theta) = 1.
    assert c.lambda_S_a == pytest.approx(0.25 * K * (a_l ** 2 + a_r ** 2), rel=1e-12)
    assert c.lambda_S_b == pytest.approx(c.lambda_S_a, rel=1e-12)
    assert c.lambda_TMS == pytest.approx(-0.5 * K * (a_l ** 2 - a_r ** 2), rel=1e-12)
    assert c.lambda_BS == pytest.approx(-K * (abs(a_l) ** 2 - abs(a_r) ** 2), rel=1e-12)
    assert c.frame == mf.omega_g


def test_effective_couplings_residual_gate(device):
    bad = MeanFieldSolution(
        alpha_L_g=1.0 + 0j, alpha_R_g=0j, alpha_L_c=None, alpha_R_c=None,
        n_L=1.0, n_R=0.0, residual=1e-3, branch_id=0, omega_g=1.0)
    with pytest.raises(ValueError, match="residual"):
        effective_couplings(device, bad, frame="single-pump")


def test_effective_couplings_two_pump_needs_conversion_tone(device):
    with pytest.raises(ValueError, match="conversion"):
        effective_couplings(device, _mf_single(1.0 + 0j, 0j), frame="two-pump")


def test_cooperativities_formula():
    from kerrdimer.model_core import EffectiveCouplings

    c = EffectiveCouplings(delta_a=0.0, delta_b=0.0, lambda_S_a=0.5,
                           lambda_S_b=0.25, lambda_TMS=1.0 + 1.0j,
                           lambda_BS=3.0, frame=0.0)
    co = cooperativities(c, 2.0)
    assert co.C_TMS == pytest.approx(2.0, rel=1e-12)
    assert co.C_BS == pytest.approx(9.0, rel=1e-12)
    assert co.C_S_a == pytest.approx(0.25, rel=1e-12)
    assert co.C_S_b == pytest.approx(0.0625, rel=1e-12)
    with pytest.raises(ValueError):
        cooperativities(c, 0.0)
