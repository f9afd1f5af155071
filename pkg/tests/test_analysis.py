"""Operating-point construction and scan helpers."""

import math

import numpy as np
import pytest

from kerrdimer import (
    PumpTone,
    drift_matrix,
    gain_zero_freq_closed_form,
    hybridize,
    kerr_shifted_frequencies,
)
from kerrdimer.analysis import (
    balanced_couplings,
    eigenvalue_sweep,
    gbw_scan,
    kappa_equivalent,
    retune_double_pump,
    retune_single_pump,
)
from kerrdimer.meanfield import _dp_residual_vec, _single_pump_residual
from kerrdimer.model_core import effective_couplings
from kerrdimer.serialize import dbm_to_watts

TWO_PI = 2.0 * math.pi


def test_kappa_equivalent():
    assert kappa_equivalent(1.0, 1.0) == pytest.approx(1.0)
    assert kappa_equivalent(2.0, 0.0) == pytest.approx(0.0)
    # Harmonic mean of 1 and 3 is 1.5.
    assert kappa_equivalent(1.0, 3.0) == pytest.approx(1.5)


def test_balanced_couplings_cooperativity_round_trip():
    kappa = 2.7
    c = balanced_couplings(1.3, 0.4, kappa, C_S=0.9)
    assert 4.0 * abs(c.lambda_TMS) ** 2 / kappa ** 2 == pytest.approx(1.3)
    assert 4.0 * abs(c.lambda_BS) ** 2 / kappa ** 2 == pytest.approx(0.4)
    assert 4.0 * abs(c.lambda_S_a) ** 2 / kappa ** 2 == pytest.approx(0.9)
    assert c.delta_a == pytest.approx(-2.0 * c.lambda_S_a)
    assert c.delta_b == pytest.approx(-c.delta_a)


def test_eigenvalue_sweep_labels():
    rows = eigenvalue_sweep(1.0, [-1.0, 0.0, 0.5, 1.5])
    labels = [r["classification"] for r in rows]
    assert labels == ["BP", "EP", "stable", "unstable"]
    for r in rows:
        # Numeric spectrum tracks the closed form.
        num = np.sort(r["eigenvalues"].real)
        cf = np.sort(r["closed_form"].real)
        assert np.allclose(num, cf, atol=1e-7)


@pytest.mark.parametrize("mode", ["SP", "EP", "BP"])
def test_gbw_scan_quadrature_hits_targets(mode):
    rows = gbw_scan(mode, [10.0, 20.0], kappa=1.0, model="quadrature")
    for row, target in zip(rows, [10.0, 20.0]):
        assert row["G0_dB"] == pytest.approx(target, abs=0.1)
        assert row["BW"] > 0.0
        assert row["n_peaks"] >= 1


def test_gbw_scan_bp_beats_ep_bandwidth():
    ep, bp = (gbw_scan(m, [20.0], kappa=1.0)[0] for m in ("EP", "BP"))
    assert bp["BW"] > 2.0 * ep["BW"]


def test_gbw_scan_closed_form_consistency():
    row = gbw_scan("BP", [15.0], kappa=1.0)[0]
    c_t, c_b = row["C_TMS"], row["C_BS"]
    g_cf = gain_zero_freq_closed_form(0.5 * c_t, c_t, c_b)
    assert 10.0 * math.log10(g_cf) == pytest.approx(row["G0_dB"], abs=0.05)


def test_retune_single_pump_places_tone_between_modes(device):
    power = dbm_to_watts(-80.0)
    mf, wt_a, wt_b = retune_single_pump(device, power)
    # The tone sits at the midpoint of the previous iterate; the fixed
    # point is converged to within the frequency tolerance of the loop.
    assert mf.omega_g == pytest.approx(0.5 * (wt_a + wt_b),
                                       abs=2e-7 * device.kappa)
    wa, wb = kerr_shifted_frequencies(device, mf)
    assert wa == pytest.approx(wt_a, abs=1e-7 * device.kappa * 10)
    assert wb == pytest.approx(wt_b, abs=1e-7 * device.kappa * 10)
    # Negative Kerr pulls the modes down.
    hyb = hybridize(device)
    assert wt_a < hyb.omega_a
    assert wt_b < hyb.omega_b
    assert mf.residual < 1e-9
    res = _single_pump_residual(device, mf.omega_g, mf.alpha_L_g,
                                mf.alpha_R_g,
                                PumpTone(mf.omega_g, power).input_amplitude())
    assert res < 1e-9


def test_retune_double_pump_balance(device):
    p_g = dbm_to_watts(-76.0)
    p_c = dbm_to_watts(-80.0)
    mf, wt_a, wt_b = retune_double_pump(device, p_g, p_c)
    # Gain tone at the midpoint, conversion tone mirrored across it so
    # the pair straddles the shifted modes symmetrically.
    assert mf.omega_g == pytest.approx(0.5 * (wt_a + wt_b), rel=1e-12)
    assert mf.omega_c == pytest.approx(mf.omega_g + wt_a - wt_b, rel=1e-12)
    # Re-substitute into the coupled two-tone equations.
    ain_g = PumpTone(mf.omega_g, p_g).input_amplitude()
    ain_c = PumpTone(mf.omega_c, p_c).input_amplitude()
    z = np.array([mf.alpha_L_g, mf.alpha_R_g, mf.alpha_L_c, mf.alpha_R_c])
    r = _dp_residual_vec(z, device, mf.omega_g, mf.omega_c, ain_g, ain_c)
    assert np.abs(r).max() < 1e-6 * device.kappa * max(np.abs(z).max(), 1.0)
    c = effective_couplings(device, mf, frame="two-pump")
    # The two-pump frame (omega_g + omega_c)/2 lands on the lower
    # shifted mode with this placement.
    assert abs(c.delta_a) < 1e-6 * device.kappa
    assert c.delta_b == pytest.approx(wt_a - wt_b, abs=1e-6 * device.kappa)


def test_gbw_scan_rejects_unknown_mode():
    with pytest.raises(ValueError):
        gbw_scan("XX", [10.0])


def test_drift_matrix_from_balanced_is_stable_below_threshold():
    c = balanced_couplings(0.8, 0.3, 1.0)
    ev = np.linalg.eigvals(drift_matrix(c, 1.0).entries)
    assert ev.real.max() < 0.0
