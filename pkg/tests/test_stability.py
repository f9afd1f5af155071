"""Drift and harmonic-balance matrix oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrdimer import (
    PumpTone,
    classify,
    drift_matrix,
    eigenvalues_closed_form,
    floquet_matrix,
    select_branch,
    solve_single_pump,
)
from kerrdimer.analysis import balanced_couplings
from kerrdimer.model_core import EffectiveCouplings
from kerrdimer.stability import drift_matrix_complex, quadrature_transform

TWO_PI = 2.0 * math.pi


def _real_coupling_matrix(da, db, lsa, lsb, lt, lb, kappa):
    """Direct transcription of the quadrature drift for real couplings."""
    return np.array([
        [-kappa / 2, -(da + 2 * lsa), 0.0, lt - lb],
        [da - 2 * lsa, -kappa / 2, lt + lb, 0.0],
        [0.0, lt - lb, -kappa / 2, -(db + 2 * lsb)],
        [lt + lb, 0.0, db - 2 * lsb, -kappa / 2],
    ])


real_couplings_st = st.tuples(
    st.floats(-1.5, 1.5), st.floats(-1.5, 1.5),
    st.floats(-0.8, 0.8), st.floats(-0.8, 0.8),
    st.floats(-1.0, 1.0), st.floats(-1.0, 1.0),
)


@settings(max_examples=100, deadline=None)
@given(real_couplings_st)
def test_drift_matrix_real_transcription(vals):
    da, db, lsa, lsb, lt, lb = vals
    c = EffectiveCouplings(delta_a=da, delta_b=db, lambda_S_a=lsa,
                           lambda_S_b=lsb, lambda_TMS=lt, lambda_BS=lb,
                           frame=0.0)
    dm = drift_matrix(c, 1.0)
    assert np.allclose(dm.entries, _real_coupling_matrix(da, db, lsa, lsb, lt, lb, 1.0),
                       atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(real_couplings_st, st.floats(0.0, TWO_PI), st.floats(0.0, TWO_PI))
def test_complex_and_quadrature_spectra_agree(vals, ph1, ph2):
    da, db, lsa, lsb, lt, lb = vals
    c = EffectiveCouplings(
        delta_a=da, delta_b=db,
        lambda_S_a=lsa * np.exp(1j * ph1), lambda_S_b=lsb,
        lambda_TMS=lt * np.exp(1j * ph2), lambda_BS=lb, frame=0.0)
    a = drift_matrix_complex(c, 1.0)
    m = drift_matrix(c, 1.0).entries.astype(complex)
    # Compare characteristic polynomials: eigenvalues themselves are
    # ill-conditioned at the degenerate (exceptional) points.
    assert np.allclose(np.poly(a), np.poly(m), rtol=1e-9, atol=1e-9)


def test_quadrature_transform_is_unitary():
    u = quadrature_transform()
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-14)


def test_closed_form_eigenvalues_structure():
    ev = eigenvalues_closed_form(2.0, 1.0, 1.0)
    # gap +1: real pair at -1 and 0 (threshold), each doubled.
    assert np.allclose(sorted(ev.real), [-1.0, -1.0, 0.0, 0.0], atol=1e-12)
    ev = eigenvalues_closed_form(0.0, 1.0, 1.0)
    # gap -1: -1/2 +/- i/2.
    assert np.allclose(np.abs(ev.real), 0.5, atol=1e-12)
    assert np.allclose(np.abs(ev.imag), 0.5, atol=1e-12)


def test_classify_labels():
    kappa = 1.0
    cases = {
        0.0: "EP",
        -1.0: "BP",
        0.5: "stable",
        1.5: "unstable",
    }
    for gap, label in cases.items():
        c_t, c_b = max(gap, 0.0), max(-gap, 0.0)
        c = balanced_couplings(c_t, c_b, kappa)
        report = classify(drift_matrix(c, kappa), c)
        assert report.classification == label, (gap, report.classification)
        assert report.coop_gap == pytest.approx(gap, abs=1e-12)
        assert report.balanced


def test_classify_unbalanced_is_plain_stable():
    c = EffectiveCouplings(delta_a=0.3, delta_b=0.1, lambda_S_a=0.05,
                           lambda_S_b=0.2, lambda_TMS=0.1, lambda_BS=0.1,
                           frame=0.0)
    report = classify(drift_matrix(c, 1.0), c)
    assert report.classification == "stable"
    assert not report.balanced


def test_floquet_single_pump_block_diagonal(device):
    tone = PumpTone(device.omega_L, 1e-3 * 10 ** (-80.0 / 10.0))
    mf = select_branch(solve_single_pump(device, tone))
    fm = floquet_matrix(device, mf, N=2, omega=0.0)
    m = fm.entries
    assert fm.delta_p == 0.0
    for bm in range(5):
        for bn in range(5):
            if bm == bn:
                continue
            blk = m[4 * bm:4 * bm + 4, 4 * bn:4 * bn + 4]
            assert np.all(blk == 0.0)


def test_floquet_truncation_irrelevant_for_single_pump(device):
    """With one pump the harmonics decouple, so the port reflection is
    independent of the truncation order."""
    from kerrdimer.response import floquet_reflection

    tone = PumpTone(device.omega_L, 1e-3 * 10 ** (-78.0 / 10.0))
    mf = select_branch(solve_single_pump(device, tone))
    w = device.omega_L + 0.7 * device.kappa
    r1 = floquet_reflection(device, mf, w, N=1)
    r3 = floquet_reflection(device, mf, w, N=3)
    assert r1 == pytest.approx(r3, rel=1e-10)


def test_floquet_requires_positive_truncation(device):
    tone = PumpTone(device.omega_L, 1e-18)
    mf = select_branch(solve_single_pump(device, tone))
    with pytest.raises(ValueError):
        floquet_matrix(device, mf, N=0, omega=0.0)
