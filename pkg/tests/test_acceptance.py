"""Acceptance gate: twelve numbered criteria, one pass/fail line each.

Each test prints a single summary line (visible with ``pytest -s`` or in
the captured output of a failure) and then asserts. The criteria mix
quantitative desk-scale reproductions of the device characterization
with property suites on the idealized models.
"""

import math
import warnings

import numpy as np
from scipy.optimize import brentq

from kerrdimer import (
    PumpTone,
    balanced_couplings,
    drift_matrix,
    eigenvalues_closed_form,
    fit_attenuation,
    fit_dephasing,
    fit_kerr,
    fit_pump_powers,
    gain_profile_floquet,
    gain_zero_freq_closed_form,
    gbw_scan,
    hybridize,
    kappa_equivalent,
    phase_sensitive_gain,
    retune_double_pump,
    retune_single_pump,
    scattering_modes,
    scattering_quadrature,
    tune_to_bp,
)
from kerrdimer.inference import dephasing_rate
from kerrdimer.meanfield import select_branch, solve_single_pump, spectroscopy_response
from kerrdimer.model_core import EffectiveCouplings
from kerrdimer.noise import added_noise_spectrum
from kerrdimer.serialize import TWO_PI, dbm_to_watts


def _report(num, name, ok, detail):
    print(f"criterion {num:02d} ({name}): {'PASS' if ok else 'FAIL'} -- {detail}")
    assert ok, f"criterion {num:02d} ({name}): {detail}"


def _mode_gain_zero(c_t, c_b, kappa=1.0):
    dm = drift_matrix(balanced_couplings(c_t, c_b, kappa), kappa)
    return abs(scattering_modes(dm, kappa, 0.0)[0, 0]) ** 2


def _calibrated_balanced(mode, g0=100.0, kappa=1.0):
    """Balanced couplings with the mode-basis channel gain set to g0."""
    shift = 0.0 if mode == "EP" else 1.0
    c_t = brentq(lambda x: _mode_gain_zero(x, x + shift, kappa) - g0,
                 1e-6, 8.0, rtol=1e-12)
    return balanced_couplings(c_t, c_t + shift, kappa)


def test_criterion_01_hybridization(device):
    hyb = hybridize(device)
    fa, fb = hyb.omega_a / TWO_PI, hyb.omega_b / TWO_PI
    ka, kb = hyb.kappa_a / TWO_PI, hyb.kappa_b / TWO_PI
    ok = (abs(fa - 8.233e9) < 1e6 and abs(fb - 8.434e9) < 1e6
          and abs(ka - 14e6) < 1e6 and abs(kb - 29e6) < 3e6)
    _report(1, "hybridization", ok,
            f"f_a={fa/1e9:.4f} GHz f_b={fb/1e9:.4f} GHz "
            f"k_a={ka/1e6:.2f} MHz k_b={kb/1e6:.2f} MHz")


def test_criterion_02_kappa_eq(device):
    hyb = hybridize(device)
    k_eq = kappa_equivalent(hyb.kappa_a, hyb.kappa_b) / TWO_PI
    ok = abs(k_eq - 19e6) < 4e6
    _report(2, "kappa_eq", ok, f"kappa_eq={k_eq/1e6:.2f} MHz, band 19+/-4 MHz")


def test_criterion_03_eigenvalue_structure():
    kappa = 1.0

    # Coalescence at gap 0 (nontrivial couplings).
    dm = drift_matrix(balanced_couplings(0.5, 0.5, kappa), kappa)
    ev = np.linalg.eigvals(dm.entries)
    spread = float(np.max(np.abs(ev[:, None] - ev[None, :])))
    center = float(np.max(np.abs(ev + 0.5 * kappa)))
    ok_ep = spread < 1e-9 * kappa and center < 1e-9 * kappa

    # Equal real and imaginary magnitudes at gap -1. The spectrum is two
    # conjugate double pairs; averaging each degenerate pair removes the
    # round-off splitting of the repeated roots.
    dm = drift_matrix(balanced_couplings(0.5, 1.5, kappa), kappa)
    ev = np.linalg.eigvals(dm.entries)
    up = ev[ev.imag > 0].mean()
    dn = ev[ev.imag < 0].mean()
    ok_bp = all(abs(abs(x) - 0.5 * kappa) < 1e-9 * kappa
                for x in (up.real, up.imag, dn.real, dn.imag))

    # Instability onset along the positive gap axis, by bisection on the
    # pair-averaged leading eigenvalue.
    def max_re(gap):
        d = drift_matrix(balanced_couplings(gap, 0.0, kappa), kappa)
        re = np.sort(np.linalg.eigvals(d.entries).real)
        return float(re[2:].mean())

    lo, hi = 0.5, 1.5
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if max_re(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    onset = 0.5 * (lo + hi)
    ok_onset = abs(onset - 1.0) < 1e-9

    _report(3, "eigenvalue structure", ok_ep and ok_bp and ok_onset,
            f"EP spread={spread:.1e} BP ok={ok_bp} onset={onset:.12f}")


def test_criterion_04_closed_form_vs_matrix():
    rng = np.random.default_rng(7)
    kappa = 1.0
    worst_ev, worst_g, n_stable = 0.0, 0.0, 0
    for _ in range(1000):
        c_t = float(rng.uniform(0.0, 4.0))
        c_b = float(rng.uniform(0.0, 4.0))
        c = balanced_couplings(c_t, c_b, kappa)
        dm = drift_matrix(c, kappa)
        ev = np.linalg.eigvals(dm.entries)
        cf = eigenvalues_closed_form(c_t, c_b, kappa)
        lo, hi = cf[0], cf[2]
        # The spectrum comes in two double pairs; match each numeric
        # eigenvalue to the nearest closed-form root and average the
        # matched pair to suppress the degenerate-splitting round-off.
        idx = np.argsort(np.abs(ev - lo) - np.abs(ev - hi))
        pairs = np.array([ev[idx[:2]].mean(), ev[idx[2:]].mean()])
        cf_pairs = np.array([lo, hi])
        err = np.max(np.abs(pairs - cf_pairs)
                     / np.maximum(np.abs(cf_pairs), kappa))
        worst_ev = max(worst_ev, float(err))
        if c_t - c_b < 1.0 - 1e-6:
            n_stable += 1
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                s21 = scattering_quadrature(dm, kappa, 0.0)[1, 0]
            g_cf = gain_zero_freq_closed_form(0.5 * c_t, c_t, c_b)
            worst_g = max(worst_g, abs(abs(s21) ** 2 - g_cf) / g_cf)
    ok = worst_ev < 1e-8 and worst_g < 1e-9
    _report(4, "closed form vs matrix", ok,
            f"worst ev err={worst_ev:.2e} worst gain err={worst_g:.2e} "
            f"({n_stable} stable)")


def test_criterion_05_symplectic():
    rng = np.random.default_rng(11)
    kappa = 1.0
    omega_sym = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    worst, n_stable = 0.0, 0
    while n_stable < 1000:
        phases = np.exp(1j * rng.uniform(0.0, TWO_PI, size=4))
        c = EffectiveCouplings(
            delta_a=float(rng.normal(0.0, 0.8)),
            delta_b=float(rng.normal(0.0, 0.8)),
            lambda_S_a=float(rng.uniform(0.0, 0.5)) * phases[0],
            lambda_S_b=float(rng.uniform(0.0, 0.5)) * phases[1],
            lambda_TMS=float(rng.uniform(0.0, 0.8)) * phases[2],
            lambda_BS=float(rng.uniform(0.0, 0.8)) * phases[3],
            frame=0.0)
        dm = drift_matrix(c, kappa)
        if np.max(np.linalg.eigvals(dm.entries).real) >= -1e-6:
            continue
        n_stable += 1
        S = scattering_quadrature(dm, kappa, 0.0).real
        worst = max(worst, float(np.max(np.abs(S @ omega_sym @ S.T - omega_sym))))
    ok = worst < 1e-9
    _report(5, "symplectic invariant", ok, f"worst defect={worst:.2e}")


def test_criterion_06_single_pump_gbw(device):
    targets = [10.0, 15.0, 20.0, 25.0]
    rows = gbw_scan("SP", targets, kappa=1.0)
    gbw = np.array([r["BW"] * math.sqrt(r["G0"]) for r in rows])
    ok_quad = float(gbw.max() / gbw.min()) <= 1.15

    rows_f = gbw_scan("SP", targets, model="floquet", params=device)
    k_eq = rows_f[0]["kappa_eq"] / TWO_PI
    gbw_f = np.array([r["gbw"] for r in rows_f]) / TWO_PI
    ok_floq = bool(np.all(np.abs(gbw_f - k_eq) < 4e6))
    _report(6, "single-pump GBW", ok_quad and ok_floq,
            f"quad spread={gbw.max()/gbw.min()-1:.3f} "
            f"floquet GBW={np.round(gbw_f/1e6, 2)} MHz vs kappa_eq={k_eq/1e6:.2f} MHz")


def test_criterion_07_bp_bandwidth(symmetric, gain_tone_symmetric):
    k = symmetric.kappa
    bw = {}
    details = []
    for g0 in (10.0, 15.0, 20.0, 25.0):
        _, _, _, diag = tune_to_bp(symmetric, gain_tone_symmetric, g0)
        bw[g0] = diag["bandwidth"]
        details.append(f"{g0:.0f}dB:BW={diag['bandwidth']/k:.2f}k")
    ok_bw = all(v >= 0.8 * k for v in bw.values())

    bw_sp = gbw_scan("SP", [20.0], kappa=k)[0]["BW"]
    ratio = bw[20.0] / bw_sp
    ok_ratio = ratio >= 6.0
    _report(7, "BP bandwidth", ok_bw and ok_ratio,
            " ".join(details) + f" BW_BP/BW_SP(20dB)={ratio:.1f}")


def test_criterion_08_peak_coalescence(device):
    k = device.kappa
    p_g = dbm_to_watts(-76.0)

    def profile_at(p_c_dbm):
        mf, _, wt_b = retune_double_pump(device, p_g, dbm_to_watts(p_c_dbm))
        grid = np.linspace(wt_b - 3.0 * k, wt_b + 3.0 * k, 1201)
        return gain_profile_floquet(device, mf, grid, N=2), wt_b

    prof_lo, _ = profile_at(-75.0)
    prof_hi, wt_b = profile_at(-68.0)
    ok = (prof_lo.n_peaks >= 2 and prof_hi.n_peaks == 1
          and abs(prof_hi.f_peak - wt_b) < 0.5 * k)
    _report(8, "peak coalescence", ok,
            f"n_peaks {prof_lo.n_peaks}->{prof_hi.n_peaks}, "
            f"|f_peak - omega_b|={abs(prof_hi.f_peak - wt_b)/k:.3f} kappa")


def _central_window(grid, n_add, level=0.6):
    """Width of the contiguous n_add <= level region containing omega = 0."""
    ic = len(grid) // 2
    mask = n_add <= level
    if not mask[ic]:
        return 0.0
    lo = hi = ic
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    while hi < len(grid) - 1 and mask[hi + 1]:
        hi += 1
    return float(grid[hi] - grid[lo])


def test_criterion_09_added_noise():
    kappa = 1.0
    grid = np.linspace(-3.0, 3.0, 1201)
    rng = np.random.default_rng(3)

    # Bound invariant on random stable lossless balanced configurations.
    worst = math.inf
    n_cfg = 0
    while n_cfg < 60:
        c_t = float(rng.uniform(0.0, 3.0))
        c_b = float(rng.uniform(0.0, 3.0))
        if c_t - c_b >= 1.0 - 1e-3:
            continue
        n_cfg += 1
        dm = drift_matrix(balanced_couplings(c_t, c_b, kappa), kappa)
        spec = added_noise_spectrum(dm, kappa, grid, mode="a")
        worst = min(worst, float(np.min(spec.n_add - spec.quantum_limit)))
    ok_bound = worst >= -1e-9

    diffs, windows = {}, {}
    for mode in ("EP", "BP"):
        dm = drift_matrix(_calibrated_balanced(mode), kappa)
        spec = added_noise_spectrum(dm, kappa, grid, mode="a")
        ic = len(grid) // 2
        diffs[mode] = float(spec.n_add[ic] - spec.quantum_limit[ic])
        windows[mode] = _central_window(grid, spec.n_add)
    ok_center = diffs["EP"] <= 0.1 and diffs["BP"] <= 0.1
    ok_window = windows["BP"] > windows["EP"]

    _report(9, "added noise", ok_bound and ok_center and ok_window,
            f"min(n_add - bound)={worst:.2e}; band-center excess "
            f"EP={diffs['EP']:.3f} BP={diffs['BP']:.3f} (limit 0.1); "
            f"n_add<=0.6 window EP={windows['EP']:.3f} BP={windows['BP']:.3f}")


def test_criterion_10_floquet_convergence(device):
    k = device.kappa
    mf, _, wt_b = retune_double_pump(
        device, dbm_to_watts(-72.447), dbm_to_watts(-92.0))
    grid = np.linspace(wt_b - 3.0 * k, wt_b + 3.0 * k, 801)
    g2 = gain_profile_floquet(device, mf, grid, N=2).G0_db
    g3 = gain_profile_floquet(device, mf, grid, N=3).G0_db
    ok = abs(g2 - g3) < 0.1
    _report(10, "floquet convergence", ok,
            f"G0(N=2)={g2:.3f} dB G0(N=3)={g3:.3f} dB diff={abs(g2-g3):.4f} dB")


def test_criterion_11_inference_round_trips(device):
    rng = np.random.default_rng(0)
    k = device.kappa
    hyb = hybridize(device)

    # Kerr coefficients from power-dependent reflection, 1% complex noise.
    rows = []
    for p_dbm in (-110.0, -100.0, -95.0, -90.0, -85.0):
        p = dbm_to_watts(p_dbm)
        freqs = np.concatenate([
            np.linspace(hyb.omega_a - k, hyb.omega_a + k, 7),
            np.linspace(hyb.omega_b - k, hyb.omega_b + k, 7)])
        for w in freqs:
            g = spectroscopy_response(device, w, p).gamma
            g += 0.01 * (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2.0)
            rows.append((p, w, g))
    fr = fit_kerr(rows, device, n_starts=6)
    k_l = fr.parameters["K_L"]["value"]
    k_r = fr.parameters["K_R"]["value"]
    err_kl = abs(k_l + 2.9e3) / 2.9e3
    err_kr = abs(k_r + 3.2e3) / 3.2e3
    ok_kerr = err_kl < 0.05 and err_kr < 0.05

    # Line attenuation from a single-pump profile family.
    att_true = -66.4
    _, wa0, wb0 = retune_single_pump(device, dbm_to_watts(-6.0 + att_true))
    wg = 0.5 * (wa0 + wb0)
    profs = []
    for p_set in (-6.0, -5.5, -5.0):
        mf = select_branch(solve_single_pump(
            device, PumpTone(wg, dbm_to_watts(p_set + att_true))))
        freq = np.linspace(wb0 - 2.0 * k, wb0 + 2.0 * k, 101)
        pr = gain_profile_floquet(device, mf, freq, N=2)
        profs.append({"P_set_dBm": p_set, "freq": freq, "gain": pr.gain})
    fr = fit_attenuation(profs, device, pump_freq=wg, atten_guess_db=-60.0)
    att = fr.parameters["attenuation"]["value"]
    err_att = abs(att - att_true)
    ok_att = err_att < 0.5

    # Two-pump powers at four neighboring 20 dB working points.
    pairs = [(-71.50, -62.61), (-71.54, -62.64), (-71.76, -62.50), (-71.93, -62.40)]
    ratios, max_p_err = [], 0.0
    for p_g_dbm, p_c_dbm in pairs:
        mf, _, wt_b = retune_double_pump(
            device, dbm_to_watts(p_g_dbm), dbm_to_watts(p_c_dbm))
        freq = np.linspace(wt_b - 2.0 * k, wt_b + 2.0 * k, 241)
        prof = gain_profile_floquet(device, mf, freq, N=2)
        fit = fit_pump_powers(
            {"freq": freq, "gain": prof.gain,
             "omega_g": mf.omega_g, "omega_c": mf.omega_c},
            device, guess_dbm=(-72.0, -63.0))
        p_g_fit = fit.parameters["P_g_device"]["value"]
        p_c_fit = fit.parameters["P_c_device"]["value"]
        max_p_err = max(max_p_err, abs(p_g_fit - p_g_dbm), abs(p_c_fit - p_c_dbm))
        ratios.append(fit.parameters["pump_power_ratio"]["value"])
    ok_pumps = (max_p_err < 0.3
                and max(ratios) - min(ratios) <= 0.02
                and all(abs(r - 0.12) < 0.02 for r in ratios))

    # Photon-number calibration from measurement-induced dephasing.
    chi_true, c_true = TWO_PI * 0.51e6, 5300.0
    kappa_r = TWO_PI * 1e6
    ds = []
    for dw_mhz in (0.0, 0.25, 0.5, 1.0, 2.0):
        dw = TWO_PI * dw_mhz * 1e6
        for v in np.linspace(0.001, 0.05, 10):
            rate = dephasing_rate(v, dw, chi_true, c_true, kappa_r)
            ds.append((v, dw, rate * (1.0 + 0.01 * rng.standard_normal())))
    fr = fit_dephasing(ds, kappa_r)
    chi_fit = fr.parameters["chi"]["value"]
    c_fit = fr.parameters["c"]["value"]
    err_chi = abs(chi_fit - 0.51e6) / 0.51e6
    err_c = abs(c_fit - c_true) / c_true
    ok_deph = err_chi < 0.05 and err_c < 0.05

    ok = ok_kerr and ok_att and ok_pumps and ok_deph
    _report(11, "inference round-trips", ok,
            f"Kerr err=({err_kl*100:.2f}%, {err_kr*100:.2f}%) "
            f"atten err={err_att:.3f} dB pump err={max_p_err:.3f} dB "
            f"ratios={np.round(ratios, 4)} "
            f"dephasing err=({err_chi*100:.2f}%, {err_c*100:.2f}%)")


def test_criterion_12_phase_sensitive_gain():
    kappa = 1.0
    # Pure squeezer: one single-mode pair term, zero detuning.
    worst = 0.0
    for lam_s in (0.05, 0.1, 0.2, 0.35, 0.45):
        c = EffectiveCouplings(
            delta_a=0.0, delta_b=0.0, lambda_S_a=0.0, lambda_S_b=lam_s,
            lambda_TMS=0.0, lambda_BS=0.0, frame=0.0)
        dm = drift_matrix(c, kappa)
        for w in (0.0, 0.3, 1.1):
            g_max, g_min, _ = phase_sensitive_gain(dm, kappa, w, mode="b")
            worst = max(worst, abs(g_max * g_min - 1.0))
    ok_sq = worst < 1e-6

    dm = drift_matrix(_calibrated_balanced("BP"), kappa)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, _, modulation = phase_sensitive_gain(dm, kappa, 0.0, mode="a")
    mod_db = 10.0 * math.log10(modulation) if math.isfinite(modulation) else math.inf
    ok_mod = mod_db > 30.0
    _report(12, "phase-sensitive gain", ok_sq and ok_mod,
            f"|Gmax*Gmin - 1|={worst:.1e}; BP 20 dB modulation="
            + ("inf" if math.isinf(mod_db) else f"{mod_db:.1f} dB"))
