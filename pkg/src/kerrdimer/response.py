"""Frequency-dependent scattering and gain in both linear models.

The quadrature model evaluates S(omega) = 1 + K (M + i omega)^-1 K over
the drift matrix M with K = sqrt(kappa) 1_4. The Floquet model evaluates
the reflection of the driven left port of the bare-basis
harmonic-balance matrix, G = |S_00(omega)|^2 with the harmonic-0
left-mode element.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model_core import CircuitParams
from .stability import DriftMatrix, floquet_matrix, quadrature_transform

__all__ = [
    "InstabilityError",
    "GainProfile",
    "scattering_quadrature",
    "scattering_modes",
    "gain_zero_freq_closed_form",
    "single_pump_gain_closed_form",
    "gain_profile_quadrature",
    "gain_profile_floquet",
    "floquet_reflection",
    "floquet_scattering_row",
    "phase_sensitive_gain",
    "profile_from_curve",
    "export_profile_csv",
]


class InstabilityError(RuntimeError):
    """Requested response at or beyond the parametric instability."""


@dataclass(frozen=True)
class GainProfile:
    """A gain curve over a frequency grid plus its summary numbers.

    ``bandwidth_3db`` is the contiguous width (linear interpolation at
    the crossings) of the region around the maximum where the gain stays
    at or above G0/2; ``n_peaks`` counts local maxima at or above G0/2,
    so split profiles are detectable even though the bandwidth refers to
    the connected region only.
    """

    freq_grid: np.ndarray
    gain: np.ndarray
    G0: float
    f_peak: float
    bandwidth_3db: float
    model_tag: str
    n_peaks: int = 1

    @property
    def G0_db(self) -> float:
        return 10.0 * math.log10(self.G0)


def _warn_if_unstable(dm: DriftMatrix) -> None:
    ev = np.linalg.eigvals(dm.entries)
    if np.max(ev.real) >= 0.0:
        warnings.warn("drift matrix is unstable; gain diverges", stacklevel=3)


def scattering_quadrature(dm: DriftMatrix, kappa: float, omega: float) -> np.ndarray:
    """4x4 quadrature scattering matrix S(omega) = 1 + K (M + i omega)^-1 K."""
    _warn_if_unstable(dm)
    M = dm.entries.astype(complex) + 1j * omega * np.eye(4)
    return np.eye(4) + kappa * np.linalg.inv(M)


def scattering_modes(dm: DriftMatrix, kappa: float, omega: float) -> np.ndarray:
    """Scattering over the mode vector (c_a, c_a^dag, c_b, c_b^dag).

    Same physics as :func:`scattering_quadrature`, expressed in the
    complex mode basis, where the phase-preserving channel gain is the
    diagonal element |S_aa|^2.
    """
    U = quadrature_transform()
    # v_complex = U v_quad, so the mode-basis drift is U M U^{-1}.
    Mc = U @ dm.entries.astype(complex) @ np.linalg.inv(U)
    return np.eye(4) + kappa * np.linalg.inv(Mc + 1j * omega * np.eye(4))


def gain_zero_freq_closed_form(C_S: float, C_TMS: float, C_BS: float) -> float:
    """Zero-frequency power gain of the balanced two-pump amplifier.

    G0 = |8 sqrt(C_S) (1 + (sqrt(C_BS) + sqrt(C_TMS))^2) / (1 + C_BS - C_TMS)^2|^2.
    Raises InstabilityError at the threshold C_TMS - C_BS = 1.
    """
    if C_TMS - C_BS >= 1.0:
        raise InstabilityError(
            f"C_TMS - C_BS = {C_TMS - C_BS:.6g} is at or beyond the instability")
    denom = (1.0 + C_BS - C_TMS) ** 2
    amp = 8.0 * math.sqrt(C_S) * (1.0 + (math.sqrt(C_BS) + math.sqrt(C_TMS)) ** 2) / denom
    return amp * amp


def single_pump_gain_closed_form(C_TMS: float) -> float:
    """Zero-detuning gain of the single-pump nondegenerate amplifier."""
    if C_TMS >= 1.0:
        raise InstabilityError(f"C_TMS = {C_TMS:.6g} is at or beyond the instability")
    return abs((C_TMS + 1.0) / (C_TMS - 1.0)) ** 2


def profile_from_curve(freq_grid, gain, model_tag: str) -> GainProfile:
    """Summarize a sampled gain curve into a GainProfile.

    The -3 dB bandwidth is the connected region around the global
    maximum where gain >= G0/2, with linearly interpolated edge
    crossings. Local maxima at or above G0/2 are counted into n_peaks.
    """
    f = np.asarray(freq_grid, dtype=float)
    g = np.asarray(gain, dtype=float)
    i0 = int(np.argmax(g))
    G0 = float(g[i0])
    half = 0.5 * G0

    # Left edge.
    lo = f[0]
    for i in range(i0, 0, -1):
        if g[i - 1] < half:
            t = (half - g[i - 1]) / (g[i] - g[i - 1])
            lo = f[i - 1] + t * (f[i] - f[i - 1])
            break
    # Right edge.
    hi = f[-1]
    for i in range(i0, len(f) - 1):
        if g[i + 1] < half:
            t = (half - g[i]) / (g[i + 1] - g[i])
            hi = f[i] + t * (f[i + 1] - f[i])
            break

    interior = (g[1:-1] >= g[:-2]) & (g[1:-1] > g[2:]) & (g[1:-1] >= half)
    n_peaks = int(np.count_nonzero(interior))
    if n_peaks == 0:
        n_peaks = 1  # maximum at a grid edge

    return GainProfile(freq_grid=f, gain=g, G0=G0, f_peak=float(f[i0]),
                       bandwidth_3db=float(hi - lo), model_tag=model_tag,
                       n_peaks=n_peaks)


def gain_profile_quadrature(dm: DriftMatrix, kappa: float, grid,
                            element: tuple[int, int] = (1, 0)) -> GainProfile:
    """Gain profile |S_element(omega)|^2 of the quadrature model.

    The default element (1, 0) is the P_a <- X_a transduction used for
    the balanced two-pump amplifier; the direct reflection (0, 0) is the
    right choice for the single-pump (pure two-mode squeezing) case
    where the cross element vanishes.
    """
    _warn_if_unstable(dm)
    i, j = element
    grid = np.asarray(grid, dtype=float)
    M = dm.entries.astype(complex)
    eye = np.eye(4)
    g = np.empty_like(grid)
    for k, w in enumerate(grid):
        R = np.linalg.inv(M + 1j * w * eye)
        g[k] = abs(1.0 * (i == j) + kappa * R[i, j]) ** 2
    return profile_from_curve(grid, g, "quadrature-symmetric")


def _floquet_port_index(N: int) -> int:
    # (harmonic 0, a_L) row index in the stacked vector.
    return 4 * N


def floquet_reflection(params: CircuitParams, mf, omega_lab: float, N: int = 2) -> complex:
    """Port reflection amplitude S_00 at absolute frequency omega_lab."""
    fm = floquet_matrix(params, mf, N, omega_lab - _floquet_frame(mf))
    i0 = _floquet_port_index(N)
    rhs = np.zeros(fm.entries.shape[0], dtype=complex)
    rhs[i0] = 1.0
    x = np.linalg.solve(fm.entries, rhs)
    return 1.0 + params.kappa * x[i0]


def _floquet_frame(mf) -> float:
    return 0.5 * (mf.omega_g + mf.omega_c) if mf.omega_c is not None else mf.omega_g


def floquet_scattering_row(params: CircuitParams, mf, omega_lab: float,
                           N: int = 2) -> np.ndarray:
    """Row of the Floquet scattering matrix for the port output.

    Returns the full output row of the (harmonic-0, a_L) channel over
    all input channels (every harmonic, both resonators, both conjugate
    sectors), each input weighted by the square root of its coupling
    rate. Used for noise row sums; the coherent reflection is the
    (harmonic-0, a_L) entry.
    """
    fm = floquet_matrix(params, mf, N, omega_lab - _floquet_frame(mf))
    i0 = _floquet_port_index(N)
    dim = fm.entries.shape[0]
    rhs = np.zeros(dim, dtype=complex)
    rhs[i0] = 1.0
    # Row of the inverse: solve the transposed system.
    row = np.linalg.solve(fm.entries.T, rhs)
    srow = math.sqrt(params.kappa) * row * np.sqrt(fm.kappa_rows)
    srow[i0] += 1.0
    return srow


def gain_profile_floquet(params: CircuitParams, mf, grid, N: int = 2) -> GainProfile:
    """Port reflection gain |S_00|^2 over an absolute frequency grid."""
    grid = np.asarray(grid, dtype=float)
    frame = _floquet_frame(mf)
    i0 = _floquet_port_index(N)
    # Build the static part once; only the i omega diagonal changes.
    fm0 = floquet_matrix(params, mf, N, 0.0)
    base = fm0.entries
    dim = base.shape[0]
    eye = np.eye(dim)
    rhs = np.zeros(dim, dtype=complex)
    rhs[i0] = 1.0
    g = np.empty_like(grid)
    for k, w in enumerate(grid):
        M = base + 1j * (w - frame) * eye
        x = np.linalg.solve(M, rhs)
        g[k] = abs(1.0 + params.kappa * x[i0]) ** 2
    return profile_from_curve(grid, g, "floquet-single-port")


def phase_sensitive_gain(dm: DriftMatrix, kappa: float, omega: float,
                         mode: str = "b") -> tuple[float, float, float]:
    """Quadrature-extremal gains at a degenerate operating frequency.

    Returns (G_max, G_min, modulation) from the singular values of the
    2x2 reflected quadrature block of the chosen mode: G_max = s_max^2,
    G_min = s_min^2, modulation = G_max / G_min.
    """
    S = scattering_quadrature(dm, kappa, omega)
    sl = slice(2, 4) if mode == "b" else slice(0, 2)
    block = S[sl, sl]
    sv = np.linalg.svd(block, compute_uv=False)
    g_max = float(sv[0] ** 2)
    g_min = float(sv[-1] ** 2)
    modulation = g_max / g_min if g_min > 0.0 else math.inf
    return g_max, g_min, modulation


def export_profile_csv(path, profile: GainProfile, phase=None) -> None:
    """CSV with freq_Hz, gain_dB, phase_deg columns."""
    import csv

    two_pi = 2.0 * math.pi
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["freq_Hz", "gain_dB", "phase_deg"])
        for k, (f, g) in enumerate(zip(profile.freq_grid, profile.gain)):
            ph = math.degrees(phase[k]) if phase is not None else 0.0
            w.writerow([repr(float(f) / two_pi),
                        repr(10.0 * math.log10(max(float(g), 1e-300))),
                        repr(float(ph))])
