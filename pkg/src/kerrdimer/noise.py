"""Output noise and added-noise spectra with vacuum (or thermal) inputs.

For stationary Gaussian inputs the symmetrized output PSD of channel i
is the row sum psd_i = sum_j |S_ij|^2 (n_th_j + 1/2), which reduces to
(1/2) sum_j |S_ij|^2 for vacuum. Added noise refers that PSD to the
input of the amplifying channel, n_add = psd/G - 1/2.

The quantum-limit comparison is made in the complex mode basis, where
the phase-preserving channel and its gain G = |S_aa|^2 are unambiguous;
for a lossless symplectic S the row identity makes
n_add - (1 - 1/G)/2 = |S_ab|^2 / G >= 0 exact.
"""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np

from .response import scattering_modes
from .stability import DriftMatrix

__all__ = [
    "NoiseSpectrum",
    "output_noise",
    "added_noise",
    "quantum_limit",
    "added_noise_spectrum",
    "export_noise_csv",
]


@dataclass(frozen=True)
class NoiseSpectrum:
    """Added-noise curve of one amplifying channel.

    ``psd_out`` is the symmetrized output PSD in quanta, ``gain`` the
    channel power gain, ``n_add`` the input-referred added photons and
    ``quantum_limit`` the phase-preserving bound (1 - 1/G)/2.
    """

    freq_grid: np.ndarray
    psd_out: np.ndarray
    gain: np.ndarray
    n_add: np.ndarray
    quantum_limit: np.ndarray


def output_noise(S: np.ndarray, n_th=None) -> np.ndarray:
    """Symmetrized output PSD per channel for uncorrelated inputs.

    ``n_th`` is an optional per-input thermal occupation vector
    (default all zero, i.e. vacuum, PSD 1/2 per input).
    """
    S = np.asarray(S)
    w = np.full(S.shape[1], 0.5) if n_th is None else np.asarray(n_th) + 0.5
    return (np.abs(S) ** 2) @ w


def added_noise(psd_out, G):
    """Input-referred added photons n_add = psd_out / G - 1/2."""
    G = np.asarray(G, dtype=float)
    if np.any(G <= 0.0):
        raise ValueError("gain must be positive")
    if np.any(G < 1.0):
        warnings.warn("gain below unity; added-noise referral is ill-conditioned",
                      stacklevel=2)
    return np.asarray(psd_out, dtype=float) / G - 0.5


def quantum_limit(G):
    """Phase-preserving bound (1 - 1/G)/2."""
    return 0.5 * (1.0 - 1.0 / np.asarray(G, dtype=float))


def added_noise_spectrum(dm: DriftMatrix, kappa: float, grid,
                         mode: str = "a", n_th=None) -> NoiseSpectrum:
    """Added noise of the phase-preserving channel of one mode.

    Evaluates the mode-basis scattering row of the chosen mode over the
    grid; the channel gain is |S_aa|^2 and the PSD is the vacuum (or
    thermal) row sum.
    """
    grid = np.asarray(grid, dtype=float)
    row_i = 0 if mode == "a" else 2
    psd = np.empty_like(grid)
    gain = np.empty_like(grid)
    for k, w in enumerate(grid):
        S = scattering_modes(dm, kappa, w)
        psd[k] = output_noise(S, n_th=n_th)[row_i]
        gain[k] = abs(S[row_i, row_i]) ** 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        n_add = added_noise(psd, gain)
    return NoiseSpectrum(freq_grid=grid, psd_out=psd, gain=gain,
                         n_add=n_add, quantum_limit=quantum_limit(gain))


def export_noise_csv(path, spec: NoiseSpectrum) -> None:
    import csv
    import math

    two_pi = 2.0 * math.pi
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["freq_Hz", "psd_quanta", "n_add", "quantum_limit"])
        for f, p, n, q in zip(spec.freq_grid, spec.psd_out, spec.n_add,
                              spec.quantum_limit):
            w.writerow([repr(float(f) / two_pi), repr(float(p)),
                        repr(float(n)), repr(float(q))])
