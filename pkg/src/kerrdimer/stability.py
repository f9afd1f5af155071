"""Linearized fluctuation dynamics: drift matrix, Floquet matrix, stability.

Two linear models are built here. The quadrature drift matrix describes
the two hybridized modes in a single rotating frame with static
couplings (symmetric two-port damping by default, optional single-port
variant). The Floquet (harmonic-balance) matrix describes the bare-basis
dimer under two pumps, with the pump-difference frequency Delta_p
generating coupling between fluctuation harmonics.

Gauge: the drift matrix follows the convention in which a real, positive
Lambda_TMS appears with +(Lambda_T -/+ Lambda_B) entries in the X/P
cross blocks. The equivalent complex Bogoliubov construction reproduces
this after the mode redefinition c_b -> -c_b (pure gauge; spectra and
gains are unchanged).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model_core import CircuitParams, EffectiveCouplings

__all__ = [
    "DriftMatrix",
    "FloquetMatrix",
    "StabilityReport",
    "drift_matrix",
    "drift_matrix_complex",
    "eigenvalues_closed_form",
    "classify",
    "floquet_matrix",
    "quadrature_transform",
]

EP_TOL = 1e-6
BP_TOL = 1e-6


@dataclass(frozen=True)
class DriftMatrix:
    """4x4 real drift matrix over the quadrature vector (X_a, P_a, X_b, P_b)."""

    entries: np.ndarray
    kappa: float
    single_port: bool = False


@dataclass(frozen=True)
class FloquetMatrix:
    """Harmonic-balance matrix at one probe frequency.

    ``entries`` has dimension 4(2N+1) over the mode vector
    (a_L, a_L^dag, a_R, a_R^dag) stacked over harmonics n in [-N, N] of
    the pump-difference frequency ``delta_p``. ``omega`` is the probe
    offset from the reference frame. ``kappa_rows`` marks which rows
    carry the external port coupling.
    """

    entries: np.ndarray
    N: int
    delta_p: float
    omega: float
    frame: float
    kappa_rows: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    classification: str
    coop_gap: float
    balanced: bool


def quadrature_transform() -> np.ndarray:
    """Unitary mapping the mode vector (c, c^dag) per mode to (X, P).

    Returns U such that v_complex = U v_quadrature for the stacked
    two-mode vector (c_a, c_a^dag, c_b, c_b^dag) vs (X_a, P_a, X_b, P_b).
    """
    u = np.array([[1.0, 1.0j], [1.0, -1.0j]]) / np.sqrt(2.0)
    return np.kron(np.eye(2), u)


def drift_matrix_complex(c: EffectiveCouplings, kappa: float,
                         single_port: bool = False) -> np.ndarray:
    """Complex Bogoliubov drift matrix over (c_a, c_a^dag, c_b, c_b^dag).

    Builds the equations of motion from the quadratic Hamiltonian with
    detunings Delta_i and couplings lambda_S_i (pair terms within a
    mode), lambda_TMS (cross pair term) and lambda_BS (conversion),
    including the gauge c_b -> -c_b described in the module docstring.
    The single-port variant halves the diagonal damping and adds the
    off-diagonal damping that the shared port induces between the
    hybridized modes.
    """
    da, db = c.delta_a, c.delta_b
    lsa, lsb = complex(c.lambda_S_a), complex(c.lambda_S_b)
    # Gauge c_b -> -c_b flips the sign of the cross couplings.
    lt = -complex(c.lambda_TMS)
    lb = -complex(c.lambda_BS)

    if single_port:
        kd = 0.5 * kappa  # per-mode damping kappa/2
        koff = -0.25 * kappa  # shared-port cross damping, gauge included
    else:
        kd = kappa
        koff = 0.0

    A = np.zeros((4, 4), dtype=complex)
    # d c_a/dt
    A[0, 0] = 1j * da - 0.5 * kd
    A[0, 1] = -2j * lsa
    A[0, 2] = -1j * lb + koff
    A[0, 3] = -1j * lt
    # d c_a^dag/dt (conjugate of the above with Delta -> -Delta)
    A[1, 1] = -1j * da - 0.5 * kd
    A[1, 0] = 2j * np.conj(lsa)
    A[1, 3] = 1j * np.conj(lb) + koff
    A[1, 2] = 1j * np.conj(lt)
    # d c_b/dt
    A[2, 2] = 1j * db - 0.5 * kd
    A[2, 3] = -2j * lsb
    A[2, 0] = -1j * np.conj(lb) + koff
    A[2, 1] = -1j * lt
    # d c_b^dag/dt
    A[3, 3] = -1j * db - 0.5 * kd
    A[3, 2] = 2j * np.conj(lsb)
    A[3, 1] = 1j * lb + koff
    A[3, 0] = 1j * np.conj(lt)
    return A


def drift_matrix(c: EffectiveCouplings, kappa: float,
                 single_port: bool = False) -> DriftMatrix:
    """Quadrature drift matrix for the two-mode model.

    For real couplings in the symmetric model this is the direct
    transcription

        [[-k/2, -(Da+2Ls_a), 0, Lt-Lb],
         [Da-2Ls_a, -k/2, Lt+Lb, 0],
         [0, Lt-Lb, -k/2, -(Db+2Ls_b)],
         [Lt+Lb, 0, Db-2Ls_b, -k/2]].

    General (complex-coupling or single-port) cases are built in the
    complex Bogoliubov basis and rotated to quadratures; the result is
    real to rounding for any physical coupling set.
    """
    A = drift_matrix_complex(c, kappa, single_port=single_port)
    U = quadrature_transform()
    M = np.linalg.solve(U, A @ U)
    imag_max = float(np.max(np.abs(M.imag)))
    scale = max(float(np.max(np.abs(M.real))), kappa)
    if imag_max > 1e-10 * scale:
        raise ValueError("drift matrix did not realify; non-physical couplings")
    return DriftMatrix(entries=np.ascontiguousarray(M.real), kappa=kappa,
                       single_port=single_port)


def eigenvalues_closed_form(C_TMS: float, C_BS: float, kappa: float) -> np.ndarray:
    """Balanced-configuration eigenvalues (kappa/2)(-1 +/- sqrt(C_TMS - C_BS)).

    Each sign branch is doubly degenerate. Valid under the balanced
    condition Lambda_S_a = Lambda_S_b with Delta_a = -Delta_b = +/- 2 Lambda_S.
    """
    root = np.sqrt(complex(C_TMS - C_BS))
    lo = 0.5 * kappa * (-1.0 - root)
    hi = 0.5 * kappa * (-1.0 + root)
    return np.array([lo, lo, hi, hi])


def _is_balanced(c: EffectiveCouplings, kappa: float, tol: float) -> bool:
    ls = abs(c.lambda_S_a)
    ref = tol * kappa
    return (
        abs(abs(c.lambda_S_b) - ls) <= ref
        and abs(abs(c.delta_a) - 2.0 * ls) <= ref
        and abs(abs(c.delta_b) - 2.0 * ls) <= ref
        and abs(c.delta_a + c.delta_b) <= ref
    )


def classify(dm: DriftMatrix, c: EffectiveCouplings,
             ep_tol: float = EP_TOL, bp_tol: float = BP_TOL) -> StabilityReport:
    """Numeric eigenvalues plus stable / unstable / EP / BP classification.

    EP: all four eigenvalues coalesce (pairwise distance < ep_tol * kappa)
    at a balanced working point. BP: the leading pair has equal real and
    imaginary magnitude (within bp_tol * kappa), balanced. Unstable wins
    over either label when the spectrum crosses the imaginary axis.
    """
    ev = np.linalg.eigvals(dm.entries)
    kappa = dm.kappa
    lam_t = abs(c.lambda_TMS)
    lam_b = abs(c.lambda_BS)
    gap = 4.0 * (lam_t ** 2 - lam_b ** 2) / kappa ** 2
    balanced = _is_balanced(c, kappa, tol=1e-6)

    max_re = float(np.max(ev.real))
    if max_re >= 0.0:
        label = "unstable"
    else:
        label = "stable"
        if balanced:
            spread = np.max(np.abs(ev[:, None] - ev[None, :]))
            lead = ev[np.argmax(ev.real)]
            if spread < ep_tol * kappa:
                label = "EP"
            elif abs(abs(lead.real) - abs(lead.imag)) < bp_tol * kappa:
                label = "BP"
    return StabilityReport(eigenvalues=ev, classification=label,
                           coop_gap=gap, balanced=balanced)


# -- bare-basis harmonic balance ---------------------------------------------

def _static_block(params: CircuitParams, mf):
    """Static 4x4 block over (a_L, a_L^dag, a_R, a_R^dag) in the reference frame.

    Includes the population-shifted detunings and, for a single pump,
    the static pair coefficient (K_j/2) alpha_j^2. For two pumps the
    reference frame is (omega_g + omega_c)/2 and the pair terms from the
    pump cross products are static while the single-tone pair and
    conversion terms oscillate at +/- Delta_p (handled by the side blocks).
    """
    two_pump = mf.omega_c is not None
    aLg, aRg = complex(mf.alpha_L_g), complex(mf.alpha_R_g)
    aLc = complex(mf.alpha_L_c) if mf.alpha_L_c is not None else 0.0j
    aRc = complex(mf.alpha_R_c) if mf.alpha_R_c is not None else 0.0j
    nL = abs(aLg) ** 2 + abs(aLc) ** 2
    nR = abs(aRg) ** 2 + abs(aRc) ** 2

    w_ref = 0.5 * (mf.omega_g + mf.omega_c) if two_pump else mf.omega_g
    dL = w_ref - params.omega_L - 2.0 * params.K_L * nL
    dR = w_ref - params.omega_R - 2.0 * params.K_R * nR
    hL = 0.5 * params.kappa
    hR = 0.5 * params.loss_R
    J = params.J

    if two_pump:
        # Pair term resonant in this frame: 2 K alpha_g alpha_c.
        gL = 2.0 * params.K_L * aLg * aLc
        gR = 2.0 * params.K_R * aRg * aRc
    else:
        gL = params.K_L * aLg ** 2
        gR = params.K_R * aRg ** 2

    A = np.zeros((4, 4), dtype=complex)
    A[0, 0] = 1j * dL - hL
    A[0, 1] = -1j * gL
    A[0, 2] = -1j * J
    A[1, 1] = -1j * dL - hL
    A[1, 0] = 1j * np.conj(gL)
    A[1, 3] = 1j * J
    A[2, 2] = 1j * dR - hR
    A[2, 3] = -1j * gR
    A[2, 0] = -1j * J
    A[3, 3] = -1j * dR - hR
    A[3, 2] = 1j * np.conj(gR)
    A[3, 1] = 1j * J
    return A, w_ref


def _side_blocks(params: CircuitParams, mf):
    """Coupling blocks between neighboring harmonics (two-pump case).

    A_plus multiplies the harmonic one step below (terms rotating at
    -Delta_p, Delta_p = omega_g - omega_c > 0 by convention here),
    A_minus its conjugate partner.
    """
    aLg, aRg = complex(mf.alpha_L_g), complex(mf.alpha_R_g)
    aLc, aRc = complex(mf.alpha_L_c), complex(mf.alpha_R_c)

    # Cross-Kerr frequency modulation and single-tone pair coefficients.
    k1L = 2.0 * params.K_L * aLg * np.conj(aLc)
    k1R = 2.0 * params.K_R * aRg * np.conj(aRc)
    k3L = params.K_L * aLg ** 2
    k3R = params.K_R * aRg ** 2
    k4L = params.K_L * aLc ** 2
    k4R = params.K_R * aRc ** 2

    Ap = np.zeros((4, 4), dtype=complex)
    Am = np.zeros((4, 4), dtype=complex)
    # e^{-i Delta_p t} terms: population beat (K1) and gain-tone pair (K3).
    Ap[0, 0] = -1j * k1L
    Ap[0, 1] = -1j * k3L
    Ap[1, 1] = 1j * k1L
    Ap[1, 0] = 1j * np.conj(k4L)
    Ap[2, 2] = -1j * k1R
    Ap[2, 3] = -1j * k3R
    Ap[3, 3] = 1j * k1R
    Ap[3, 2] = 1j * np.conj(k4R)
    # e^{+i Delta_p t} terms are the conjugate partners.
    Am[0, 0] = -1j * np.conj(k1L)
    Am[0, 1] = -1j * k4L
    Am[1, 1] = 1j * np.conj(k1L)
    Am[1, 0] = 1j * np.conj(k3L)
    Am[2, 2] = -1j * np.conj(k1R)
    Am[2, 3] = -1j * k4R
    Am[3, 3] = 1j * np.conj(k1R)
    Am[3, 2] = 1j * np.conj(k3R)
    return Ap, Am


def floquet_matrix(params: CircuitParams, mf, N: int, omega: float) -> FloquetMatrix:
    """Harmonic-balance matrix M(omega) of the pumped bare-basis dimer.

    ``omega`` is the probe detuning from the reference frame (the pump
    mean for two tones, the pump itself for one). Block (m, n) couples
    harmonic n to harmonic m: the static block sits on the diagonal with
    i(omega + m Delta_p) added, the pump-beat blocks sit on the first
    off-diagonals. A single-pump mean field yields a block-diagonal
    matrix (all beat coefficients zero).
    """
    if N < 1:
        raise ValueError("harmonic truncation N must be >= 1")
    A0, w_ref = _static_block(params, mf)
    two_pump = mf.omega_c is not None
    delta_p = (mf.omega_g - mf.omega_c) if two_pump else 0.0

    dim = 4 * (2 * N + 1)
    M = np.zeros((dim, dim), dtype=complex)
    if two_pump and (abs(complex(mf.alpha_L_c)) > 0 or abs(complex(mf.alpha_R_c)) > 0
                     or abs(complex(mf.alpha_L_g)) > 0 or abs(complex(mf.alpha_R_g)) > 0):
        Ap, Am = _side_blocks(params, mf)
    else:
        Ap = Am = np.zeros((4, 4), dtype=complex)

    eye4 = np.eye(4)
    for bm in range(2 * N + 1):
        n_h = bm - N
        sl = slice(4 * bm, 4 * bm + 4)
        M[sl, sl] = A0 + 1j * (omega + n_h * delta_p) * eye4
        if bm > 0:
            M[sl, slice(4 * (bm - 1), 4 * (bm - 1) + 4)] = Ap
        if bm < 2 * N:
            M[sl, slice(4 * (bm + 1), 4 * (bm + 1) + 4)] = Am

    kappa_rows = np.zeros(dim)
    for bm in range(2 * N + 1):
        kappa_rows[4 * bm + 0] = params.kappa
        kappa_rows[4 * bm + 1] = params.kappa
        kappa_rows[4 * bm + 2] = params.loss_R
        kappa_rows[4 * bm + 3] = params.loss_R
    return FloquetMatrix(entries=M, N=N, delta_p=delta_p, omega=omega,
                         frame=w_ref, kappa_rows=kappa_rows)
