"""Core domain types for the Kerr dimer amplifier.

Everything in this module is a pure function of value types. All internal
frequencies are angular (rad/s); conversion to and from the Hz / dBm units
used at the file boundary lives in :mod:`kerrdimer.serialize`.

Conventions
-----------
The device is a pair of resonators (left L, right R) coupled by a hopping
strength J. Only the left resonator is coupled to the measurement port
with rate kappa; the right resonator carries an internal loss channel
gamma. Self-Kerr coefficients K_L, K_R are negative.

Hybridized normal modes a (lower frequency) and b (upper frequency) are
obtained from the linear part of the dimer Hamiltonian with a mixing
angle theta, resolved to the branch theta in (pi/4, pi/2) for
omega_L <= omega_R. The hybridized linewidths follow the convention

    kappa_{a/b} = (kappa/2) (1 +/- (omega_L - omega_R)/sqrt(4J^2 + (omega_L - omega_R)^2))

which orders kappa_a < kappa_b for omega_L < omega_R. Note this pairing
assigns the narrower linewidth to the lower mode; it is the convention
used for the device characterization targets, not the eigenvector port
weight of the rotation (the two disagree, see notes in the repository
decision log).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = [
    "CircuitParams",
    "HybridizedParams",
    "PumpTone",
    "PumpConfig",
    "EffectiveCouplings",
    "Cooperativities",
    "hybridize",
    "effective_couplings",
    "cooperativities",
    "kerr_shifted_frequencies",
]


@dataclass(frozen=True)
class CircuitParams:
    """Bare circuit parameters of the nonlinear dimer.

    Parameters
    ----------
    omega_L, omega_R : float
        Bare resonance frequencies (angular, rad/s), omega_R >= omega_L.
    J : float
        Hopping strength (rad/s), positive.
    kappa : float
        External port coupling of the left resonator (rad/s), positive.
    gamma : float
        Internal loss rate of the right resonator (rad/s), nonnegative.
    K_L, K_R : float
        Self-Kerr coefficients (rad/s per photon), negative by convention.
    kappa_R : float, optional
        External coupling of the right resonator (rad/s). Zero for the
        single-port device; set equal to ``kappa`` for the symmetric
        two-port theory model.
    """

    omega_L: float
    omega_R: float
    J: float
    kappa: float
    gamma: float
    K_L: float
    K_R: float
    kappa_R: float = 0.0

    def __post_init__(self):
        if not self.omega_R >= self.omega_L:
            raise ValueError("omega_R must be >= omega_L")
        if not self.J > 0:
            raise ValueError("J must be positive")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if not (self.K_L < 0 and self.K_R < 0):
            raise ValueError("Kerr coefficients must be negative")
        if self.kappa_R < 0:
            raise ValueError("kappa_R must be nonnegative")

    @property
    def loss_R(self) -> float:
        """Total damping rate of the right resonator (rad/s)."""
        return self.gamma + self.kappa_R


@dataclass(frozen=True)
class HybridizedParams:
    """Normal-mode parameters of the linear dimer.

    ``omega_a <= omega_b``; ``kappa_a + kappa_b = kappa``; ``theta`` is
    the mixing angle of the rotation to the (a, b) basis. ``K_aa``,
    ``K_bb`` and ``K_ab`` are the collective self- and cross-Kerr
    coefficients; ``mu_minus`` and ``mu_plus`` are the dimensionless
    nonlinear-hopping coefficients. The mu's and the higher-order hopping
    terms are stored for completeness but excluded from linear response.
    """

    omega_a: float
    omega_b: float
    kappa_a: float
    kappa_b: float
    theta: float
    K_aa: float
    K_bb: float
    K_ab: float
    mu_minus: float
    mu_plus: float


@dataclass(frozen=True)
class PumpTone:
    """A single coherent drive tone.

    ``frequency`` in rad/s, ``power`` in watts referred to the device
    input, ``phase`` in radians.
    """

    frequency: float
    power: float
    phase: float = 0.0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be nonnegative")
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")

    def input_amplitude(self) -> complex:
        """Input photon-flux amplitude alpha_in = sqrt(P/hbar omega) e^{i phase}."""
        from scipy.constants import hbar

        mag = math.sqrt(self.power / (hbar * self.frequency))
        return mag * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class PumpConfig:
    """One or two pump tones plus the line attenuation budget.

    ``attenuation_db`` is the scalar attenuation applied between the
    generator and the device input (negative dB means loss); tone powers
    are stored device-referred, the attenuation is bookkeeping for
    generator-referred reporting.
    """

    gain_tone: PumpTone
    conversion_tone: PumpTone | None = None
    attenuation_db: float = 0.0

    def __post_init__(self):
        if self.conversion_tone is not None:
            if self.conversion_tone.frequency == self.gain_tone.frequency:
                raise ValueError("pump tones must have distinct frequencies")


@dataclass(frozen=True)
class EffectiveCouplings:
    """Linearized coupling strengths in a rotating frame at ``frame``.

    ``delta_a``, ``delta_b`` are the detunings of the frame from the
    Kerr-shifted mode frequencies, Delta_i = omega_o - omega_tilde_i.
    ``lambda_S_a``, ``lambda_S_b`` are the Hamiltonian coefficients of the
    single-mode pair terms c_i^dag c_i^dag, ``lambda_TMS`` of
    c_a^dag c_b^dag, and ``lambda_BS`` of c_a^dag c_b. ``components``
    optionally carries the individual frame harmonics for diagnostics.
    """

    delta_a: float
    delta_b: float
    lambda_S_a: complex
    lambda_S_b: complex
    lambda_TMS: complex
    lambda_BS: complex
    frame: float
    components: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Cooperativities:
    C_TMS: float
    C_BS: float
    C_S_a: float
    C_S_b: float


def hybridize(params: CircuitParams) -> HybridizedParams:
    """Rotate the bare dimer into its hybridized normal modes.

    Returns mode frequencies omega_{a/b} = omega_+ -/+ sqrt(J^2 + omega_-^2)
    with omega_+- = (omega_L +- omega_R)/2, the mixing angle theta from
    tan 2theta = J/omega_- on the branch theta in (pi/4, pi/2) for
    omega_L <= omega_R, the hybridized linewidths, collective Kerr
    coefficients and nonlinear-hopping coefficients.
    """
    wp = 0.5 * (params.omega_L + params.omega_R)
    wm = 0.5 * (params.omega_L - params.omega_R)  # <= 0 by convention
    J = params.J
    root = math.hypot(J, wm)

    omega_a = wp - root
    omega_b = wp + root
    # atan2 resolves the branch: wm <= 0 puts 2*theta in [pi/2, pi).
    theta = 0.5 * math.atan2(J, wm)

    dw = params.omega_L - params.omega_R
    frac = dw / math.hypot(2.0 * J, dw)
    kappa_a = 0.5 * params.kappa * (1.0 + frac)
    kappa_b = 0.5 * params.kappa * (1.0 - frac)

    Ksum = params.K_L + params.K_R
    Kdif = params.K_L - params.K_R
    K_ab = J * J * Ksum / (J * J + wm * wm)
    base = 0.25 * K_ab * (1.0 + 2.0 * wm * wm / (J * J))
    tilt = 0.5 * Kdif * wm / root
    K_aa = base - tilt
    K_bb = base + tilt

    scale = math.sqrt(1.0 + wm * wm / (J * J))
    mu_minus = scale * Kdif / Ksum - wm / J
    mu_plus = scale * Kdif / Ksum + wm / J

    return HybridizedParams(
        omega_a=omega_a,
        omega_b=omega_b,
        kappa_a=kappa_a,
        kappa_b=kappa_b,
        theta=theta,
        K_aa=K_aa,
        K_bb=K_bb,
        K_ab=K_ab,
        mu_minus=mu_minus,
        mu_plus=mu_plus,
    )


def _mode_populations(mf) -> tuple[float, float]:
    ag_L = complex(mf.alpha_L_g)
    ag_R = complex(mf.alpha_R_g)
    ac_L = complex(mf.alpha_L_c) if mf.alpha_L_c is not None else 0.0j
    ac_R = complex(mf.alpha_R_c) if mf.alpha_R_c is not None else 0.0j
    n_L = abs(ag_L) ** 2 + abs(ac_L) ** 2
    n_R = abs(ag_R) ** 2 + abs(ac_R) ** 2
    return n_L, n_R


def kerr_shifted_frequencies(params: CircuitParams, mf) -> tuple[float, float]:
    """Population-pulled normal-mode frequencies (omega_tilde_a, omega_tilde_b).

    Uses the static part of the Kerr shift: each mode is pulled by twice
    the self-Kerr of each resonator weighted by its participation and
    the total resonator population of the mean field.
    """
    hyb = hybridize(params)
    s2 = math.sin(hyb.theta) ** 2
    c2 = math.cos(hyb.theta) ** 2
    n_L, n_R = _mode_populations(mf)
    wt_a = hyb.omega_a + 2.0 * (params.K_L * n_L * s2 + params.K_R * n_R * c2)
    wt_b = hyb.omega_b + 2.0 * (params.K_L * n_L * c2 + params.K_R * n_R * s2)
    return wt_a, wt_b


def effective_couplings(
    params: CircuitParams,
    mf,
    frame: str = "two-pump",
    residual_tol: float = 1e-8,
) -> EffectiveCouplings:
    """Map a mean-field working point to hybridized coupling strengths.

    Parameters
    ----------
    params : CircuitParams
    mf : MeanFieldSolution
        Converged mean field; ``mf.residual`` must be below
        ``residual_tol``. Must carry the pump frequencies it was solved
        at (``omega_g`` and, for the two-pump frame, ``omega_c``).
    frame : {"two-pump", "single-pump"}
        "two-pump" places the rotating frame at omega_o = (omega_g +
        omega_c)/2 and returns the couplings resonant there: single-mode
        squeezing and two-mode squeezing from the pump cross terms, plus
        the static beam-splitter strength. "single-pump" uses
        omega_o = omega_g and the gain-tone squeezing terms; it is also
        valid for two-tone fields, where it returns the static effective
        model in the gain-tone frame (detunings Delta_a = -Delta_b when
        the tones straddle the shifted modes symmetrically).

    Returns
    -------
    EffectiveCouplings
        lambda_S_a / lambda_S_b / lambda_TMS are the Hamiltonian
        coefficients of the corresponding pair terms (so the quadratic
        form reads lambda_S c^dag c^dag + h.c. etc.); lambda_BS is the
        static conversion strength. ``components`` carries the other
        frame harmonics for inspection (keys like "lambda_BS_osc").
    """
    if mf.residual > residual_tol:
        raise ValueError(
            f"mean-field residual {mf.residual:.3e} exceeds tolerance {residual_tol:.1e}"
        )

    hyb = hybridize(params)
    th = hyb.theta
    s2, c2 = math.sin(th) ** 2, math.cos(th) ** 2
    s2t = math.sin(2.0 * th)
    K_L, K_R = params.K_L, params.K_R

    ag_L = complex(mf.alpha_L_g)
    ag_R = complex(mf.alpha_R_g)
    ac_L = complex(mf.alpha_L_c) if mf.alpha_L_c is not None else 0.0j
    ac_R = complex(mf.alpha_R_c) if mf.alpha_R_c is not None else 0.0j
    has_conversion = abs(ac_L) > 0 or abs(ac_R) > 0 or getattr(mf, "omega_c", None) is not None

    n_L, n_R = _mode_populations(mf)

    # Static Kerr shifts of the normal modes (population pull).
    wt_a, wt_b = kerr_shifted_frequencies(params, mf)

    # Static conversion strength (present in every frame).
    lam_BS0 = -(K_L * n_L - K_R * n_R) * s2t

    if frame == "two-pump":
        if getattr(mf, "omega_c", None) is None:
            raise ValueError("two-pump frame requested but mean field has no conversion tone")
        omega_o = 0.5 * (mf.omega_g + mf.omega_c)
        cross_L = K_L * ag_L * ac_L
        cross_R = K_R * ag_R * ac_R
        lam_S_a = cross_L * s2 + cross_R * c2
        lam_S_b = cross_L * c2 + cross_R * s2
        lam_TMS = -(cross_L - cross_R) * s2t
        components = {
            # Pair terms rotating at the single-tone frequencies.
            "lambda_S_a_g": 0.5 * (K_L * ag_L**2 * s2 + K_R * ag_R**2 * c2),
            "lambda_S_b_g": 0.5 * (K_L * ag_L**2 * c2 + K_R * ag_R**2 * s2),
            "lambda_S_a_c": 0.5 * (K_L * ac_L**2 * s2 + K_R * ac_R**2 * c2),
            "lambda_S_b_c": 0.5 * (K_L * ac_L**2 * c2 + K_R * ac_R**2 * s2),
            # Conversion term oscillating at the pump difference frequency.
            "lambda_BS_osc": -(K_L * np.conj(ag_L) * ac_L - K_R * np.conj(ag_R) * ac_R) * s2t,
            "lambda_TMS_g": -0.5 * (K_L * ag_L**2 - K_R * ag_R**2) * s2t,
            "lambda_TMS_c": -0.5 * (K_L * ac_L**2 - K_R * ac_R**2) * s2t,
        }
    elif frame == "single-pump":
        omega_o = mf.omega_g
        lam_S_a = 0.5 * (K_L * ag_L**2 * s2 + K_R * ag_R**2 * c2)
        lam_S_b = 0.5 * (K_L * ag_L**2 * c2 + K_R * ag_R**2 * s2)
        lam_TMS = -0.5 * (K_L * ag_L**2 - K_R * ag_R**2) * s2t
        components = {}
        if has_conversion:
            # With a second tone present this frame keeps the gain-tone
            # pair terms and the static conversion strength; the
            # conversion tone still enters through the populations in
            # the Kerr shifts and lambda_BS.
            components = {
                "lambda_S_a_c": 0.5 * (K_L * ac_L**2 * s2 + K_R * ac_R**2 * c2),
                "lambda_S_b_c": 0.5 * (K_L * ac_L**2 * c2 + K_R * ac_R**2 * s2),
                "lambda_TMS_c": -0.5 * (K_L * ac_L**2 - K_R * ac_R**2) * s2t,
                "lambda_BS_osc": -(K_L * np.conj(ag_L) * ac_L
                                   - K_R * np.conj(ag_R) * ac_R) * s2t,
            }
    else:
        raise ValueError(f"unknown frame {frame!r}")

    return EffectiveCouplings(
        delta_a=omega_o - wt_a,
        delta_b=omega_o - wt_b,
        lambda_S_a=lam_S_a,
        lambda_S_b=lam_S_b,
        lambda_TMS=lam_TMS,
        lambda_BS=complex(lam_BS0),
        frame=omega_o,
        components=components,
    )


def cooperativities(c: EffectiveCouplings, kappa: float) -> Cooperativities:
    """Dimensionless cooperativities C_alpha = 4 |Lambda_alpha|^2 / kappa^2."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    k2 = kappa * kappa
    return Cooperativities(
        C_TMS=4.0 * abs(c.lambda_TMS) ** 2 / k2,
        C_BS=4.0 * abs(c.lambda_BS) ** 2 / k2,
        C_S_a=4.0 * abs(c.lambda_S_a) ** 2 / k2,
        C_S_b=4.0 * abs(c.lambda_S_b) ** 2 / k2,
    )
