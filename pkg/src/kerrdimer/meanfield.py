"""Classical steady-state pump amplitudes of the driven Kerr dimer.

Single-pump working points are enumerated exhaustively by reducing the
self-consistency system to a real polynomial in the right-resonator
population and taking companion-matrix roots. Double-pump working points
are found by damped Newton iteration with power-ramp continuation from
the linear solution; extra branches are probed with seeded multi-starts.

Conventions: the left resonator carries the port damping kappa/2, the
right resonator carries loss_R/2 = (gamma + kappa_R)/2. Driving enters
on the left port as -i sqrt(kappa) alpha_in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial

from .model_core import CircuitParams, PumpTone

__all__ = [
    "MeanFieldSolution",
    "SpectroscopyResult",
    "solve_single_pump",
    "solve_double_pump",
    "spectroscopy_response",
    "select_branch",
    "export_sweep_csv",
]

RESIDUAL_TOL = 1e-10
NEWTON_TOL = 1e-12
MAX_NEWTON_ITER = 200
RAMP_STEPS = 64


@dataclass(frozen=True)
class MeanFieldSolution:
    """One steady-state branch of the pump mean field.

    Amplitudes are complex photon-flux amplitudes in the frame of their
    own tone (alpha_*_c is None for single-pump solutions). ``residual``
    is the max-norm defect of the defining equations, normalized by the
    drive and response scales. ``omega_g`` / ``omega_c`` record the tone
    frequencies the branch was solved at.
    """

    alpha_L_g: complex
    alpha_R_g: complex
    alpha_L_c: complex | None
    alpha_R_c: complex | None
    n_L: float
    n_R: float
    residual: float
    branch_id: int
    omega_g: float
    omega_c: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_total(self) -> float:
        return self.n_L + self.n_R


class SpectroscopyResult(NamedTuple):
    n_L: float
    n_R: float
    gamma: complex
    branches: list


def _zero_solution(omega_g: float, omega_c: float | None, two_pump: bool) -> MeanFieldSolution:
    zc = 0.0j if two_pump else None
    return MeanFieldSolution(
        alpha_L_g=0.0j, alpha_R_g=0.0j, alpha_L_c=zc, alpha_R_c=zc,
        n_L=0.0, n_R=0.0, residual=0.0, branch_id=0,
        omega_g=omega_g, omega_c=omega_c,
    )


def _single_pump_residual(params: CircuitParams, omega_g, a_L, a_R, a_in):
    """Normalized max-norm defect of the two steady-state equations."""
    hL = 0.5 * params.kappa
    hR = 0.5 * params.loss_R
    dL = omega_g - params.omega_L - params.K_L * abs(a_L) ** 2
    dR = omega_g - params.omega_R - params.K_R * abs(a_R) ** 2
    e1 = a_R * (dR + 1j * hR) - params.J * a_L
    e2 = a_L * (dL + 1j * hL) - params.J * a_R + 1j * math.sqrt(params.kappa) * a_in
    scale = params.kappa * max(abs(a_L), abs(a_R), abs(a_in) / math.sqrt(params.kappa), 1e-300)
    return max(abs(e1), abs(e2)) / scale


def solve_single_pump(params: CircuitParams, tone: PumpTone) -> list[MeanFieldSolution]:
    """Enumerate all steady-state branches under a single pump tone.

    The two complex equations are reduced to one real polynomial in the
    right-resonator population n_R (the left population is linear in the
    first equation, so eliminating through the right mode keeps the
    degree at 11); all real nonnegative roots are taken from the
    companion matrix, polished by Newton steps on the polynomial, and
    back-substituted into the amplitudes. Every returned branch is
    re-substituted into the defining equations and must meet the
    1e-10 residual gate. Branches are sorted by total photon number.
    """
    omega_g = tone.frequency
    if tone.power == 0.0:
        return [_zero_solution(omega_g, None, two_pump=False)]

    a_in = tone.input_amplitude()
    flux = abs(a_in) ** 2

    # Nondimensionalize: rates in units of kappa, photons in units of n0.
    u = params.kappa
    n0 = u / max(abs(params.K_L), abs(params.K_R))
    jj = params.J / u
    hL = 0.5
    hR = 0.5 * params.loss_R / u
    dL = (omega_g - params.omega_L) / u
    dR = (omega_g - params.omega_R) / u
    kL = params.K_L * n0 / u
    kR = params.K_R * n0 / u
    fs = flux / (u * n0)

    x = Polynomial([0.0, 1.0])
    delta_R = dR - kR * x
    pn_L = x * (delta_R ** 2 + hR ** 2) / jj ** 2
    delta_L = dL - kL * pn_L
    lhs = pn_L * ((delta_L * delta_R - hL * hR - jj ** 2) ** 2
                  + (hL * delta_R + hR * delta_L) ** 2)
    rhs = fs * (delta_R ** 2 + hR ** 2)
    poly = (lhs - rhs).trim(tol=0.0)
    dpoly = poly.deriv()

    roots = poly.roots()
    candidates = []
    for r in roots:
        if abs(r.imag) > 1e-7 * (1.0 + abs(r.real)):
            continue
        xr = float(r.real)
        if xr < -1e-12:
            continue
        # Newton polish on the scalar polynomial.
        for _ in range(4):
            d = dpoly(xr)
            if d == 0.0:
                break
            xr -= poly(xr) / d
        candidates.append(max(xr, 0.0))

    # Deduplicate near-coincident roots.
    candidates.sort()
    uniq: list[float] = []
    for xr in candidates:
        if not uniq or abs(xr - uniq[-1]) > 1e-8 * (1.0 + abs(xr)):
            uniq.append(xr)

    sqk = math.sqrt(params.kappa)

    def back_substitute(xr):
        """Amplitudes for a trial right population xr (units of n0).

        With the Kerr shifts frozen at the trial populations the linear
        system is solved exactly, so the only remaining defect is the
        self-consistency |a_R|^2 = n_R.
        """
        n_R = xr * n0
        dRr = omega_g - params.omega_R - params.K_R * n_R
        zR = dRr + 1j * 0.5 * params.loss_R
        n_L = n_R * abs(zR) ** 2 / params.J ** 2
        dLr = omega_g - params.omega_L - params.K_L * n_L
        zL = dLr + 1j * 0.5 * params.kappa
        denom = zL * zR - params.J ** 2
        if denom == 0.0:
            return None
        a_L = -1j * sqk * a_in * zR / denom
        a_R = params.J * a_L / zR if zR != 0.0 else 1j * sqk * a_in / params.J
        return a_L, a_R

    def closure_defect(xr):
        amps = back_substitute(xr)
        if amps is None:
            return math.nan
        return abs(amps[1]) ** 2 / n0 - xr

    sols = []
    for xr in uniq:
        # Secant refinement of the population self-consistency; the
        # companion-matrix root loses absolute accuracy at strong drive.
        x0, x1 = xr, xr * (1.0 + 1e-9) + 1e-15
        g0 = closure_defect(x0)
        for _ in range(50):
            g1 = closure_defect(x1)
            if not (math.isfinite(g0) and math.isfinite(g1)) or g1 == g0:
                break
            x0, x1, g0 = x1, x1 - g1 * (x1 - x0) / (g1 - g0), g1
            if abs(x1 - x0) <= 1e-15 * (1.0 + abs(x1)):
                break
        xr = max(x1, 0.0) if math.isfinite(x1) else max(xr, 0.0)
        amps = back_substitute(xr)
        if amps is None:
            continue
        a_L, a_R = amps
        res = _single_pump_residual(params, omega_g, a_L, a_R, a_in)
        if res <= RESIDUAL_TOL:
            n_tot = abs(a_L) ** 2 + abs(a_R) ** 2
            if any(abs(n_tot - s[0]) <= 1e-6 * (1.0 + n_tot) for s in sols):
                continue
            sols.append((n_tot, a_L, a_R, res))

    if not sols:
        raise RuntimeError(
            f"no steady-state branch met the residual gate at P = {tone.power:.3e} W"
        )

    sols.sort(key=lambda t: t[0])
    out = []
    for i, (_, a_L, a_R, res) in enumerate(sols):
        out.append(MeanFieldSolution(
            alpha_L_g=a_L, alpha_R_g=a_R, alpha_L_c=None, alpha_R_c=None,
            n_L=abs(a_L) ** 2, n_R=abs(a_R) ** 2,
            residual=res, branch_id=i, omega_g=omega_g,
        ))
    return out


# -- double pump ------------------------------------------------------------

def _dp_residual_vec(z, params, omega_g, omega_c, ain_g, ain_c):
    """Complex residual 4-vector for the coupled two-tone system.

    z = (aLg, aRg, aLc, aRc). Cross-saturation enters through the
    tone-dependent detunings: each tone sees its own population once and
    the other tone's population twice.
    """
    aLg, aRg, aLc, aRc = z
    hL = 0.5 * params.kappa
    hR = 0.5 * params.loss_R
    J = params.J
    sqk = math.sqrt(params.kappa)
    ngL, ngR = abs(aLg) ** 2, abs(aRg) ** 2
    ncL, ncR = abs(aLc) ** 2, abs(aRc) ** 2

    dgL = omega_g - params.omega_L - params.K_L * (ngL + 2.0 * ncL)
    dgR = omega_g - params.omega_R - params.K_R * (ngR + 2.0 * ncR)
    dcL = omega_c - params.omega_L - params.K_L * (2.0 * ngL + ncL)
    dcR = omega_c - params.omega_R - params.K_R * (2.0 * ngR + ncR)

    return np.array([
        aRg * (dgR + 1j * hR) - J * aLg,
        aLg * (dgL + 1j * hL) - J * aRg + 1j * sqk * ain_g,
        aRc * (dcR + 1j * hR) - J * aLc,
        aLc * (dcL + 1j * hL) - J * aRc + 1j * sqk * ain_c,
    ])


def _dp_residual_norm(z, params, omega_g, omega_c, ain_g, ain_c):
    r = _dp_residual_vec(z, params, omega_g, omega_c, ain_g, ain_c)
    sqk = math.sqrt(params.kappa)
    scale = params.kappa * max(
        np.max(np.abs(z)), abs(ain_g) / sqk, abs(ain_c) / sqk, 1e-300)
    return float(np.max(np.abs(r))) / scale


def _linear_solution(params, omega, a_in):
    """Steady state of the Kerr-free dimer under one tone."""
    zL = omega - params.omega_L + 1j * 0.5 * params.kappa
    zR = omega - params.omega_R + 1j * 0.5 * params.loss_R
    denom = zL * zR - params.J ** 2
    a_L = -1j * math.sqrt(params.kappa) * a_in * zR / denom
    a_R = params.J * a_L / zR
    return a_L, a_R


def _newton_polish(z0, params, omega_g, omega_c, ain_g, ain_c,
                   tol=NEWTON_TOL, max_iter=MAX_NEWTON_ITER):
    """Damped Newton on the 8-real-dimensional system.

    Returns (z, residual_norm, converged, jac_cond). The Jacobian is a
    forward finite difference; Armijo backtracking keeps steps inside
    the basin near folds.
    """
    def pack(z):
        return np.concatenate([z.real, z.imag])

    def unpack(v):
        return v[:4] + 1j * v[4:]

    def fvec(v):
        r = _dp_residual_vec(unpack(v), params, omega_g, omega_c, ain_g, ain_c)
        return np.concatenate([r.real, r.imag])

    sqk = math.sqrt(params.kappa)
    scale = params.kappa * max(np.max(np.abs(z0)), abs(ain_g) / sqk,
                               abs(ain_c) / sqk, 1e-300)
    v = pack(np.asarray(z0, dtype=complex))
    f = fvec(v)
    cond = 0.0
    for _ in range(max_iter):
        fn = np.max(np.abs(f)) / scale
        if fn <= tol:
            return unpack(v), fn, True, cond
        # Forward-difference Jacobian.
        jac = np.empty((8, 8))
        h0 = 1e-7 * max(np.max(np.abs(v)), scale / params.kappa, 1.0)
        for k in range(8):
            vp = v.copy()
            vp[k] += h0
            jac[:, k] = (fvec(vp) - f) / h0
        cond = float(np.linalg.cond(jac))
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return unpack(v), fn, False, cond
        # Armijo backtracking on the residual norm.
        t = 1.0
        base = np.linalg.norm(f)
        for _ in range(40):
            f_new = fvec(v + t * step)
            if np.linalg.norm(f_new) <= (1.0 - 1e-4 * t) * base:
                break
            t *= 0.5
        else:
            return unpack(v), fn, False, cond
        v = v + t * step
        f = f_new
    fn = np.max(np.abs(f)) / scale
    return unpack(v), fn, fn <= tol, cond


def solve_double_pump(
    params: CircuitParams,
    gain: PumpTone,
    conversion: PumpTone,
    n_multistart: int = 6,
    seed: int = 0,
    ramp_steps: int = RAMP_STEPS,
    z0=None,
) -> list[MeanFieldSolution]:
    """Solve the coupled two-tone mean field.

    The primary branch is obtained by geometric power-ramp continuation
    (both tones scaled proportionally) from the linear solution; extra
    branches are probed with seeded random multi-starts at full power.
    Distinct converged solutions are deduplicated, residual-gated at
    1e-10 and sorted by total photon number. Branches whose Jacobian
    condition number exceeds 1e8 carry ``meta["near_fold"] = True``.

    ``z0`` optionally warm-starts Newton at full power (used by sweep
    drivers that move slowly through parameter space); continuation is
    the fallback when the warm start does not converge.
    """
    if gain.frequency == conversion.frequency:
        raise ValueError("pump tones must have distinct frequencies")
    omega_g, omega_c = gain.frequency, conversion.frequency
    if gain.power == 0.0 and conversion.power == 0.0:
        return [_zero_solution(omega_g, omega_c, two_pump=True)]

    ain_g = gain.input_amplitude()
    ain_c = conversion.input_amplitude()

    found = []

    def try_register(z, res, cond):
        if res > RESIDUAL_TOL:
            return
        for zk, _, _ in found:
            ref = max(np.max(np.abs(zk)), np.max(np.abs(z)), 1e-300)
            if np.max(np.abs(zk - z)) < 1e-6 * ref:
                return
        found.append((np.asarray(z, dtype=complex), res, cond))

    z = None
    if z0 is not None:
        z_try, res, ok, cond = _newton_polish(
            np.asarray(z0, dtype=complex), params, omega_g, omega_c, ain_g, ain_c)
        if ok:
            z = z_try
            try_register(z, res, cond)
    if z is None:
        # Continuation from the linear solution, amplitudes ramped geometrically.
        s_vals = np.geomspace(1e-2, 1.0, ramp_steps)
        zg = _linear_solution(params, omega_g, ain_g * s_vals[0])
        zc = _linear_solution(params, omega_c, ain_c * s_vals[0])
        z = np.array([zg[0], zg[1], zc[0], zc[1]], dtype=complex)
        last_ok = 0.0
        for s in s_vals:
            z_new, res, ok, cond = _newton_polish(
                z, params, omega_g, omega_c, ain_g * s, ain_c * s)
            if not ok:
                raise RuntimeError(
                    "continuation failed at pump scale "
                    f"{s:.4f} (last converged scale {last_ok:.4f})")
            z, last_ok = z_new, s
        try_register(z, res, cond)

    # Multi-start probes for coexisting branches.
    rng = np.random.default_rng(seed)
    base = max(np.max(np.abs(z)), 1.0)
    for _ in range(n_multistart):
        z0 = z + base * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        z_try, res, ok, cond = _newton_polish(
            z0, params, omega_g, omega_c, ain_g, ain_c)
        if ok:
            try_register(z_try, res, cond)

    found.sort(key=lambda t: float(np.sum(np.abs(t[0]) ** 2)))
    out = []
    for i, (zk, res, cond) in enumerate(found):
        aLg, aRg, aLc, aRc = zk
        meta = {"jacobian_cond": cond}
        if cond > 1e8:
            meta["near_fold"] = True
        out.append(MeanFieldSolution(
            alpha_L_g=aLg, alpha_R_g=aRg, alpha_L_c=aLc, alpha_R_c=aRc,
            n_L=abs(aLg) ** 2 + abs(aLc) ** 2,
            n_R=abs(aRg) ** 2 + abs(aRc) ** 2,
            residual=res, branch_id=i,
            omega_g=omega_g, omega_c=omega_c, meta=meta,
        ))
    return out


def _reflection_gamma(params: CircuitParams, omega, n_L, n_R):
    hL = 0.5 * params.kappa
    hR = 0.5 * params.loss_R
    dL = omega - params.omega_L - params.K_L * n_L
    dR = omega - params.omega_R - params.K_R * n_R
    zR = dR + 1j * hR
    return 1.0 + 1j * params.kappa * zR / (params.J ** 2 - (dL + 1j * hL) * zR)


def spectroscopy_response(
    params: CircuitParams, probe_freq: float, probe_power: float
) -> SpectroscopyResult:
    """Self-consistent populations and reflection at a probe tone.

    Solves the Kerr-shifted populations (n_L, n_R) for the probe, then
    evaluates the reflection coefficient at those populations. Returns
    the lowest-population branch plus the full branch list. At gamma = 0
    (and no right port) the reflection is unimodular at every frequency
    and power.
    """
    tone = PumpTone(frequency=probe_freq, power=probe_power)
    branches = solve_single_pump(params, tone)
    best = select_branch(branches)
    gam = _reflection_gamma(params, probe_freq, best.n_L, best.n_R)
    return SpectroscopyResult(n_L=best.n_L, n_R=best.n_R, gamma=gam, branches=branches)


def select_branch(branches: list[MeanFieldSolution]) -> MeanFieldSolution:
    """Lowest total-population branch; ties broken by branch_id."""
    if not branches:
        raise ValueError("empty branch list")
    return min(branches, key=lambda b: (b.n_total, b.branch_id))


def export_sweep_csv(path, rows) -> None:
    """Write a power-sweep branch table.

    ``rows`` is an iterable of (power_dBm, MeanFieldSolution). Columns:
    power_dBm, branch_id, n_L, n_R, Re/Im of the four amplitudes,
    residual.
    """
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([
            "power_dBm", "branch_id", "n_L", "n_R",
            "re_alpha_L_g", "im_alpha_L_g", "re_alpha_R_g", "im_alpha_R_g",
            "re_alpha_L_c", "im_alpha_L_c", "re_alpha_R_c", "im_alpha_R_c",
            "residual",
        ])
        for p_dbm, sol in rows:
            aLc = sol.alpha_L_c if sol.alpha_L_c is not None else 0.0j
            aRc = sol.alpha_R_c if sol.alpha_R_c is not None else 0.0j
            w.writerow([
                repr(float(p_dbm)), sol.branch_id,
                repr(float(sol.n_L)), repr(float(sol.n_R)),
                repr(complex(sol.alpha_L_g).real), repr(complex(sol.alpha_L_g).imag),
                repr(complex(sol.alpha_R_g).real), repr(complex(sol.alpha_R_g).imag),
                repr(complex(aLc).real), repr(complex(aLc).imag),
                repr(complex(aRc).real), repr(complex(aRc).imag),
                repr(float(sol.residual)),
            ])
