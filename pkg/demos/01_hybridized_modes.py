"""Hybridized modes of the coupled Kerr dimer.

Loads the sample device, diagonalizes the linear hopping problem and
prints the normal-mode frequencies, linewidths and Kerr coefficients.
The lower mode inherits most of its weight from the left (port)
resonator, so it is the narrower of the two.
"""

import math
import pathlib

from kerrdimer import hybridize
from kerrdimer.analysis import kappa_equivalent
from kerrdimer.serialize import circuit_from_dict, load_json

TWO_PI = 2.0 * math.pi
HERE = pathlib.Path(__file__).parent

params = circuit_from_dict(load_json(HERE / "device.json"))
hyb = hybridize(params)

print("bare resonators")
print(f"  f_L = {params.omega_L / TWO_PI / 1e9:.4f} GHz   "
      f"f_R = {params.omega_R / TWO_PI / 1e9:.4f} GHz   "
      f"J/2pi = {params.J / TWO_PI / 1e6:.0f} MHz")

print("hybridized modes")
print(f"  f_a = {hyb.omega_a / TWO_PI / 1e9:.4f} GHz   "
      f"kappa_a/2pi = {hyb.kappa_a / TWO_PI / 1e6:.2f} MHz")
print(f"  f_b = {hyb.omega_b / TWO_PI / 1e9:.4f} GHz   "
      f"kappa_b/2pi = {hyb.kappa_b / TWO_PI / 1e6:.2f} MHz")
print(f"  mixing angle theta = {hyb.theta:.4f} rad")

# The two-mode amplifier behaves like a single mode with the harmonic
# mean of the linewidths.
k_eq = kappa_equivalent(hyb.kappa_a, hyb.kappa_b)
print(f"  kappa_eq/2pi = {k_eq / TWO_PI / 1e6:.2f} MHz")

print("normal-mode Kerr (Hz)")
print(f"  K_aa/2pi = {hyb.K_aa / TWO_PI:.1f}   K_bb/2pi = {hyb.K_bb / TWO_PI:.1f}   "
      f"K_ab/2pi = {hyb.K_ab / TWO_PI:.1f}")
