"""Drift-matrix eigenvalues along the cooperativity-gap axis.

For balanced couplings the four eigenvalues depend only on the gap
C_TMS - C_BS. Walking the gap from negative to positive passes through
three landmarks:

  gap = -1  all eigenvalues have |Re| = |Im| = kappa/2 (the broadband
            amplification point),
  gap =  0  fourfold coalescence at -kappa/2 (exceptional point),
  gap = +1  one eigenvalue reaches zero (instability threshold).

The script prints the landmarks and writes the full sweep to
demos/output/eigenvalue_sweep.csv.
"""

import csv
import pathlib

import numpy as np

from kerrdimer.analysis import eigenvalue_sweep

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

gaps = np.linspace(-2.0, 2.0, 401)
rows = eigenvalue_sweep(1.0, gaps)

for rec in rows:
    if rec["classification"] in ("EP", "BP"):
        ev = ", ".join(f"{e:.3f}" for e in rec["eigenvalues"])
        print(f"gap = {rec['gap']:+.2f}  [{rec['classification']}]  {ev}")

# Instability onset: largest real part crosses zero at gap = +1.
onset = next(r["gap"] for r in rows if r["eigenvalues"].real.max() > 1e-12)
print(f"instability onset near gap = {onset:+.2f}")

with open(OUT / "eigenvalue_sweep.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["gap"] + [f"{p}_ev{i}" for i in range(4) for p in ("re", "im")]
               + ["classification"])
    for rec in rows:
        w.writerow([rec["gap"]]
                   + [float(x) for e in rec["eigenvalues"] for x in (e.real, e.imag)]
                   + [rec["classification"]])
print(f"sweep -> {OUT / 'eigenvalue_sweep.csv'}")
