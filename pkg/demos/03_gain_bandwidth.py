"""Gain-bandwidth products of the three operating modes.

A single-pump amplifier (SP) trades bandwidth for gain: BW ~ kappa /
sqrt(G0). Operating the double-pumped dimer at the broadband point (BP,
cooperativity gap -1) largely removes that trade-off. The script scans
gain targets in the symmetric quadrature model and prints BW and the
GBW product for SP, the exceptional point (EP) and the BP.
"""

import math

from kerrdimer.analysis import gbw_scan

TWO_PI = 2.0 * math.pi
TARGETS = [10.0, 15.0, 20.0, 25.0]

print(f"{'mode':>4} {'G0 (dB)':>8} {'BW/kappa':>9} {'BW*sqrt(G0)':>12}")
for mode in ("SP", "EP", "BP"):
    for row in gbw_scan(mode, TARGETS, kappa=1.0, model="quadrature"):
        gbw = row["BW"] * math.sqrt(10.0 ** (row["G0_dB"] / 10.0))
        print(f"{mode:>4} {row['G0_dB']:8.2f} {row['BW']:9.4f} {gbw:12.4f}")
    print()

sp = gbw_scan("SP", [20.0], kappa=1.0)[0]
bp = gbw_scan("BP", [20.0], kappa=1.0)[0]
print(f"at 20 dB the BP bandwidth is {bp['BW'] / sp['BW']:.1f}x the SP bandwidth")
