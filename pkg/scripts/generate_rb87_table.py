"""Regenerate the shipped 87Rb |nS, m_j=1/2> table with the ARC calculator.

Requires ``arc-alkali-rydberg-calculator`` (not a runtime dependency).

    python scripts/generate_rb87_table.py > src/rydnet/data/rb87_ns.csv
"""
import sys

import numpy as np
from arc import PairStateInteractions, Rubidium87, StarkMap

AU_FIELD_V_PER_M = 5.14220674763e11
TWO_PI = 2 * np.pi


def c6_rad_us(atom, n):
    calc = PairStateInteractions(atom, n, 0, 0.5, n, 0, 0.5, 0.5, 0.5)
    # GHz um^6, sign: negative = repulsive in ARC's convention
    c6 = calc.getC6perturbatively(0, 0, 5, 25e9)
    return abs(c6) * 1e3 * TWO_PI


def alpha_rad_us(atom, n):
    # stay well inside the quadratic regime: 5% of the Inglis-Teller field
    f_max = 0.05 * AU_FIELD_V_PER_M / (3 * n**5)
    sm = StarkMap(atom)
    sm.defineBasis(n, 0, 0.5, 0.5, n - 6, n + 6, 25, progressOutput=False)
    sm.diagonalise(np.linspace(0.0, f_max, 25), progressOutput=False)
    alpha = sm.getPolarizability(showPlot=False, minStateContribution=0.9)
    # MHz cm^2/V^2 -> rad/us per (V/cm)^2
    return abs(alpha) * TWO_PI


def main(n_lo=50, n_hi=110):
    atom = Rubidium87()
    out = sys.stdout
    out.write("n,c6_rad_us_um6,alpha_rad_us_per_Vcm2\n")
    for n in range(n_lo, n_hi + 1):
        out.write(f"{n},{c6_rad_us(atom, n):.10e},{alpha_rad_us(atom, n):.10e}\n")
        out.flush()


if __name__ == "__main__":
    main()
