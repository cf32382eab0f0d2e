"""Translation-invariant boundary laws for periods 2 and 4.

For period 2 there is always exactly one law.  For period 4 the diagonal law
is joined by an off-diagonal pair once lambda passes the bottom of the
lambda(t) curve.
"""
from __future__ import annotations

import numpy as np

from hcwand import ti

k, lam2 = 2, 1.0
lcr = ti.lambda_cr1(k, lam2)
print(f"k={k}, lambda2={lam2}: off-diagonal laws appear above lambda = {lcr}")

for lam in np.linspace(0.5 * lcr, 2.0 * lcr, 7):
    q2 = ti.enumerate_ti_q2(k, lam)
    q4 = ti.enumerate_ti_q4(k, lam, lam2)
    laws = ", ".join(f"({a:.5f}, {c:.5f})" for a, c in q4.solutions)
    print(f"lambda={lam:7.4f}  q=2: a*={q2.solutions[0][0]:.6f}   q=4 [{q4.count}]: {laws}")

# the transverse eigenvalue at the diagonal law crosses 1 exactly at the threshold
x0 = ti.solve_ti_q4_diagonal(k, lcr, lam2)
print("transverse eigenvalue at threshold:", ti.transverse_eigenvalue(k, lam2, x0))
