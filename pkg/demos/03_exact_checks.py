"""Exact integer checks on the numerator polynomial of lambda'(t)."""
from __future__ import annotations

from hcwand import exact

for k in (2, 3, 4):
    p = exact.theta1_poly(k)
    print(f"k={k}: theta1 coefficients {list(p.coeffs)}")

print()
for r in exact.verify_all(6):
    print(f"k={r.k:2d} {r.name:22s} {'pass' if r.passed else 'FAIL'}  {r.detail}")
