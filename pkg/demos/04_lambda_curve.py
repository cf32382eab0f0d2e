"""Tabulate lambda(t) for k=3 and two even activities (plot-ready CSV)."""
from __future__ import annotations

import csv
import sys

from hcwand import scan

w = csv.writer(sys.stdout)
w.writerow(["lambda2", "t", "lambda", "a", "c"])
for lam2 in (0.4, 1.6):
    res = scan.lambda_curve(3, lam2, t_max=10.0, steps=81)
    for p in res.points:
        w.writerow([lam2, p.t, p.lam, p.a, p.c])
    print(f"# lambda2={lam2}: minimum {res.lam_min!r} at t={res.t_min}, closed form {res.lam_min_closed!r}", file=sys.stderr)
