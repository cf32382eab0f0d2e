"""Raw recursion on a finite tree: where do perturbed leaves end up?

Below the two-level threshold the root alternates between the two laws of
the 2-cycle; above it the root settles on the translation-invariant law.
Convergence is slow near the threshold (contraction 1/2 per two levels at
k=2, lambda=1), so the depth is large and the truncation exceeds it.
"""
from __future__ import annotations

from hcwand.cli import simulate

for lam in (1.0, 3.0):
    rep = simulate("ti-q2", 2, lam, None, depth=150, M=160, boundary="perturbed", seed=0)
    print(f"lambda={lam}: nearest target {rep['nearest_target']}, deviation {rep['target_deviation']:.2e}")
    print(f"  root period {rep['root_period']}, next level {rep['next_period']}")
    print(f"  two-level residual {rep['pair_residual']:.2e}")
    for level in (0, 10, 50, 100, 150):
        print(f"  level {level:3d}: distance to the TI law {rep['metrics'][level]:.3e}")
