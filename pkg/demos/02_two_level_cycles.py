"""Two-level (alternating) laws: 2-cycles of f and g below their thresholds."""
from __future__ import annotations

import numpy as np

from hcwand import bipartite

for k in (2, 3, 4):
    lcr = bipartite.lambda_cr2(k)
    print(f"\nk={k}: 2-cycles of f exist for lambda < {lcr:.6f}")
    for frac in (0.25, 0.5, 0.9, 0.99, 1.0, 1.5):
        sols = bipartite.solve_bip_q2(k, frac * lcr)
        line = f"  lambda={frac * lcr:9.4f} slope f'(x0)={sols.central_derivative:+.6f} count={sols.count}"
        if sols.count == 3:
            a1, a2 = sols.solutions[1]
            line += f"  cycle ({a1:.6f}, {a2:.6f})"
        print(line)

# q=4: the I4 reduction with gamma != 1 moves the threshold linearly in 1 + gamma
k = 3
for gamma in (0.5, 1.0, 2.0):
    print(f"k={k} gamma={gamma}: threshold {bipartite.lambda_cr3(k, gamma):.6f}")

cert = bipartite.s_shape_certificate("f", 2, 1.0)
print("\nS-shape of f o f at k=2, lambda=1:", "valid" if cert.valid else "INVALID")
print(f"  h(0+) = {cert.h_at_zero:.6f} (lambda/2^k = {cert.h_at_zero_closed:.6f}), inflection at x = {cert.inflection:.6f}")

found = bipartite.multistart_search(2, 1.0, 1.0, starts=32)
print(f"\nlocal search on the full q=4 system found {len(found)} solutions:")
for x in sorted(found):
    print("  ", np.round(x, 6), sorted(bipartite.memberships(x, 1e-8)))
