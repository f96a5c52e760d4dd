"""Price of a commodity moves although nothing about it changes.

Cells A = [0, 1/4) and D = [3/4, 1] stay fixed while the cut between B
and C slides.  The equilibrium price ratio p(A)/p(D) traces a
four-branch curve between 2/3 and 3/2.
"""

import numpy as np

from conflation import catalog
from conflation.analysis import aligned_grid, price_ratio_sweep

grid = aligned_grid(199, [1 / 6, 1 / 2, 5 / 6])
sweep = price_ratio_sweep(catalog.relative_scarcity(), catalog.relative_scarcity_family, 0, 3, grid)
phi = np.array([catalog.relative_scarcity_ratio(t) for t in grid])

print("max |computed - closed form|:", f"{np.max(np.abs(sweep.price_ratio - phi)):.2e}")
print("range of p(A)/p(D):", round(sweep.price_ratio.min(), 6), "to", round(sweep.price_ratio.max(), 6))
for t in (0.1, 1 / 6, 0.3, 0.5, 0.7, 5 / 6, 0.9):
    k = int(np.argmin(np.abs(grid - t)))
    u1, u2 = sweep.utilities[k]
    print(f"t={grid[k]:.4f}  p(A)/p(D)={sweep.price_ratio[k]:.6f}  u1/u2={u1 / u2:.6f}")
