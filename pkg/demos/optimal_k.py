"""How many commodities should a market trade when each costs c?

For m agents with interleaved supports over m**2 cells, welfare grows by
exactly c per extra cell, so every k ties and the finest market is chosen.
Identical agents gain nothing from any cut.
"""

from conflation import catalog
from conflation.analysis import optimal_k

for m in (2, 3):
    res = optimal_k(catalog.optimal_k_example(m), 1 / (m + 1))
    print(f"m={m}: k*={res.k_star}  k_bar={res.k_bar:.6g}  tied k={res.ties}")
    for k, sw, net in res.table:
        print(f"    k={k:2d}  SW={sw:.6f}  SW-ck={net:.6f}")

for c in (0.1, 0.5):
    print(f"identical agents, c={c}: k*={optimal_k(catalog.identical_agents(3), c).k_star}")
