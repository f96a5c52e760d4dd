"""Every configuration can be improved by a finer classification.

Agent 1 values a fat Cantor set and agent 2 its complement.  Any cell
agent 1 holds contains a removed interval worth nothing to agent 1;
carving it out and handing it to agent 2 helps agent 2 at no cost.
"""

import numpy as np

from conflation import Classification, Configuration, catalog
from conflation.analysis import svc_improvement_demo

depth = 3
e = catalog.svc_economy(depth)
cfg = Configuration(Classification.trivial(), np.array([[0.5], [0.5]]))
for step in range(3):
    rho, better = svc_improvement_demo(depth, cfg)
    before, after = cfg.utilities(e), better.utilities(e)
    print(f"step {step}: {cfg.classification.k} -> {rho.k} cells, "
          f"V1 {before[0]:.6f} -> {after[0]:.6f}, V2 {before[1]:.6f} -> {after[1]:.6f}")
    cfg = better
