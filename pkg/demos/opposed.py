"""Two agents with opposed tastes and a single threshold cut.

Agent 1's density decreases and agent 2's increases.  The closed-form
split of the disputed cell agrees with the market solver, and welfare
peaks at the symmetric cut.
"""

import numpy as np

from conflation import Classification, catalog, induce, solve_linear, solve_opposed
from conflation.solvers import opposed_derivative

e = catalog.opposed_linear()
for eta in (0.2, 0.5, 0.6, 0.8):
    rep = solve_opposed(e, catalog.threshold_family(eta))
    market = solve_linear(induce(e, catalog.threshold_family(eta))).utilities
    print(f"eta={eta}: theta={rep.theta:.4f} disputed cell {rep.disputed_index} xi={rep.xi:.4f} "
          f"V={np.round(rep.utilities, 6)} market={np.round(market, 6)} welfare={sum(rep.utilities):.4f}")

pi = Classification([0, 0.45, 0.55, 1])
print("dV1/d(left end of disputed cell) on", pi.to_list(), "=", round(opposed_derivative(e, pi), 6))
