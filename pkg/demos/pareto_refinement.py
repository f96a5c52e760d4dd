"""Refining a classification can make every agent better off.

Three agents; agent 1 values only [0, 1/2).  Moving the cut from 1/2 to
1/3 lets agent 1 buy exactly what it wants and frees the rest for the
others.
"""

from conflation import Classification, catalog
from conflation.analysis import competitive_configuration, pareto_dominates, social_welfare

e = catalog.pareto_one()
coarse, eq_coarse = competitive_configuration(e, Classification([0, 0.5, 1]))
fine, eq_fine = competitive_configuration(e, Classification([0, 1 / 3, 1]))

print("cut at 1/2: utilities", eq_coarse.utilities.round(6), "welfare", round(social_welfare(e, coarse), 6))
print("cut at 1/3: utilities", eq_fine.utilities.round(6), "welfare", round(social_welfare(e, fine), 6))
print("finer configuration dominates:", pareto_dominates(e, fine, coarse))
