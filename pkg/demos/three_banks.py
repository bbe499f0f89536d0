"""Three banks, three assets: a two-dimensional family of efficient holdings."""

# %%
import numpy as np

from fefficient.market import shock_statistics_matrix
from fefficient.solver import (
    FeasibilitySpec,
    diverse_holdings,
    diversified_holdings,
    min_distance_solution,
    solve_f_efficient,
)

np.set_printoptions(precision=4, suppress=True)

x = 0.08
spec = FeasibilitySpec(np.full(3, x), np.full(3, x), (0.15, 0.1, 0.05),
                       shock_statistics_matrix(np.zeros(3), (0.15, 0.2, 0.3)))
solset = solve_f_efficient(spec)
print("null-space dimension", solset.dimension)

# %% Closest efficient matrices to diversification and to diversity, in units of x.
print(min_distance_solution(solset, diversified_holdings(spec)) / x)
print(min_distance_solution(solset, diverse_holdings(spec)) / x)

# %% Every member of the family has the same MSD.
rng = np.random.default_rng(0)
for lam in rng.normal(scale=0.05, size=(3, solset.dimension)):
    q = solset.member(lam)
    y = q @ spec.v
    print(f"MSD {y @ spec.g @ y:.3e}  (optimal {solset.msd_optimal:.3e})")
