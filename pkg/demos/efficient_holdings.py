"""f-efficient holdings for the calibrated scenarios versus full diversification."""

# %%
import numpy as np

from fefficient import builtin_scenario
from fefficient.solver import FeasibilitySpec, diversified_holdings, msd, solve_f_efficient

np.set_printoptions(precision=2, suppress=True)

# %% With two banks the efficient matrix is unique and contains short positions.
for name in ("L", "I", "H"):
    spec = FeasibilitySpec.from_model(builtin_scenario(name).model())
    solset = solve_f_efficient(spec)
    div = diversified_holdings(spec)
    print(name, "rows 1, 3, 9:\n", solset.particular[[0, 2, 8]])
    print(f"  MSD optimal {solset.msd_optimal:.4f} vs diversified {msd(solset, div):.4f}")
    print(f"  distance from diversification {np.linalg.norm(solset.particular - div):.2f}")
