"""Choosing which assets to sell: the most liquid strategy against random alternatives."""

# %%
import numpy as np

from fefficient import builtin_scenario
from fefficient.liquidation import (
    LiquidationProblem,
    most_liquid_strategy,
    msd_batch,
    msd_of_strategy,
    random_strategies,
    verify_local_minimum,
)

problem = LiquidationProblem.from_model(builtin_scenario("I").model())
print("liquidity ratios", np.round(problem.liquidity, 3))

# %% Selling only the most liquid assets lowers the MSD.
best = most_liquid_strategy(problem)
print("support", np.flatnonzero(best[:, 0]))
print(f"MSD proportional {msd_of_strategy(problem, builtin_scenario('I').banks.alpha):.4f}")
print(f"MSD most liquid  {msd_of_strategy(problem, best):.4f}")

# %% No sampled bank-independent strategy does better.
rng = np.random.default_rng(1)
others = msd_batch(problem, random_strategies(rng, *problem.shape, 1000, bank_independent=True))
print(f"best random {others.min():.4f}; local minimum: {verify_local_minimum(problem, best, rng=rng)}")
