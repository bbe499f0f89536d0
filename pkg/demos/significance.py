"""Systemic significance and the systemicness matrix of the calibrated scenarios."""

# %%
import numpy as np

from fefficient import builtin_scenario

np.set_printoptions(precision=3, suppress=True)

# %% Each bank's significance grows as the market becomes less liquid.
for name in ("L", "I", "H"):
    model = builtin_scenario(name).model()
    print(f"{name}: v = {model.v}, spectral bound {model.spectral_bound:.3f}, stable={model.stable}")

# %% S maps a shock on one asset into price pressure on every asset.
model = builtin_scenario("H").model()
print(model.s[:3, :3])
