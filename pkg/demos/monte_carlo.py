"""Market capitalisation under shocks: f-efficient holdings versus diversification."""

# %%
from fefficient import builtin_scenario
from fefficient.montecarlo import compare_holdings, cross_scenario_table, empirical_density

comparisons = {name: compare_holdings(builtin_scenario(name), seed=20200319) for name in ("L", "I", "H")}

# %% Seven statistics per scenario plus ratios to the liquid scenario.
for stat, label, values, ratios in cross_scenario_table(comparisons):
    cells = "  ".join(f"{k}={v:8.4f}" for k, v in values.items())
    rel = "  ".join(f"{k}={v:7.2f}" for k, v in ratios.items())
    print(f"{stat:12s} {label:12s} {cells}   {rel}")

# %% Box-plot summaries of MC^e - MC^f.
for name, comp in comparisons.items():
    box = empirical_density(comp.efficient.samples_d)["box"]
    print(name, {k: round(v, 4) for k, v in box.items()})
