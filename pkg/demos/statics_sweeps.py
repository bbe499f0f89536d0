"""Two banks, two assets: how the efficient matrix moves with risk, mean and significance."""

# %%
import numpy as np

from fefficient.statics import FIGURES, TwoByTwoInputs, check_derivative_signs

# %% Distance from diversification vanishes only when the assets look alike.
for name, preset in FIGURES.items():
    table = preset.sweep(11)
    print(f"--- {name}")
    for row in zip(table["param"], table["q11"], table["q21"], table["distance"]):
        print("  " + "  ".join(f"{v:9.4f}" for v in row))

# %% Finite-difference signs agree with the closed-form case analysis.
point = TwoByTwoInputs(0.08, (0.0, 0.0), (0.1, 0.2), (0.04, 0.07))
for lemma in ("sigma1", "v2"):
    report = check_derivative_signs(point, lemma)
    print(lemma, {k: f"{v:+.3e}" for k, v in report.numeric.items()}, "ok" if report.ok else report.violations)
print(np.round(check_derivative_signs(point.with_parameter("sigma1_sq", 0.2), "mu2").numeric["q11"], 12))
