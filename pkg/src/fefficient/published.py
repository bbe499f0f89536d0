"""Reference values the builtin scenarios and fixtures are expected to reproduce.

Scenario values are printed to two decimals; the three-bank matrices are exact.
"""

import numpy as np

SIGNIFICANCE = {
    "L": (1.23, 1.37),
    "I": (2.91, 3.23),
    "H": (5.54, 6.16),
}
SIGNIFICANCE_ATOL = 0.01


def _bank_rows(a, b, c):
    # asset groups: 2 + 6 + 2
    return np.array([a, a] + [b] * 6 + [c, c])


EFFICIENT_HOLDINGS = {
    "L": np.column_stack([_bank_rows(-3.79, 0.87, 1.37), _bank_rows(3.87, -0.79, -1.29)]),
    "I": np.column_stack([_bank_rows(-3.87, 1.07, 0.87), _bank_rows(3.95, -0.99, -0.79)]),
    "H": np.column_stack([_bank_rows(-0.41, 0.10, 0.31), _bank_rows(0.49, -0.02, -0.23)]),
}
EFFICIENT_HOLDINGS_ATOL = 0.01

# (statistic, holdings) -> {scenario: value}
TABLE = {
    ("distance", "f_efficient"): {"L": 8.61, "I": 8.74, "H": 1.08},
    ("mean_mc_e", "f_efficient"): {"L": 12.07, "I": 12.20, "H": 13.45},
    ("mean_mc_e", "diversified"): {"L": 12.23, "I": 12.65, "H": 13.74},
    ("var_mc_e", "f_efficient"): {"L": 0.44, "I": 2.23, "H": 37.20},
    ("var_mc_e", "diversified"): {"L": 0.55, "I": 3.95, "H": 41.39},
    ("mean_sq_dev", "f_efficient"): {"L": 0.02, "I": 0.10, "H": 9.66},
    ("mean_sq_dev", "diversified"): {"L": 0.06, "I": 0.66, "H": 12.14},
}
TABLE_RATIOS = {
    ("distance", "f_efficient"): {"I/L": 1.02, "H/L": 0.13},
    ("mean_mc_e", "f_efficient"): {"I/L": 1.01, "H/L": 1.11},
    ("mean_mc_e", "diversified"): {"I/L": 1.03, "H/L": 1.12},
    ("var_mc_e", "f_efficient"): {"I/L": 5.07, "H/L": 84.55},
    ("var_mc_e", "diversified"): {"I/L": 7.18, "H/L": 75.25},
    ("mean_sq_dev", "f_efficient"): {"I/L": 5.00, "H/L": 483.00},
    ("mean_sq_dev", "diversified"): {"I/L": 11.00, "H/L": 202.33},
}
TABLE_RTOL = 0.02
TABLE_SE_MULTIPLE = 4.0
TABLE_SAMPLES = 100_000

THREE_BANK = {
    "mu": (0.0, 0.0, 0.0),
    "sigma2": (0.15, 0.2, 0.3),
    "v": (0.15, 0.1, 0.05),
    "x": 0.08,
}
THREE_BANK_CLOSEST_TO_DIVERSIFIED = 0.08 * np.array(
    [[2 / 3, 1 / 3, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 1 / 3, 2 / 3]]
)
THREE_BANK_CLOSEST_TO_DIVERSE = 0.08 * np.array(
    [[5 / 6, 0.0, 1 / 6], [0.0, 1.0, 0.0], [1 / 6, 0.0, 5 / 6]]
)
THREE_BANK_ATOL = 1e-10
THREE_BANK_NULL_DIMENSION = 2
