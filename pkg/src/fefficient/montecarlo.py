"""Seeded Monte-Carlo estimates of the exact market capitalisation.

Shocks are drawn in fixed-size blocks. Block ``j`` uses a Philox generator
keyed by the seed with counter ``j``, so every sample depends only on
``(seed, sample index)`` and results do not change with the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import InfeasibleHoldings, UnstableSystem
from .market import MarketModel
from .scenarios import ScenarioConfig
from .solver import FeasibilitySpec, diversified_holdings, solve_f_efficient

BLOCK_SIZE = 8192
FEASIBILITY_ATOL = 1e-8
HOLDINGS_LABELS = ("f_efficient", "diversified", "custom")
TABLE_ROWS = (
    ("distance", "f_efficient", "distance_from_diversification"),
    ("mean_mc_e", "f_efficient", "mean_mc_e"),
    ("mean_mc_e", "diversified", "mean_mc_e"),
    ("var_mc_e", "f_efficient", "var_mc_e"),
    ("var_mc_e", "diversified", "var_mc_e"),
    ("mean_sq_dev", "f_efficient", "mean_sq_dev"),
    ("mean_sq_dev", "diversified", "mean_sq_dev"),
)


def _block_normals(seed: int, block: int, rows: int, k: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, block])
    return np.random.Generator(bitgen).standard_normal((rows, k))


def _block_ranges(samples: int, block_size: int):
    starts = range(0, samples, block_size)
    return [(j, s, min(s + block_size, samples)) for j, s in enumerate(starts)]


def draw_shocks(mean, variance, samples: int, seed: int, workers: int = 1,
                block_size: int = BLOCK_SIZE) -> np.ndarray:
    """``samples x K`` independent normal shocks with the given per-asset moments."""
    mean = numerics.as_vector(mean, "mean")
    sd = np.sqrt(numerics.as_vector(variance, "variance", mean.size))
    out = np.empty((samples, mean.size))

    def fill(job):
        j, lo, hi = job
        out[lo:hi] = mean + sd * _block_normals(seed, j, hi - lo, mean.size)

    jobs = _block_ranges(samples, block_size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, jobs))
    else:
        for job in jobs:
            fill(job)
    return out


@dataclass(frozen=True)
class RunSummary:
    mean_mc_e: float
    var_mc_e: float
    mean_sq_dev: float
    distance_from_diversification: float
    standard_errors: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "mean_mc_e": self.mean_mc_e,
            "var_mc_e": self.var_mc_e,
            "mean_sq_dev": self.mean_sq_dev,
            "distance_from_diversification": self.distance_from_diversification,
        }
        out.update({f"se_{k}": v for k, v in self.standard_errors.items()})
        return out


def summarize(mc_e: np.ndarray, samples_d: np.ndarray, distance: float) -> RunSummary:
    n = mc_e.size
    mean = float(mc_e.mean())
    centred = mc_e - mean
    var = float(centred @ centred / max(n - 1, 1))
    sq = samples_d * samples_d
    msd = float(sq.mean())
    m4 = float(np.mean(centred**4))
    se = {
        "mean_mc_e": float(np.sqrt(var / n)),
        "var_mc_e": float(np.sqrt(max(m4 - var * var, 0.0) / n)),
        "mean_sq_dev": float(sq.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
    }
    return RunSummary(mean, var, msd, distance, se)


@dataclass(frozen=True, eq=False)
class ScenarioRun:
    config: ScenarioConfig
    holdings_label: str
    holdings: np.ndarray
    samples_d: np.ndarray
    mc_e: np.ndarray
    mc_f: np.ndarray
    d_first_order: np.ndarray
    summary: RunSummary
    seed: int

    def table(self) -> dict:
        """Per-sample columns for CSV output."""
        return {
            "sample_index": np.arange(self.samples_d.size),
            "d_exact": self.samples_d,
            "mc_e": self.mc_e,
            "mc_f": self.mc_f,
        }


def check_feasible(config: ScenarioConfig, holdings) -> np.ndarray:
    q = numerics.as_matrix(holdings, "holdings")
    banks = config.banks
    if q.shape != banks.holdings.shape:
        raise InfeasibleHoldings(f"holdings are {q.shape}, expected {banks.holdings.shape}")
    rows = np.abs(q.sum(axis=1) - banks.aggregate).max()
    cols = np.abs(q.sum(axis=0) - banks.budgets).max()
    if rows > FEASIBILITY_ATOL:
        raise InfeasibleHoldings(f"asset totals differ from the scenario by {rows:.3g}")
    if cols > FEASIBILITY_ATOL:
        raise InfeasibleHoldings(f"bank budgets differ from the scenario by {cols:.3g}")
    return q


def run_simulation(config: ScenarioConfig, holdings, seed: int | None = None,
                   label: str = "custom", workers: int = 1, samples: int | None = None) -> ScenarioRun:
    """Exact and fundamental market capitalisation for ``samples`` shock draws."""
    if label not in HOLDINGS_LABELS:
        raise ValueError(f"label must be one of {HOLDINGS_LABELS}")
    q = check_feasible(config, holdings)
    base = config.model()
    model = base.with_holdings(q)
    if not model.stable:
        raise UnstableSystem("spectral radius of S is not below one for these holdings")
    seed = config.seed if seed is None else int(seed)
    n = config.samples if samples is None else int(samples)
    k = config.assets.count
    m = numerics.inverse(np.eye(k) - model.s)
    q_tot, p0 = config.assets.q_tot, config.assets.p0
    exact_w = m.T @ q_tot
    y = q @ model.v
    base_cap = float(q_tot @ p0)

    z = draw_shocks(config.shock_mean, config.shock_variance, n, seed, workers)
    mc_e = np.empty(n)
    mc_f = np.empty(n)
    d1 = np.empty(n)
    # per block so the floating-point path does not depend on n
    for _, lo, hi in _block_ranges(n, BLOCK_SIZE):
        zb = z[lo:hi]
        mc_e[lo:hi] = base_cap + zb @ exact_w
        mc_f[lo:hi] = base_cap + zb @ q_tot
        d1[lo:hi] = zb @ y
    d = mc_e - mc_f
    distance = numerics.frobenius_norm(q - diversified_holdings(FeasibilitySpec.from_model(model)))
    return ScenarioRun(config, label, q, d, mc_e, mc_f, d1, summarize(mc_e, d, distance), seed)


def efficient_and_diversified(config: ScenarioConfig):
    """Particular f-efficient holdings and full diversification for the scenario."""
    spec = FeasibilitySpec.from_model(config.model())
    return solve_f_efficient(spec).particular, diversified_holdings(spec)


@dataclass(frozen=True, eq=False)
class HoldingsComparison:
    efficient: ScenarioRun
    diversified: ScenarioRun

    def rows(self) -> list:
        """The seven statistics rows as ``(statistic, holdings, value, standard_error)``."""
        runs = {"f_efficient": self.efficient, "diversified": self.diversified}
        out = []
        for stat, label, attr in TABLE_ROWS:
            s = runs[label].summary
            out.append((stat, label, getattr(s, attr), s.standard_errors.get(attr, 0.0)))
        return out


def compare_holdings(config: ScenarioConfig, seed: int | None = None, workers: int = 1,
                     samples: int | None = None) -> HoldingsComparison:
    """f-efficient vs diversified holdings on common random numbers."""
    eff, div = efficient_and_diversified(config)
    return HoldingsComparison(
        run_simulation(config, eff, seed, "f_efficient", workers, samples),
        run_simulation(config, div, seed, "diversified", workers, samples),
    )


def cross_scenario_table(comparisons: dict, reference: str = "L") -> list:
    """Rows of ``(statistic, holdings, {scenario: value}, {ratio_name: value})``.

    Ratios divide each non-reference scenario by the reference one.
    """
    names = list(comparisons)
    out = []
    for idx, (stat, label, _) in enumerate(TABLE_ROWS):
        values = {name: comparisons[name].rows()[idx][2] for name in names}
        ref = values.get(reference)
        ratios = {f"{name}/{reference}": values[name] / ref for name in names if name != reference and ref}
        out.append((stat, label, values, ratios))
    return out


def empirical_density(samples, bins: int = 50) -> dict:
    """Histogram density plus a box-plot summary with 1.5 IQR whiskers."""
    x = numerics.as_vector(samples, "samples")
    if x.size == 0:
        raise ValueError("samples must be nonempty")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        edges = np.linspace(lo - 0.5, hi + 0.5, bins + 1)
    else:
        edges = np.linspace(lo, hi, bins + 1)
    density, edges = np.histogram(x, bins=edges, density=True)
    q1, med, q3 = np.percentile(x, [25, 50, 75])
    iqr = q3 - q1
    inside = x[(x >= q1 - 1.5 * iqr) & (x <= q3 + 1.5 * iqr)]
    return {
        "center": 0.5 * (edges[:-1] + edges[1:]),
        "density": density,
        "width": np.diff(edges),
        "box": {
            "min": lo,
            "q1": float(q1),
            "median": float(med),
            "q3": float(q3),
            "max": hi,
            "whisker_low": float(inside.min()),
            "whisker_high": float(inside.max()),
            "outliers": int(x.size - inside.size),
        },
    }


def first_order_residual(run: ScenarioRun, model: MarketModel | None = None) -> float:
    """Max over samples of ``|(MC^a - MC^f) - (Q v) . Z|``; regenerates the draws."""
    config = run.config
    model = config.model().with_holdings(run.holdings) if model is None else model
    z = draw_shocks(config.shock_mean, config.shock_variance, run.samples_d.size, run.seed)
    approx = z @ (model.s.T @ config.assets.q_tot)
    return float(np.abs(approx - z @ (run.holdings @ model.v)).max())

