"""Acceptance checks comparing computed values with reference numbers and properties.

Each ``criterion_*`` function returns a list of :class:`Check` records. Only
gating checks decide the overall verdict; non-gating ones are reported for
context.
"""

from dataclasses import dataclass
import time

import numpy as np

from . import published
from .errors import FefficientError
from .liquidation import (
    LiquidationProblem,
    bank_independent_msd,
    kkt_point,
    kkt_residuals,
    most_liquid_strategy,
    msd_batch,
    msd_of_strategy,
    random_strategies,
)
from .market import (
    AssetUniverse,
    BankingSector,
    MarketModel,
    check_market_clearing,
    market_capitalizations,
    mean_squared_deviation,
    shock_statistics_matrix,
)
from .montecarlo import compare_holdings, cross_scenario_table, run_simulation
from .scenarios import DEFAULT_SEED, builtin_scenario
from .solver import (
    FeasibilitySpec,
    constraint_matrix,
    diverse_holdings,
    diversified_holdings,
    is_diversification_efficient,
    min_distance_solution,
    msd,
    solve_f_efficient,
)
from .statics import TwoByTwoInputs, check_derivative_signs, weights_2x2

SCENARIOS = ("L", "I", "H")


@dataclass
class Check:
    criterion: str
    name: str
    computed: object
    expected: object
    tolerance: str
    passed: bool
    gating: bool = True
    volatile: bool = False

    def line(self, stable: bool = False) -> str:
        """One report line; ``stable`` hides run-dependent values such as timings."""
        status = "PASS" if self.passed else "FAIL"
        if not self.gating:
            status = "INFO-" + status
        computed = "(not recorded)" if stable and self.volatile else _fmt(self.computed)
        return f"[{status}] {self.criterion} {self.name}: computed={computed} expected={_fmt(self.expected)} ({self.tolerance})"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.6g}"
    if isinstance(x, np.ndarray):
        return np.array2string(x, precision=4, separator=",", max_line_width=10_000)
    return str(x)


def _within(a, b, atol):
    return bool(np.all(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) <= atol))


def _rel_close(a, b, rtol):
    return abs(a - b) <= rtol * max(abs(a), abs(b), np.finfo(float).tiny)


def criterion_1() -> list:
    out = []
    for name in SCENARIOS:
        v = builtin_scenario(name).model().v
        exp = np.array(published.SIGNIFICANCE[name])
        out.append(Check("1", f"significance {name}", v, exp, "abs 0.01",
                         _within(v, exp, published.SIGNIFICANCE_ATOL + 1e-12)))
    return out


def criterion_2() -> list:
    out = []
    for name in SCENARIOS:
        spec = FeasibilitySpec.from_model(builtin_scenario(name).model())
        q = solve_f_efficient(spec).particular
        exp = published.EFFICIENT_HOLDINGS[name]
        err = float(np.abs(q - exp).max())
        out.append(Check("2", f"f-efficient holdings {name} (max abs error)", err, 0.0, "abs 0.01",
                         err <= published.EFFICIENT_HOLDINGS_ATOL + 1e-12))
    return out


def three_bank_spec() -> FeasibilitySpec:
    fx = published.THREE_BANK
    x = fx["x"]
    return FeasibilitySpec(np.full(3, x), np.full(3, x), fx["v"], shock_statistics_matrix(fx["mu"], fx["sigma2"]))


def criterion_3() -> list:
    spec = three_bank_spec()
    solset = solve_f_efficient(spec)
    q1 = min_distance_solution(solset, diversified_holdings(spec))
    q2 = min_distance_solution(solset, diverse_holdings(spec))
    e1 = float(np.abs(q1 - published.THREE_BANK_CLOSEST_TO_DIVERSIFIED).max())
    e2 = float(np.abs(q2 - published.THREE_BANK_CLOSEST_TO_DIVERSE).max())
    return [
        Check("3", "closest to diversification (max abs error)", e1, 0.0, "abs 1e-10", e1 <= published.THREE_BANK_ATOL),
        Check("3", "closest to diverse holdings (max abs error)", e2, 0.0, "abs 1e-10", e2 <= published.THREE_BANK_ATOL),
        Check("3", "null-space dimension", solset.dimension, published.THREE_BANK_NULL_DIMENSION, "exact",
              solset.dimension == published.THREE_BANK_NULL_DIMENSION),
    ]


def random_feasibility_spec(rng: np.random.Generator, k: int | None = None, n: int | None = None) -> FeasibilitySpec:
    k = int(rng.integers(2, 7)) if k is None else k
    n = int(rng.integers(2, 7)) if n is None else n
    q = rng.uniform(0.1, 1.0, k)
    b = rng.uniform(0.1, 1.0, n)
    b *= q.sum() / b.sum()
    v = rng.uniform(0.1, 2.0, n)
    g = shock_statistics_matrix(rng.uniform(-1.0, 1.0, k), rng.uniform(0.1, 1.0, k))
    return FeasibilitySpec(q, b, v, g)


def qp_oracle(spec: FeasibilitySpec) -> float:
    """Minimum of ``(Q v)^T G (Q v)`` over feasible ``Q`` by null-space reduction.

    Uses only the budget and supply equalities and generic dense routines, so
    it is independent of the aggregation/allocation construction.
    """
    k, n = spec.n_assets, spec.n_banks
    h = np.kron(np.outer(spec.v, spec.v), spec.g)
    a = constraint_matrix(spec.v, k)[: n + k]
    c = np.concatenate([spec.b, spec.q])
    x0 = np.linalg.lstsq(a, c, rcond=None)[0]
    _, sv, vt = np.linalg.svd(a)
    r = int(np.sum(sv > sv[0] * 1e-12))
    basis = vt[r:].T
    t = np.linalg.lstsq(basis.T @ h @ basis, -basis.T @ h @ x0, rcond=None)[0]
    x = x0 + basis @ t
    return float(x @ h @ x)


def criterion_4(instances: int = 1000, seed: int = 4) -> list:
    rng = np.random.default_rng(seed)
    worst_identity = worst_oracle = 0.0
    start = time.perf_counter()
    for _ in range(instances):
        spec = random_feasibility_spec(rng)
        solset = solve_f_efficient(spec)
        value = msd(solset, solset.particular)
        worst_identity = max(worst_identity, abs(value - solset.msd_optimal) / abs(solset.msd_optimal))
        oracle = qp_oracle(spec)
        worst_oracle = max(worst_oracle, abs(value - oracle) / abs(oracle))
    elapsed = time.perf_counter() - start
    return [
        Check("4", f"MSD(particular) vs closed-form optimum, worst of {instances}", worst_identity, 0.0,
              "rel 1e-9", worst_identity <= 1e-9),
        Check("4", f"MSD(particular) vs QP oracle, worst of {instances}", worst_oracle, 0.0, "rel 1e-6",
              worst_oracle <= 1e-6),
        Check("4", "runtime seconds", elapsed, 10.0, "under 10 s", elapsed < 10.0, volatile=True),
    ]


def criterion_5(samples: int = published.TABLE_SAMPLES, seed: int = DEFAULT_SEED, workers: int = 1,
                comparisons: dict | None = None) -> list:
    start = time.perf_counter()
    if comparisons is None:
        comparisons = {name: compare_holdings(builtin_scenario(name), seed, workers, samples) for name in SCENARIOS}
    elapsed = time.perf_counter() - start
    out = []
    for idx, (stat, label, values, ratios) in enumerate(cross_scenario_table(comparisons)):
        expected = published.TABLE[(stat, label)]
        for name in SCENARIOS:
            value = values[name]
            exp = expected[name]
            if stat == "distance":
                out.append(Check("5", f"{stat} {label} {name}", value, exp, "abs 0.01 (deterministic)",
                                 abs(value - exp) <= 0.01 + 1e-12, gating=False))
                continue
            se = comparisons[name].rows()[idx][3]
            tol = max(published.TABLE_RTOL * abs(exp), published.TABLE_SE_MULTIPLE * se)
            out.append(Check("5", f"{stat} {label} {name}", value, exp,
                             f"max(2% rel, 4 SE = {published.TABLE_SE_MULTIPLE * se:.3g}) = {tol:.3g}",
                             abs(value - exp) <= tol))
        if stat != "distance":
            ordered = values["H"] > values["I"] > values["L"]
            out.append(Check("5", f"ordering H > I > L for {stat} {label}",
                             f"{values['H']:.4g} > {values['I']:.4g} > {values['L']:.4g}", "true", "exact", ordered))
        rounded = {name: round(values[name], 2) for name in SCENARIOS}
        for ratio_name, exp_ratio in published.TABLE_RATIOS[(stat, label)].items():
            num, den = ratio_name.split("/")
            ratio = rounded[num] / rounded[den] if rounded[den] else float("nan")
            ok = _rel_close(ratio, exp_ratio, 0.02) or abs(ratio - exp_ratio) <= 0.005
            out.append(Check("5", f"ratio {ratio_name} {stat} {label} (from 2-decimal values)", ratio, exp_ratio,
                             "rel 2% or abs 0.005", ok, gating=False))
    for name in SCENARIOS:
        c = comparisons[name]
        eff, div = c.efficient.summary.var_mc_e, c.diversified.summary.var_mc_e
        out.append(Check("5", f"Var diversified > Var f-efficient {name}", f"{div:.4g} > {eff:.4g}", "true",
                         "exact", div > eff))
    out.append(Check("5", "runtime seconds", elapsed, 60.0, "under 60 s", elapsed < 60.0, volatile=True))
    return out


def _sample_inputs(rng, lemma):
    x = 0.08
    if lemma == "sigma1":
        m = rng.uniform(-0.5, 0.5)
        while True:
            s = rng.uniform(0.05, 1.0, 2)
            if abs(s[0] - s[1]) > 0.01:
                break
        v1 = rng.uniform(0.01, 0.2)
        return TwoByTwoInputs(x, (m, m), tuple(s), (v1, v1 + rng.uniform(0.005, 0.2)))
    if lemma == "mu2":
        s = rng.uniform(0.05, 1.0)
        m2 = rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 1.0)
        v1 = rng.uniform(0.01, 0.2)
        return TwoByTwoInputs(x, (0.0, m2), (s, s), (v1, v1 + rng.uniform(0.005, 0.2)))
    while True:
        inputs = TwoByTwoInputs(x, tuple(rng.uniform(-0.5, 0.5, 2)), tuple(rng.uniform(0.05, 1.0, 2)),
                                tuple(rng.uniform(0.01, 0.2, 2)))
        z = weights_2x2(inputs)
        if abs(abs(z[0]) - abs(z[1])) > 1e-3 * abs(z).max() and abs(inputs.v[0] - inputs.v[1]) > 0.005:
            return inputs


def criterion_6(points: int = 200, seed: int = 6) -> list:
    rng = np.random.default_rng(seed)
    out = []
    start = time.perf_counter()
    for lemma in ("sigma1", "mu2", "v2"):
        failures = []
        for _ in range(points):
            report = check_derivative_signs(_sample_inputs(rng, lemma), lemma)
            failures.extend(report.violations)
        out.append(Check("6", f"derivative signs w.r.t. {lemma} at {points} random points", len(failures), 0,
                         "no sign violations", not failures))
    zero_cases = [
        ("sigma1", TwoByTwoInputs(0.08, (0.1, 0.1), (0.2, 0.2), (0.04, 0.07))),
        ("sigma1", TwoByTwoInputs(0.08, (-0.3, -0.3), (0.5, 0.5), (0.02, 0.09))),
        ("mu2", TwoByTwoInputs(0.08, (0.0, 0.0), (0.2, 0.2), (0.04, 0.07))),
        ("mu2", TwoByTwoInputs(0.08, (0.0, 0.0), (0.7, 0.7), (0.01, 0.15))),
    ]
    for lemma, inputs in zero_cases:
        report = check_derivative_signs(inputs, lemma)
        # Q11 keeps rising through sigma1^2 == sigma2^2; only d is stationary there
        keys = ("distance",) if lemma == "sigma1" else tuple(report.numeric)
        worst = max(abs(report.numeric[key]) for key in keys)
        out.append(Check("6", f"zero crossing {lemma} at mu={inputs.mu}, sigma2={inputs.sigma2}", worst, 0.0,
                         "|derivative| < 1e-8", worst < 1e-8))
    elapsed = time.perf_counter() - start
    out.append(Check("6", "runtime seconds", elapsed, 5.0, "under 5 s", elapsed < 5.0, volatile=True))
    return out


def diversification_case(case: str, eps: float, k: int = 4):
    """Inputs of the homogeneous-but-one-asset families, perturbed by ``eps``."""
    mu = np.full(k, 0.1)
    sigma2 = np.full(k, 0.5)
    q = np.full(k, 1.0)
    if case == "a":
        mu[-1] = mu[0] + eps
    elif case == "b":
        q[-1] = q[0] + eps
    elif case == "c":
        sigma2[-1] = sigma2[0] + eps
    else:
        raise ValueError(f"unknown case {case!r}")
    b = np.array([0.2, 0.3, 0.5]) * q.sum()
    return FeasibilitySpec(q, b, (0.3, 0.7, 1.1), shock_statistics_matrix(mu, sigma2))


def criterion_7(k: int = 4) -> list:
    grid = np.round(np.arange(-0.45, 0.4501, 0.05), 10)
    out = []
    for case in ("a", "b", "c"):
        eps_values = list(grid)
        if case == "a" and not np.any(np.isclose(grid, -k * 0.1, rtol=0, atol=1e-12)):
            eps_values.append(-k * 0.1)
        mismatched_theory = []
        mismatched_numeric = []
        for eps in eps_values:
            spec = diversification_case(case, eps, k)
            flag = is_diversification_efficient(spec)
            expected = eps == 0 or (case == "a" and np.isclose(eps, -k * 0.1, rtol=0, atol=1e-12))
            solset = solve_f_efficient(spec)
            gap = msd(solset, diversified_holdings(spec)) - solset.msd_optimal
            if flag != expected:
                mismatched_theory.append(eps)
            if flag != (gap < 1e-10):
                mismatched_numeric.append(eps)
        out.append(Check("7", f"case {case}: flag iff eps = 0{' or -K mu1' if case == 'a' else ''}",
                         mismatched_theory, [], f"{len(eps_values)} eps values", not mismatched_theory))
        out.append(Check("7", f"case {case}: flag agrees with MSD gap < 1e-10", mismatched_numeric, [],
                         f"{len(eps_values)} eps values", not mismatched_numeric))
    return out


def random_liquidation_problem(rng: np.random.Generator) -> LiquidationProblem:
    k = int(rng.integers(2, 7))
    n = int(rng.integers(2, 5))
    return LiquidationProblem(
        holdings=rng.uniform(0.01, 1.0, (k, n)),
        kappa=rng.uniform(1.0, 15.0, n),
        mu=rng.uniform(-0.5, 0.5, k),
        sigma2=rng.uniform(0.01, 1.0, k),
        gamma=rng.uniform(0.5, 10.0, k),
        q_tot=np.ones(k),
        q_nonbank=rng.uniform(0.5, 0.95, k),
    )


def criterion_8(instances: int = 50, trials: int = 1000, seed: int = 8) -> list:
    rng = np.random.default_rng(seed)
    beaten = 0
    worst_kkt = worst_kron = 0.0
    for _ in range(instances):
        problem = random_liquidation_problem(rng)
        k, n = problem.shape
        best = most_liquid_strategy(problem)
        best_value = msd_of_strategy(problem, best)
        alphas = random_strategies(rng, k, n, trials, bank_independent=True)
        values = msd_batch(problem, alphas)
        beaten += int(np.sum(values < best_value - 1e-12 * max(1.0, best_value)))
        res = kkt_residuals(problem, *kkt_point(problem))
        worst_kkt = max(worst_kkt, max(res.values()))
        for alpha in random_strategies(rng, k, n, 5):
            kron = msd_of_strategy(problem, alpha)
            direct = mean_squared_deviation(problem.holdings, problem.significance(alpha), problem.g)
            worst_kron = max(worst_kron, abs(kron - direct) / max(1.0, abs(direct)))
        common = alphas[0][:, 0]
        direct = mean_squared_deviation(problem.holdings, problem.significance(alphas[0]), problem.g)
        worst_kron = max(worst_kron, abs(bank_independent_msd(problem, common) - direct) / max(1.0, abs(direct)))
    return [
        Check("8", f"most-liquid MSD <= {trials} bank-independent strategies on {instances} instances",
              beaten, 0, "no strategy lower", beaten == 0),
        Check("8", "KKT residuals of the most-liquid triplet", worst_kkt, 0.0, "<= 1e-10", worst_kkt <= 1e-10),
        Check("8", "Kronecker objective vs direct MSD", worst_kron, 0.0, "<= 1e-10", worst_kron <= 1e-10),
    ]


def random_market(rng: np.random.Generator) -> MarketModel:
    """Random long-only stable economy."""
    k = int(rng.integers(2, 7))
    n = int(rng.integers(2, 5))
    holdings = rng.uniform(0.0, 0.1, (k, n))
    alpha = rng.dirichlet(np.ones(k), size=n).T
    assets = AssetUniverse(
        mu=rng.uniform(-0.1, 0.1, k),
        sigma2=rng.uniform(0.001, 0.05, k),
        gamma=rng.uniform(1.0, 10.0, k),
        q_tot=np.ones(k),
        p0=rng.uniform(0.5, 2.0, k),
    )
    banks = BankingSector(kappa=rng.uniform(1.0, 10.0, n), alpha=alpha, holdings=holdings)
    return MarketModel(assets, banks)


def criterion_9(systems: int = 200, seed: int = 9, samples: int = 20_000) -> list:
    rng = np.random.default_rng(seed)
    worst_clear = worst_first = 0.0
    skipped = 0
    for _ in range(systems):
        model = random_market(rng)
        if not model.stable:
            skipped += 1
            continue
        z = rng.normal(model.assets.mu, np.sqrt(model.assets.sigma2))
        try:
            worst_clear = max(worst_clear, float(np.abs(check_market_clearing(model, z)).max()))
        except FefficientError:
            skipped += 1
            continue
        _, mc_f, mc_a = market_capitalizations(model, z)
        worst_first = max(worst_first, abs((mc_a - mc_f) - (model.holdings @ model.v) @ z))
    config = builtin_scenario("L")
    eff = solve_f_efficient(FeasibilitySpec.from_model(config.model())).particular
    a = run_simulation(config, eff, seed=123, samples=samples)
    b = run_simulation(config, eff, seed=123, samples=samples, workers=4)
    identical = a.samples_d.tobytes() == b.samples_d.tobytes() and a.mc_e.tobytes() == b.mc_e.tobytes()
    return [
        Check("9", f"market clearing residual on {systems - skipped} random systems", worst_clear, 0.0,
              "<= 1e-8", worst_clear <= 1e-8),
        Check("9", "MC^a - MC^f vs (Qv).Z", worst_first, 0.0, "<= 1e-10", worst_first <= 1e-10),
        Check("9", "simulation bitwise deterministic (1 vs 4 workers, same seed)", identical, True, "exact",
              identical),
    ]


CRITERIA = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5": criterion_5,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8,
    "9": criterion_9,
}


def run_all(seed: int = DEFAULT_SEED, workers: int = 1, samples: int = published.TABLE_SAMPLES) -> list:
    checks = []
    for key, fn in CRITERIA.items():
        if key == "5":
            checks.extend(fn(samples=samples, seed=seed, workers=workers))
        else:
            checks.extend(fn())
    return checks


def verdict(checks) -> bool:
    return all(c.passed for c in checks if c.gating)
