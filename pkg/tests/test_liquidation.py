import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fefficient.errors import InvalidStrategy
from fefficient.liquidation import (
    LiquidationProblem,
    bank_independent_msd,
    kkt_point,
    kkt_residuals,
    most_liquid_strategy,
    msd_batch,
    msd_of_strategy,
    random_strategies,
    verify_local_minimum,
)
from fefficient.market import mean_squared_deviation, shock_statistics_matrix
from fefficient.reproduce import random_liquidation_problem
from fefficient.scenarios import builtin_scenario


def problem_with_liquidity(ratios, n=2, seed=0):
    rng = np.random.default_rng(seed)
    k = len(ratios)
    return LiquidationProblem(
        holdings=rng.uniform(0.1, 1.0, (k, n)),
        kappa=rng.uniform(1.0, 10.0, n),
        mu=rng.uniform(-0.2, 0.2, k),
        sigma2=rng.uniform(0.1, 0.5, k),
        gamma=np.asarray(ratios, dtype=float),
        q_tot=np.ones(k),
        q_nonbank=np.ones(k),
    )


def test_zero_leverage_gives_zero(rng):
    p = random_liquidation_problem(rng)
    p = LiquidationProblem(p.holdings, np.zeros(p.shape[1]), p.mu, p.sigma2, p.gamma, p.q_tot, p.q_nonbank)
    for alpha in random_strategies(rng, *p.shape, 5):
        assert msd_of_strategy(p, alpha) == 0.0


def test_scalar_case():
    p = LiquidationProblem([[0.3]], [2.0], [0.1], [0.4], [1.5], [1.0], [0.8])
    w = 1.0 / (1.5 * 0.8)
    assert msd_of_strategy(p, [[1.0]]) == pytest.approx(0.5 * p.c[0, 0] * w**2, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kronecker_matches_direct_msd(seed):
    rng = np.random.default_rng(seed)
    p = random_liquidation_problem(rng)
    for alpha in random_strategies(rng, *p.shape, 5):
        direct = mean_squared_deviation(p.holdings, p.significance(alpha), p.g)
        assert msd_of_strategy(p, alpha) == pytest.approx(direct, rel=1e-10, abs=1e-12)
        assert msd_batch(p, alpha[None])[0] == pytest.approx(direct, rel=1e-10, abs=1e-12)


def test_scenario_significance_roundtrip():
    model = builtin_scenario("I").model()
    p = LiquidationProblem.from_model(model)
    np.testing.assert_allclose(p.significance(model.banks.alpha), model.v, rtol=1e-12)
    assert msd_of_strategy(p, model.banks.alpha) == pytest.approx(
        mean_squared_deviation(model.holdings, model.v, model.g), rel=1e-10)


def test_c_is_symmetric_and_matches_definition(rng):
    p = random_liquidation_problem(rng)
    np.testing.assert_allclose(p.c, p.c.T, atol=1e-12)
    g = shock_statistics_matrix(p.mu, p.sigma2)
    k, n = p.shape
    for i in range(n):
        for j in range(n):
            ci = p.holdings @ (p.kappa * np.eye(n)[i])
            cj = p.holdings @ (p.kappa * np.eye(n)[j])
            assert p.c[i, j] == pytest.approx(2 * ci @ g @ cj, abs=1e-12)


def test_most_liquid_unique():
    alpha = most_liquid_strategy(problem_with_liquidity([3.0, 1.0, 2.0], n=3))
    np.testing.assert_array_equal(alpha, np.array([[1.0] * 3, [0.0] * 3, [0.0] * 3]))


def test_most_liquid_tie():
    alpha = most_liquid_strategy(problem_with_liquidity([2.0, 1.0, 2.0]))
    np.testing.assert_array_equal(alpha[:, 0], [0.5, 0.0, 0.5])
    # tie within the relative tolerance
    alpha = most_liquid_strategy(problem_with_liquidity([2.0, 1.0, 2.0 * (1 + 1e-14)]))
    np.testing.assert_allclose(alpha[:, 0], [0.5, 0.0, 0.5])


def test_most_liquid_full_tie():
    alpha = most_liquid_strategy(problem_with_liquidity([1.5] * 4, n=3))
    np.testing.assert_allclose(alpha, np.full((4, 3), 0.25))


def test_most_liquid_columns_identical_and_bank_relabeling(rng):
    p = random_liquidation_problem(rng)
    alpha = most_liquid_strategy(p)
    assert np.all(alpha == alpha[:, :1])
    np.testing.assert_allclose(alpha.sum(axis=0), 1.0)
    perm = rng.permutation(p.shape[1])
    q = LiquidationProblem(p.holdings[:, perm], p.kappa[perm], p.mu, p.sigma2, p.gamma, p.q_tot, p.q_nonbank)
    np.testing.assert_array_equal(most_liquid_strategy(q), alpha[:, perm])
    assert msd_of_strategy(q, alpha[:, perm]) == pytest.approx(msd_of_strategy(p, alpha), rel=1e-12)


def test_local_minimum_checks(rng):
    for _ in range(20):
        p = random_liquidation_problem(rng)
        best = most_liquid_strategy(p)
        assert verify_local_minimum(p, best, rng=rng)
        worst = np.zeros(p.shape)
        worst[np.argmin(p.liquidity)] = 1.0
        assert not verify_local_minimum(p, worst, rng=rng)


def test_bank_independent_global_minimum(rng):
    for _ in range(10):
        p = random_liquidation_problem(rng)
        best = msd_of_strategy(p, most_liquid_strategy(p))
        others = msd_batch(p, random_strategies(rng, *p.shape, 1000, bank_independent=True))
        assert np.all(others >= best - 1e-12)
        assert verify_local_minimum(p, most_liquid_strategy(p), rng=rng, bank_independent=True)


def test_bank_independent_formula(rng):
    p = random_liquidation_problem(rng)
    col = rng.dirichlet(np.ones(p.shape[0]))
    alpha = np.tile(col[:, None], (1, p.shape[1]))
    assert bank_independent_msd(p, col) == pytest.approx(msd_of_strategy(p, alpha), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kkt_residuals_vanish(seed):
    p = random_liquidation_problem(np.random.default_rng(seed))
    res = kkt_residuals(p, *kkt_point(p))
    assert max(res.values()) <= 1e-10


def test_kkt_residuals_detect_non_stationarity(rng):
    p = problem_with_liquidity([3.0, 1.0, 2.0])
    x, lam, s = kkt_point(p)
    assert kkt_residuals(p, x, 2 * lam, s)["stationarity"] > 1e-6


@pytest.mark.parametrize(
    "alpha",
    [
        [[0.5, 1.0], [0.6, 0.0]],
        [[1.2, 1.0], [-0.2, 0.0]],
        [[1.0], [0.0]],
    ],
)
def test_invalid_strategy(alpha):
    p = problem_with_liquidity([1.0, 2.0])
    with pytest.raises(InvalidStrategy):
        msd_of_strategy(p, alpha)
