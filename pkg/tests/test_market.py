import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fefficient.errors import NonpositivePrice, UnstableSystem, ValidationError
from fefficient.market import (
    AssetUniverse,
    BankingSector,
    MarketModel,
    bank_incremental_demand,
    check_market_clearing,
    deviation_first_order,
    market_capitalizations,
    mean_squared_deviation,
    nonbank_demand,
    price_change,
    shock_statistics_matrix,
    systemic_significance,
    systemicness_matrix,
)
from fefficient.reproduce import random_market
from fefficient.scenarios import builtin_scenario
from fefficient.solver import FeasibilitySpec, diversified_holdings, solve_f_efficient


def scalar_model(s_value=0.5, kappa=1.0, q=0.5, qnb=1.0, gamma=1.0):
    """One bank, one asset; S = kappa * q / (gamma * qnb)."""
    assets = AssetUniverse(mu=[0.0], sigma2=[1.0], gamma=[gamma], q_tot=[max(1.0, q + qnb)], q_nonbank=[qnb])
    banks = BankingSector(kappa=[kappa], alpha=[[1.0]], holdings=[[q]])
    return MarketModel(assets, banks)


def test_zero_leverage_gives_zero_s():
    model = builtin_scenario("L").model()
    banks = BankingSector(np.zeros(2), model.banks.alpha, model.banks.holdings)
    assert np.all(systemicness_matrix(model.assets, banks) == 0)


def test_scalar_s():
    model = scalar_model(kappa=1.0, q=0.3, qnb=0.6)
    assert model.s[0, 0] == pytest.approx(0.3 / 0.6)


def test_scenario_l_s_entry_and_structure():
    model = builtin_scenario("L").model()
    expected = (9 * 0.1 * 0.04 + 10 * 0.1 * 0.04) / (9 * 0.92)
    assert model.s[0, 0] == pytest.approx(expected, rel=1e-12)
    # every row is constant: uniform alpha and uniform holdings
    np.testing.assert_allclose(model.s, model.s[:, :1] * np.ones((1, 10)), rtol=1e-12)
    gamma = model.assets.gamma
    np.testing.assert_allclose(model.s[:, 0] * gamma, model.s[0, 0] * gamma[0], rtol=1e-12)


@pytest.mark.parametrize("name, expected", [("L", (1.23, 1.37)), ("I", (2.91, 3.23)), ("H", (5.54, 6.16))])
def test_systemic_significance_scenarios(name, expected):
    config = builtin_scenario(name)
    np.testing.assert_allclose(systemic_significance(config.assets, config.banks), expected, atol=0.01)


def test_price_change_examples():
    model = scalar_model()
    assert model.s[0, 0] == pytest.approx(0.5)
    assert price_change(model, [1.0])[0] == pytest.approx(2.0)
    assert price_change(model, [0.0])[0] == 0.0
    free = scalar_model(kappa=0.0)
    assert price_change(free, [0.3])[0] == pytest.approx(0.3)


def test_unstable_system_refused_unless_overridden():
    with pytest.warns(RuntimeWarning):
        model = scalar_model(kappa=3.0, q=0.5, qnb=1.0)
    with pytest.raises(UnstableSystem):
        price_change(model, [0.1])
    assert price_change(model, [0.1], allow_unstable=True)[0] == pytest.approx(0.1 / (1 - 1.5))


def test_stability_falls_back_to_eigenvalues_with_shorts():
    config = builtin_scenario("I")
    model = config.model()
    q = solve_f_efficient(FeasibilitySpec.from_model(model)).particular
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        short = model.with_holdings(q)
    assert short.spectral_bound > 1.0
    assert short.stable
    assert MarketModel.spectral_radius(short.s) < 1.0


def test_bank_incremental_demand_examples():
    with pytest.warns(RuntimeWarning):
        model = scalar_model(kappa=2.0, q=3.0, qnb=1.0)
    got = bank_incremental_demand(model, 0, [1.1], [0.1])
    assert got[0] == pytest.approx(0.6 / 1.1)
    assert bank_incremental_demand(model, 0, [1.0], [0.0])[0] == 0.0
    unlevered = scalar_model(kappa=0.0)
    assert bank_incremental_demand(unlevered, 0, [1.1], [0.1])[0] == 0.0
    with pytest.raises(NonpositivePrice):
        bank_incremental_demand(model, 0, [0.0], [0.1])


def test_nonbank_demand_examples():
    assets = AssetUniverse(mu=[0.0], sigma2=[1.0], gamma=[2.0], q_tot=[1.0], q_nonbank=[0.9])
    assert nonbank_demand(assets, [1.1], [0.1], [0.0])[0] == pytest.approx(-0.18 / 1.1)
    assert nonbank_demand(assets, [1.1], [0.1], [0.1])[0] == 0.0
    assert nonbank_demand(assets, [1.2], [0.2], [0.0])[0] < 0
    with pytest.raises(NonpositivePrice):
        nonbank_demand(assets, [-1.0], [0.1], [0.0])


def test_market_clearing_examples():
    model = builtin_scenario("L").model()
    assert np.abs(check_market_clearing(model, model.assets.mu)).max() <= 1e-8
    free = scalar_model(kappa=0.0)
    assert check_market_clearing(free, [0.0])[0] == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_market_clears_on_random_systems(seed):
    rng = np.random.default_rng(seed)
    model = random_market(rng)
    if not model.stable:
        return
    z = rng.normal(model.assets.mu, np.sqrt(model.assets.sigma2))
    assert np.abs(check_market_clearing(model, z)).max() <= 1e-8


def test_shock_statistics_matrix():
    np.testing.assert_array_equal(shock_statistics_matrix(np.zeros(3), [1, 2, 3]), np.diag([1.0, 2.0, 3.0]))
    assert shock_statistics_matrix([0.1], [0.2])[0, 0] == pytest.approx(0.21)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_shock_statistics_symmetric_positive_definite(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 8))
    g = shock_statistics_matrix(rng.normal(size=k), rng.uniform(0.01, 2.0, k))
    np.testing.assert_array_equal(g, g.T)
    np.linalg.cholesky(g)


def test_market_capitalizations_scalar():
    model = scalar_model()
    mc_e, mc_f, mc_a = market_capitalizations(model, [0.1])
    q_tot = model.assets.q_tot[0]
    assert mc_e == pytest.approx(q_tot * 1.2)
    assert mc_f == pytest.approx(q_tot * 1.1)
    assert mc_a == pytest.approx(q_tot * 1.15)


def test_market_capitalizations_degenerate():
    model = builtin_scenario("H").model()
    mc = market_capitalizations(model, np.zeros(10))
    assert mc[0] == mc[1] == mc[2] == pytest.approx(10.0)
    free = scalar_model(kappa=0.0)
    mc_e, mc_f, mc_a = market_capitalizations(free, [0.3])
    assert mc_e == pytest.approx(mc_f) and mc_a == pytest.approx(mc_f)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_first_order_gap_equals_weighted_shock(seed):
    rng = np.random.default_rng(seed)
    model = random_market(rng)
    z = rng.normal(size=model.assets.count)
    _, mc_f, mc_a = market_capitalizations(model, z, allow_unstable=True)
    d = deviation_first_order(model, z)
    assert abs((mc_a - mc_f) - d) <= 1e-10 * max(1.0, abs(d))


def test_deviation_first_order_zero_cases():
    model = builtin_scenario("L").model()
    assert deviation_first_order(model, np.zeros(10)) == 0.0
    assert mean_squared_deviation(np.zeros((10, 2)), model.v, model.g) == 0.0


def test_msd_positive_homogeneity(rng):
    model = builtin_scenario("I").model()
    base = mean_squared_deviation(model.holdings, model.v, model.g)
    for c in rng.uniform(0.1, 10.0, 5):
        assert mean_squared_deviation(model.holdings, c * model.v, model.g) == pytest.approx(c * c * base, rel=1e-12)


def test_msd_three_bank_optimum(three_bank):
    q1 = 0.08 * np.array([[2 / 3, 1 / 3, 0], [1 / 3, 1 / 3, 1 / 3], [0, 1 / 3, 2 / 3]])
    g_inv_sum = np.sum(1 / np.array([0.15, 0.2, 0.3]))
    expected = (three_bank.b @ three_bank.v) ** 2 / g_inv_sum
    assert mean_squared_deviation(q1, three_bank.v, three_bank.g) == pytest.approx(expected, rel=1e-12)


def test_moments_of_first_order_deviation(rng):
    model = builtin_scenario("I").model()
    y = model.holdings @ model.v
    n = 100_000
    z = rng.normal(model.assets.mu, np.sqrt(model.assets.sigma2), size=(n, 10))
    d = z @ y
    mean, var = d.mean(), d.var(ddof=1)
    exp_mean = y @ model.assets.mu
    exp_var = y @ (model.assets.sigma2 * y)
    assert abs(mean - exp_mean) <= 4 * np.sqrt(var / n)
    se_var = np.sqrt((np.mean((d - mean) ** 4) - var**2) / n)
    assert abs(var - exp_var) <= 4 * se_var


@pytest.mark.parametrize(
    "field, value, code",
    [
        ("sigma2", [0.1, -0.1], "VALIDATION_SIGMA"),
        ("gamma", [1.0, 0.0], "VALIDATION_GAMMA"),
        ("q_tot", [1.0, -1.0], "VALIDATION_SUPPLY"),
        ("p0", [1.0, 0.0], "VALIDATION_PRICE"),
        ("q_nonbank", [0.5, 1.5], "VALIDATION_NONBANK"),
    ],
)
def test_asset_validation(field, value, code):
    kwargs = dict(mu=[0.0, 0.0], sigma2=[0.1, 0.1], gamma=[1.0, 1.0], q_tot=[1.0, 1.0])
    kwargs[field] = value
    with pytest.raises(ValidationError) as err:
        AssetUniverse(**kwargs)
    assert err.value.code == code


def test_bank_validation_messages():
    with pytest.raises(ValidationError, match="alpha column 1 sums to 0.97"):
        BankingSector([1.0, 1.0], [[0.5, 0.47], [0.5, 0.5]], np.ones((2, 2)))
    with pytest.raises(ValidationError) as err:
        BankingSector([1.0, -1.0], np.full((2, 2), 0.5), np.ones((2, 2)))
    assert err.value.code == "VALIDATION_KAPPA"
    with pytest.raises(ValidationError) as err:
        BankingSector([1.0, 1.0], np.full((2, 2), 0.5), np.ones((2, 2)), budgets=[2.0, 3.0])
    assert err.value.code == "VALIDATION_BUDGET"
    with pytest.raises(ValidationError) as err:
        BankingSector([1.0], np.full((2, 2), 0.5), np.ones((2, 2)))
    assert err.value.code == "VALIDATION_SHAPE"


def test_nonbank_defaults_to_supply_minus_banks():
    assets = AssetUniverse(mu=[0.0, 0.0], sigma2=[0.1, 0.1], gamma=[1.0, 1.0], q_tot=[1.0, 1.0])
    banks = BankingSector([1.0, 1.0], np.full((2, 2), 0.5), [[0.1, 0.2], [0.05, 0.05]])
    model = MarketModel(assets, banks)
    np.testing.assert_allclose(model.q_nonbank, [0.7, 0.9])


def test_with_holdings_pins_nonbank_and_significance():
    model = builtin_scenario("L").model()
    div = diversified_holdings(FeasibilitySpec.from_model(model))
    moved = model.with_holdings(div * 2 - model.holdings)
    np.testing.assert_array_equal(moved.v, model.v)
