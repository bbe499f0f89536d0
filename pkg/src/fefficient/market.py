"""Leverage-targeting price-contagion model.

One-period economy with ``K`` assets and ``N`` leverage-targeting banks that
trade against a nonbanking sector with downward-sloping demand. Prices clear
at ``P1 = P0 + (I - S)^{-1} Z`` where ``S`` is the systemicness matrix.

Shapes: asset vectors have length ``K``; holdings ``Q`` and strategies
``alpha`` are ``K x N`` (rows are assets, columns are banks).
"""

from dataclasses import dataclass, field
import warnings

import numpy as np

from . import numerics
from .errors import NonpositivePrice, UnstableSystem, ValidationError

COLUMN_SUM_ATOL = 1e-9
BUDGET_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class AssetUniverse:
    """Per-asset shock moments, liquidity and supply.

    ``q_nonbank`` may be left as ``None``; it is then derived from the banks'
    holdings as ``q_tot - Q @ 1`` when a :class:`MarketModel` is assembled.
    """

    mu: np.ndarray
    sigma2: np.ndarray
    gamma: np.ndarray
    q_tot: np.ndarray
    q_nonbank: np.ndarray | None = None
    p0: np.ndarray | None = None

    def __post_init__(self):
        mu = numerics.as_vector(self.mu, "mu")
        k = mu.size
        if k < 1:
            raise ValidationError("at least one asset is required", code="VALIDATION_SHAPE")
        sigma2 = numerics.as_vector(self.sigma2, "sigma2", k)
        gamma = numerics.as_vector(self.gamma, "gamma", k)
        q_tot = numerics.as_vector(self.q_tot, "q_tot", k)
        p0 = np.ones(k) if self.p0 is None else numerics.as_vector(self.p0, "p0", k)
        if np.any(sigma2 <= 0):
            bad = int(np.flatnonzero(sigma2 <= 0)[0])
            raise ValidationError(f"sigma2[{bad}] = {sigma2[bad]} must be > 0", code="VALIDATION_SIGMA")
        if np.any(gamma <= 0):
            bad = int(np.flatnonzero(gamma <= 0)[0])
            raise ValidationError(f"gamma[{bad}] = {gamma[bad]} must be > 0", code="VALIDATION_GAMMA")
        if np.any(q_tot <= 0):
            raise ValidationError("q_tot entries must be > 0", code="VALIDATION_SUPPLY")
        if np.any(p0 <= 0):
            raise ValidationError("p0 entries must be > 0", code="VALIDATION_PRICE")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "q_tot", q_tot)
        object.__setattr__(self, "p0", p0)
        if self.q_nonbank is not None:
            qnb = numerics.as_vector(self.q_nonbank, "q_nonbank", k)
            _check_nonbank(qnb, q_tot)
            object.__setattr__(self, "q_nonbank", qnb)

    @property
    def count(self) -> int:
        return self.mu.size


def _check_nonbank(qnb, q_tot):
    if np.any(qnb <= 0) or np.any(qnb > q_tot * (1 + 1e-12)):
        bad = int(np.flatnonzero((qnb <= 0) | (qnb > q_tot * (1 + 1e-12)))[0])
        raise ValidationError(
            f"q_nonbank[{bad}] = {qnb[bad]} must lie in (0, q_tot[{bad}]]",
            code="VALIDATION_NONBANK",
        )


@dataclass(frozen=True, eq=False)
class BankingSector:
    """Leverage targets, trading strategies and time-0 holdings of the banks.

    ``budgets`` defaults to the column sums of ``holdings`` (unit prices).
    """

    kappa: np.ndarray
    alpha: np.ndarray
    holdings: np.ndarray
    budgets: np.ndarray | None = None

    def __post_init__(self):
        kappa = numerics.as_vector(self.kappa, "kappa")
        n = kappa.size
        alpha = numerics.as_matrix(self.alpha, "alpha")
        holdings = numerics.as_matrix(self.holdings, "holdings")
        if alpha.shape[1] != n or holdings.shape != alpha.shape:
            raise ValidationError(
                f"alpha {alpha.shape} and holdings {holdings.shape} must both be K x {n}",
                code="VALIDATION_SHAPE",
            )
        if np.any(kappa < 0):
            raise ValidationError("kappa entries must be >= 0", code="VALIDATION_KAPPA")
        col = alpha.sum(axis=0)
        off = np.flatnonzero(np.abs(col - 1.0) > COLUMN_SUM_ATOL)
        if off.size:
            i = int(off[0])
            raise ValidationError(f"alpha column {i} sums to {col[i]:.12g}", code="VALIDATION_ALPHA")
        if self.budgets is None:
            budgets = holdings.sum(axis=0)
        else:
            budgets = numerics.as_vector(self.budgets, "budgets", n)
            gap = np.abs(holdings.sum(axis=0) - budgets)
            off = np.flatnonzero(gap > BUDGET_ATOL * np.maximum(1.0, np.abs(budgets)))
            if off.size:
                i = int(off[0])
                raise ValidationError(
                    f"holdings column {i} sums to {holdings[:, i].sum():.12g}, budget is {budgets[i]:.12g}",
                    code="VALIDATION_BUDGET",
                )
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "holdings", holdings)
        object.__setattr__(self, "budgets", budgets)

    @property
    def count(self) -> int:
        return self.kappa.size

    @property
    def aggregate(self) -> np.ndarray:
        """Banking-sector holdings per asset (row sums of ``Q``)."""
        return self.holdings.sum(axis=1)

    def with_holdings(self, holdings) -> "BankingSector":
        return BankingSector(self.kappa, self.alpha, holdings, self.budgets)

    def with_alpha(self, alpha) -> "BankingSector":
        return BankingSector(self.kappa, alpha, self.holdings, self.budgets)


def nonbank_holdings(assets: AssetUniverse, banks: BankingSector) -> np.ndarray:
    """Explicit ``q_nonbank`` if given, otherwise ``q_tot`` minus bank row sums."""
    if banks.holdings.shape[0] != assets.count:
        raise ValidationError(
            f"holdings have {banks.holdings.shape[0]} rows, expected {assets.count}",
            code="VALIDATION_SHAPE",
        )
    if assets.q_nonbank is not None:
        return assets.q_nonbank
    qnb = assets.q_tot - banks.aggregate
    _check_nonbank(qnb, assets.q_tot)
    return qnb


def systemicness_matrix(assets: AssetUniverse, banks: BankingSector) -> np.ndarray:
    """``S[k, l] = sum_i alpha[k, i] kappa[i] Q[l, i] / (gamma[k] qnb[k])``."""
    qnb = nonbank_holdings(assets, banks)
    weighted = banks.alpha * banks.kappa
    return (weighted @ banks.holdings.T) / (assets.gamma * qnb)[:, None]


def systemic_significance(assets: AssetUniverse, banks: BankingSector) -> np.ndarray:
    """``v = Diag(kappa) alpha^T (q_tot / (gamma * qnb))``, one entry per bank."""
    qnb = nonbank_holdings(assets, banks)
    return banks.kappa * (banks.alpha.T @ (assets.q_tot / (assets.gamma * qnb)))


def shock_statistics_matrix(mu, sigma2) -> np.ndarray:
    """Second-moment matrix ``G = mu mu^T + Diag(sigma2)`` of uncorrelated shocks."""
    mu = numerics.as_vector(mu, "mu")
    sigma2 = numerics.as_vector(sigma2, "sigma2", mu.size)
    return np.outer(mu, mu) + np.diag(sigma2)


@dataclass(frozen=True, eq=False)
class MarketModel:
    """Assembled economy with cached ``S``, ``v`` and ``G``.

    ``spectral_bound`` is the max absolute row sum of ``S``; when it is not
    below one (which happens once holdings contain short positions) the
    stability flag falls back to the eigenvalues of ``S``.
    """

    assets: AssetUniverse
    banks: BankingSector
    s: np.ndarray = field(init=False)
    v: np.ndarray = field(init=False)
    g: np.ndarray = field(init=False)
    q_nonbank: np.ndarray = field(init=False)
    spectral_bound: float = field(init=False)
    stable: bool = field(init=False)

    def __post_init__(self):
        s = systemicness_matrix(self.assets, self.banks)
        bound = numerics.spectral_radius_upper_bound(np.abs(s))
        stable = bound < 1.0 or self.spectral_radius(s) < 1.0
        if not stable:
            warnings.warn(
                f"spectral radius of S is not below one (row-sum bound {bound:.4g})",
                RuntimeWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "v", systemic_significance(self.assets, self.banks))
        object.__setattr__(self, "g", shock_statistics_matrix(self.assets.mu, self.assets.sigma2))
        object.__setattr__(self, "q_nonbank", nonbank_holdings(self.assets, self.banks))
        object.__setattr__(self, "spectral_bound", bound)
        object.__setattr__(self, "stable", bool(stable))

    @staticmethod
    def spectral_radius(s) -> float:
        return float(np.abs(np.linalg.eigvals(s)).max())

    @property
    def holdings(self) -> np.ndarray:
        return self.banks.holdings

    def with_holdings(self, holdings, keep_nonbank: bool = True) -> "MarketModel":
        """Same economy with a different holdings matrix.

        With ``keep_nonbank`` the current nonbank holdings are pinned so that
        ``v`` stays fixed; this is the right choice when comparing allocations
        that share the same row sums.
        """
        assets = self.assets
        if keep_nonbank and assets.q_nonbank is None:
            assets = AssetUniverse(
                assets.mu, assets.sigma2, assets.gamma, assets.q_tot, self.q_nonbank, assets.p0
            )
        return MarketModel(assets, self.banks.with_holdings(holdings))


def price_change(model: MarketModel, shock, allow_unstable: bool = False) -> np.ndarray:
    """Equilibrium price change ``(I - S)^{-1} Z``."""
    if not model.stable and not allow_unstable:
        raise UnstableSystem("spectral radius of S is not below one; pass allow_unstable=True to override")
    z = numerics.as_vector(shock, "shock", model.assets.count)
    k = z.size
    return numerics.solve_linear(np.eye(k) - model.s, z)


def _positive_prices(p1):
    p1 = numerics.as_vector(p1, "p1")
    if np.any(p1 <= 0):
        raise NonpositivePrice("post-shock prices must be positive")
    return p1


def bank_incremental_demand(model: MarketModel, bank: int, p1, delta_p) -> np.ndarray:
    """Quantity change of one bank: ``alpha_i kappa_i (Q_i . dP) / P1``."""
    p1 = _positive_prices(p1)
    dp = numerics.as_vector(delta_p, "delta_p", p1.size)
    banks = model.banks
    return banks.alpha[:, bank] * banks.kappa[bank] * (banks.holdings[:, bank] @ dp) / p1


def nonbank_demand(assets: AssetUniverse, p1, delta_p, shock, q_nonbank=None) -> np.ndarray:
    """Nonbank quantity change ``-gamma qnb (dP - Z) / P1``."""
    p1 = _positive_prices(p1)
    dp = numerics.as_vector(delta_p, "delta_p", p1.size)
    z = numerics.as_vector(shock, "shock", p1.size)
    qnb = assets.q_nonbank if q_nonbank is None else numerics.as_vector(q_nonbank, "q_nonbank", p1.size)
    if qnb is None:
        raise ValidationError("nonbank holdings unknown; pass q_nonbank", code="VALIDATION_NONBANK")
    return -assets.gamma * qnb * (dp - z) / p1


def check_market_clearing(model: MarketModel, shock, allow_unstable: bool = False) -> np.ndarray:
    """Per-asset net quantity change after the price move; ~0 at equilibrium."""
    dp = price_change(model, shock, allow_unstable)
    p1 = model.assets.p0 + dp
    total = nonbank_demand(model.assets, p1, dp, shock, model.q_nonbank)
    for i in range(model.banks.count):
        total = total + bank_incremental_demand(model, i, p1, dp)
    return total


def market_capitalizations(model: MarketModel, shock, allow_unstable: bool = False):
    """Return ``(mc_exact, mc_fundamental, mc_approx)``.

    exact: ``q_tot . (P0 + (I - S)^{-1} Z)``; fundamental: ``q_tot . (P0 + Z)``;
    first-order: ``q_tot . (P0 + (I + S) Z)``.
    """
    z = numerics.as_vector(shock, "shock", model.assets.count)
    q_tot, p0 = model.assets.q_tot, model.assets.p0
    mc_e = float(q_tot @ (p0 + price_change(model, z, allow_unstable)))
    mc_f = float(q_tot @ (p0 + z))
    mc_a = float(q_tot @ (p0 + z + model.s @ z))
    return mc_e, mc_f, mc_a


def deviation_first_order(model: MarketModel, shock) -> float:
    """First-order market inefficiency ``(Q v) . Z``."""
    z = numerics.as_vector(shock, "shock", model.assets.count)
    return float((model.holdings @ model.v) @ z)


def mean_squared_deviation(q, v, g) -> float:
    """``(Q v)^T G (Q v)``."""
    y = numerics.as_matrix(q, "q") @ numerics.as_vector(v, "v")
    return float(y @ numerics.as_matrix(g, "g") @ y)
