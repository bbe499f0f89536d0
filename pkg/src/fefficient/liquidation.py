"""MSD-minimising liquidation strategies for fixed holdings.

With holdings ``Q`` fixed, the mean squared deviation is a quadratic in the
strategy matrix ``alpha``:

    MSD(alpha) = 1/2 vec(alpha)^T (C kron w w^T) vec(alpha),
    C[i, j] = 2 (Q Diag(kappa) e_i)^T G (Q Diag(kappa) e_j),
    w = q_tot / (gamma * q_nonbank).

The asset liquidity ratio is ``1 / w``. Concentrating every bank's trading
on the most liquid assets is a local minimiser in general and a global one
when all banks share a strategy.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import InvalidStrategy, ValidationError
from .market import MarketModel, shock_statistics_matrix

TIE_RTOL = 1e-12
STRATEGY_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class LiquidationProblem:
    holdings: np.ndarray
    kappa: np.ndarray
    mu: np.ndarray
    sigma2: np.ndarray
    gamma: np.ndarray
    q_tot: np.ndarray
    q_nonbank: np.ndarray
    c: np.ndarray = field(init=False)
    g: np.ndarray = field(init=False)

    def __post_init__(self):
        q = numerics.as_matrix(self.holdings, "holdings")
        k, n = q.shape
        kappa = numerics.as_vector(self.kappa, "kappa", n)
        arrays = {name: numerics.as_vector(getattr(self, name), name, k)
                  for name in ("mu", "sigma2", "gamma", "q_tot", "q_nonbank")}
        if np.any(arrays["gamma"] <= 0) or np.any(arrays["q_nonbank"] <= 0):
            raise ValidationError("gamma and q_nonbank must be positive", code="VALIDATION_LIQUIDITY")
        g = shock_statistics_matrix(arrays["mu"], arrays["sigma2"])
        scaled = q * kappa
        object.__setattr__(self, "holdings", q)
        object.__setattr__(self, "kappa", kappa)
        for name, val in arrays.items():
            object.__setattr__(self, name, val)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "c", 2.0 * scaled.T @ g @ scaled)

    @classmethod
    def from_model(cls, model: MarketModel) -> "LiquidationProblem":
        a = model.assets
        return cls(model.holdings, model.banks.kappa, a.mu, a.sigma2, a.gamma, a.q_tot, model.q_nonbank)

    @property
    def shape(self):
        return self.holdings.shape

    @property
    def weights(self) -> np.ndarray:
        """``q_tot / (gamma * q_nonbank)``: price pressure per unit of trading."""
        return self.q_tot / (self.gamma * self.q_nonbank)

    @property
    def liquidity(self) -> np.ndarray:
        return self.gamma * self.q_nonbank / self.q_tot

    def significance(self, alpha) -> np.ndarray:
        """Systemic significance implied by a strategy matrix."""
        return self.kappa * (np.asarray(alpha, dtype=float).T @ self.weights)


def check_strategy(problem: LiquidationProblem, alpha) -> np.ndarray:
    a = numerics.as_matrix(alpha, "alpha")
    if a.shape != problem.shape:
        raise InvalidStrategy(f"alpha has shape {a.shape}, expected {problem.shape}")
    if np.any(a < 0):
        raise InvalidStrategy("alpha has negative entries")
    col = a.sum(axis=0)
    off = np.flatnonzero(np.abs(col - 1.0) > STRATEGY_ATOL)
    if off.size:
        raise InvalidStrategy(f"alpha column {int(off[0])} sums to {col[off[0]]:.12g}")
    return a


def objective_matrix(problem: LiquidationProblem) -> np.ndarray:
    """Hessian ``C kron w w^T`` of the quadratic in ``vec(alpha)``."""
    w = problem.weights
    return numerics.kronecker(problem.c, np.outer(w, w))


def msd_of_strategy(problem: LiquidationProblem, alpha) -> float:
    a = check_strategy(problem, alpha)
    x = a.reshape(-1, order="F")
    return float(0.5 * x @ objective_matrix(problem) @ x)


def msd_batch(problem: LiquidationProblem, alphas: np.ndarray) -> np.ndarray:
    # (Q Diag(kappa) alpha^T w) for a stack of strategies, shape (m, K, N)
    sig = problem.kappa * np.einsum("mkn,k->mn", alphas, problem.weights)
    y = sig @ problem.holdings.T
    return np.einsum("mk,kl,ml->m", y, problem.g, y)


def bank_independent_msd(problem: LiquidationProblem, alpha_common) -> float:
    """MSD when every bank uses the same strategy column."""
    a = numerics.as_vector(alpha_common, "alpha", problem.shape[0])
    y = problem.holdings @ problem.kappa
    return float((a @ problem.weights) ** 2 * (y @ problem.g @ y))


def most_liquid_assets(problem: LiquidationProblem, rtol: float = TIE_RTOL) -> np.ndarray:
    liq = problem.liquidity
    m = liq.max()
    return np.flatnonzero(liq >= m - rtol * abs(m))


def most_liquid_strategy(problem: LiquidationProblem, rtol: float = TIE_RTOL) -> np.ndarray:
    """Equal weights on the most liquid assets, identical for every bank."""
    k, n = problem.shape
    support = most_liquid_assets(problem, rtol)
    column = np.zeros(k)
    column[support] = 1.0 / support.size
    return np.tile(column[:, None], (1, n))


def kkt_point(problem: LiquidationProblem):
    """Multipliers certifying the most-liquid strategy.

    Returns ``(vec_alpha, lam, s)`` with ``lam[i] = sum_j C[i, j] / m^2`` and
    ``s_i = (sum_j C[i, j] / m) (w - 1/m)``, where ``m`` is the largest
    liquidity ratio.
    """
    alpha = most_liquid_strategy(problem)
    m = problem.liquidity.max()
    row = problem.c.sum(axis=1)
    lam = row / m**2
    s = np.concatenate([r / m * (problem.weights - 1.0 / m) for r in row])
    return alpha.reshape(-1, order="F"), lam, s


def kkt_residuals(problem: LiquidationProblem, vec_alpha, lam, s) -> dict:
    """Residuals of stationarity, feasibility and complementarity (all ~0 at a KKT point)."""
    k, n = problem.shape
    x = numerics.as_vector(vec_alpha, "vec_alpha", k * n)
    lam = numerics.as_vector(lam, "lam", n)
    s = numerics.as_vector(s, "s", k * n)
    h = objective_matrix(problem)
    eq = np.kron(np.eye(n), np.ones((1, k)))
    return {
        "stationarity": float(np.abs(h @ x - eq.T @ lam - s).max()),
        "primal_equality": float(np.abs(eq @ x - 1.0).max()),
        "primal_sign": float(max(0.0, -x.min())),
        "dual_sign": float(max(0.0, -s.min())),
        "complementarity": float(np.abs(x * s).max()),
    }


def random_strategies(rng: np.random.Generator, k: int, n: int, count: int,
                      bank_independent: bool = False) -> np.ndarray:
    """``count`` strategy matrices with columns drawn uniformly from the simplex."""
    if bank_independent:
        cols = rng.dirichlet(np.ones(k), size=count)
        return np.repeat(cols[:, :, None], n, axis=2)
    return np.transpose(rng.dirichlet(np.ones(k), size=(count, n)), (0, 2, 1))


def verify_local_minimum(problem: LiquidationProblem, alpha, trials: int = 1000,
                         rng: np.random.Generator | None = None, radius: float = 1e-3,
                         bank_independent: bool = False, slack: float = 1e-12) -> bool:
    """Sample feasible moves of length at most ``radius``; True if none lowers the MSD.

    Moves point from ``alpha`` towards random simplex points, so they stay
    feasible. With ``bank_independent`` all banks move together.
    """
    a = check_strategy(problem, alpha)
    rng = np.random.default_rng(0) if rng is None else rng
    k, n = problem.shape
    targets = random_strategies(rng, k, n, trials, bank_independent)
    d = targets - a
    norms = np.sqrt(np.einsum("mkn,mkn->m", d, d))
    t = np.minimum(1.0, radius / np.where(norms > 0, norms, 1.0))
    trial = a + t[:, None, None] * d
    base = msd_batch(problem, a[None])[0]
    return bool(np.all(msd_batch(problem, trial) >= base - slack))
