"""f-efficient holdings: allocations minimising the mean squared deviation.

The planner's problem

    min_Q (Q v)^T G (Q v)   s.t.  Q 1_N = q,  1_K^T Q = b^T

is solved in two steps. Aggregation finds the optimal network multiplier
``y* = (b.v / 1.z) z`` with ``z = G^{-1} 1``; allocation finds a feasible
``Q`` with ``Q v = y*``. The allocation is unique for two banks and otherwise
an affine set ``vec(Q^p) + O lam`` of dimension ``(K - 1)(N - 2)``.

Matrices are vectorised column-major (bank by bank), so the entry for asset
``k`` and bank ``i`` sits at index ``i * K + k``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import AssumptionViolated, DegenerateAggregation, ValidationError, ZeroTotal
from .market import MarketModel, mean_squared_deviation

DISTINCT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FeasibilitySpec:
    """Aggregate holdings ``q`` (per asset), budgets ``b`` (per bank), ``v`` and ``G``."""

    q: np.ndarray
    b: np.ndarray
    v: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        q = numerics.as_vector(self.q, "q")
        b = numerics.as_vector(self.b, "b")
        v = numerics.as_vector(self.v, "v", b.size)
        g = numerics.as_matrix(self.g, "g")
        if g.shape != (q.size, q.size):
            raise ValidationError(f"g must be {q.size} x {q.size}, got {g.shape}", code="VALIDATION_SHAPE")
        if b.size < 2:
            raise AssumptionViolated("at least two banks are required")
        total_q, total_b = q.sum(), b.sum()
        if abs(total_q - total_b) > 1e-9 * max(1.0, abs(total_q), abs(total_b)):
            raise ValidationError(
                f"sum(q) = {total_q:.12g} differs from sum(b) = {total_b:.12g}", code="VALIDATION_TOTAL"
            )
        if not _has_distinct(v):
            raise AssumptionViolated("all banks have the same systemic significance")
        if b @ v == 0.0:
            raise AssumptionViolated("b . v must be nonzero")
        for name, val in (("q", q), ("b", b), ("v", v), ("g", g)):
            object.__setattr__(self, name, val)

    @classmethod
    def from_model(cls, model: MarketModel) -> "FeasibilitySpec":
        banks = model.banks
        return cls(banks.aggregate, banks.budgets, model.v, model.g)

    @property
    def n_assets(self) -> int:
        return self.q.size

    @property
    def n_banks(self) -> int:
        return self.b.size

    @property
    def total(self) -> float:
        return float(self.q.sum())


def _has_distinct(v) -> bool:
    scale = max(1.0, float(np.abs(v).max()))
    return bool(np.any(np.abs(v - v[0]) > DISTINCT_RTOL * scale))


def reference_order(v) -> np.ndarray:
    """Bank permutation putting two banks of different significance first.

    Identity when ``v[0] != v[1]``; otherwise bank 2 is swapped with the
    lowest-index bank whose significance differs from bank 1's.
    """
    v = numerics.as_vector(v, "v")
    if v.size < 2 or not _has_distinct(v):
        raise AssumptionViolated("at least two banks with different systemic significance are required")
    perm = np.arange(v.size)
    scale = DISTINCT_RTOL * max(1.0, float(np.abs(v).max()))
    if abs(v[1] - v[0]) <= scale:
        j = 2 + int(np.flatnonzero(np.abs(v[2:] - v[0]) > scale)[0])
        perm[[1, j]] = perm[[j, 1]]
    return perm


def shock_statistics_inverse(mu, sigma2) -> np.ndarray:
    """Closed-form ``G^{-1}`` by Sherman-Morrison for ``G = mu mu^T + Diag(sigma2)``."""
    mu = numerics.as_vector(mu, "mu")
    sigma2 = numerics.as_vector(sigma2, "sigma2", mu.size)
    w = mu / sigma2
    return np.diag(1.0 / sigma2) - np.outer(w, w) / (1.0 + w @ mu)


def aggregate_weighted_holdings(spec: FeasibilitySpec) -> np.ndarray:
    """Optimal aggregate ``v``-weighted holdings ``y* = (b.v / 1.z) z``, ``z = G^{-1} 1``."""
    z = numerics.solve_linear(spec.g, np.ones(spec.n_assets))
    denom = z.sum()
    if abs(denom) < 1e-12:
        raise DegenerateAggregation("1^T G^{-1} 1 is numerically zero")
    return (spec.b @ spec.v / denom) * z


def allocate(spec: FeasibilitySpec, y_star) -> np.ndarray:
    """Particular feasible holdings ``Q^p`` with ``Q^p v = y_star``.

    Banks 3..N put their whole budget in the first asset; the first two
    banks absorb the balancing terms.
    """
    y = numerics.as_vector(y_star, "y_star", spec.n_assets)
    perm = reference_order(spec.v)
    v, b, q = spec.v[perm], spec.b[perm], spec.q
    dv = v[1] - v[0]
    rest_b, rest_v = b[2:], v[2:]
    col1 = v[1] * q - y
    col2 = y - v[0] * q
    col1[0] -= np.sum((v[1] - rest_v) * rest_b)
    col2[0] -= np.sum((rest_v - v[0]) * rest_b)
    qp = np.zeros((spec.n_assets, spec.n_banks))
    qp[:, 0] = col1 / dv
    qp[:, 1] = col2 / dv
    qp[0, 2:] = rest_b
    out = np.empty_like(qp)
    out[:, perm] = qp
    return out


def null_space_basis(v, k: int) -> np.ndarray:
    """Basis of allocation moves that keep row sums, column sums and ``Q v`` fixed.

    Returns a ``(K N) x ((K - 1)(N - 2))`` matrix whose columns are
    vectorised (column-major) ``K x N`` moves.
    """
    v = numerics.as_vector(v, "v")
    n = v.size
    perm = reference_order(v)
    vp = v[perm]
    dv = vp[1] - vp[0]
    block = np.vstack([-np.ones((1, k - 1)), np.eye(k - 1)])
    basis = np.zeros((k * n, (k - 1) * max(n - 2, 0)))
    for j in range(2, n):
        cols = slice((j - 2) * (k - 1), (j - 1) * (k - 1))
        basis[0:k, cols] = (vp[1] - vp[j]) / dv * block
        basis[k:2 * k, cols] = (vp[j] - vp[0]) / dv * block
        basis[j * k:(j + 1) * k, cols] = -block
    out = np.empty_like(basis)
    for pos, bank in enumerate(perm):
        out[bank * k:(bank + 1) * k] = basis[pos * k:(pos + 1) * k]
    return out


def constraint_matrix(v, k: int) -> np.ndarray:
    """Stacked budget, supply and multiplier constraints acting on ``vec(Q)``.

    Rows: ``N`` column sums, ``K`` row sums, ``K`` rows of ``Q v``.
    """
    v = numerics.as_vector(v, "v")
    n = v.size
    budget_rows = np.kron(np.eye(n), np.ones((1, k)))
    supply_rows = np.kron(np.ones((1, n)), np.eye(k))
    multiplier_rows = np.kron(v.reshape(1, -1), np.eye(k))
    return np.vstack([budget_rows, supply_rows, multiplier_rows])


def vec(q) -> np.ndarray:
    return np.asarray(q, dtype=float).reshape(-1, order="F")


def unvec(x, k: int, n: int) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape((k, n), order="F")


@dataclass(frozen=True, eq=False)
class EfficientSolutionSet:
    """All f-efficient holdings: ``particular + unvec(null_basis @ lam)``."""

    particular: np.ndarray
    null_basis: np.ndarray
    y_star: np.ndarray
    msd_optimal: float
    spec: FeasibilitySpec = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.null_basis.shape[1]

    @property
    def is_unique(self) -> bool:
        return self.dimension == 0

    def member(self, lam) -> np.ndarray:
        lam = numerics.as_vector(lam, "lam", self.dimension)
        k, n = self.particular.shape
        return self.particular + unvec(self.null_basis @ lam, k, n)

    @property
    def has_short_positions(self) -> bool:
        return bool(np.any(self.particular < 0))


def solve_f_efficient(spec: FeasibilitySpec) -> EfficientSolutionSet:
    """Particular solution, null-space basis, ``y*`` and the optimal MSD ``(b.v)^2 / 1^T G^{-1} 1``."""
    y_star = aggregate_weighted_holdings(spec)
    particular = allocate(spec, y_star)
    basis = null_space_basis(spec.v, spec.n_assets)
    ones = np.ones(spec.n_assets)
    msd = float((spec.b @ spec.v) ** 2 / (ones @ numerics.solve_linear(spec.g, ones)))
    return EfficientSolutionSet(particular, basis, y_star, msd, spec)


def diversified_holdings(spec: FeasibilitySpec) -> np.ndarray:
    """Full diversification ``q b^T / T``."""
    total = spec.total
    if total == 0.0:
        raise ZeroTotal("total banking-sector holdings are zero")
    return np.outer(spec.q, spec.b) / total


def diverse_holdings(spec: FeasibilitySpec) -> np.ndarray:
    """Fully diverse holdings ``Diag(q)``: bank ``i`` holds only asset ``i``. Needs ``N == K``."""
    if spec.n_assets != spec.n_banks:
        raise ValidationError("diverse holdings are defined only for N == K", code="VALIDATION_SHAPE")
    return np.diag(spec.q)


def is_diversification_efficient(spec: FeasibilitySpec, tol: float = 1e-9) -> bool:
    """True when ``q`` and ``G^{-1} 1`` are linearly dependent."""
    z = numerics.solve_linear(spec.g, np.ones(spec.n_assets))
    qn = spec.q / np.linalg.norm(spec.q)
    zn = z / np.linalg.norm(z)
    return bool(min(np.linalg.norm(qn - zn), np.linalg.norm(qn + zn)) <= tol)


def min_distance_solution(solset: EfficientSolutionSet, target) -> np.ndarray:
    """Element of the f-efficient set closest to ``target`` in Frobenius norm."""
    target = numerics.as_matrix(target, "target")
    if target.shape != solset.particular.shape:
        raise ValidationError(
            f"target shape {target.shape} differs from {solset.particular.shape}", code="VALIDATION_SHAPE"
        )
    if solset.is_unique:
        return solset.particular.copy()
    lam = numerics.least_squares(solset.null_basis, vec(target - solset.particular))
    return solset.member(lam)


def msd(solset: EfficientSolutionSet, q) -> float:
    return mean_squared_deviation(q, solset.spec.v, solset.spec.g)
