"""Closed-form comparative statics for two banks and two assets.

With ``q1 = q2 = b1 = b2 = x`` the unique f-efficient matrix is symmetric,
``[[Q11, x - Q11], [x - Q11, Q11]]``, and its distance from full
diversification ``x/2 * ones`` has a closed form in ``(mu, sigma2, v)``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics
from .errors import AssumptionViolated, HypothesisNotMet, ValidationError

FD_STEP = 1e-6
ZERO_THRESHOLD = 1e-8
DEFAULT_POINTS = 201
PARAMETERS = ("sigma1_sq", "mu2", "v2")


@dataclass(frozen=True)
class TwoByTwoInputs:
    x: float
    mu: tuple
    sigma2: tuple
    v: tuple

    def __post_init__(self):
        mu = tuple(float(m) for m in numerics.as_vector(self.mu, "mu", 2))
        sigma2 = tuple(float(s) for s in numerics.as_vector(self.sigma2, "sigma2", 2))
        v = tuple(float(s) for s in numerics.as_vector(self.v, "v", 2))
        if not self.x > 0:
            raise ValidationError("x must be > 0", code="VALIDATION_X")
        if min(sigma2) <= 0:
            raise ValidationError("sigma2 entries must be > 0", code="VALIDATION_SIGMA")
        if v[0] == v[1]:
            raise AssumptionViolated("v1 and v2 must differ")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "v", v)

    def with_parameter(self, name: str, value: float) -> "TwoByTwoInputs":
        if name == "sigma1_sq":
            return replace(self, sigma2=(value, self.sigma2[1]))
        if name == "mu2":
            return replace(self, mu=(self.mu[0], value))
        if name == "v2":
            return replace(self, v=(self.v[0], value))
        raise ValueError(f"unknown parameter {name!r}; expected one of {PARAMETERS}")


def _moments(inputs):
    (m1, m2), (s1, s2) = inputs.mu, inputs.sigma2
    denom = m1**2 + m2**2 - 2 * m1 * m2 + s1 + s2
    return m1, m2, s1, s2, denom


def weights_2x2(inputs: TwoByTwoInputs) -> np.ndarray:
    """``z = G^{-1} 1`` for two assets."""
    m1, m2, s1, s2, _ = _moments(inputs)
    det = (m1**2 + s1) * (m2**2 + s2) - (m1 * m2) ** 2
    return np.array([m2**2 + s2 - m1 * m2, m1**2 + s1 - m1 * m2]) / det


def q11_2x2(inputs: TwoByTwoInputs) -> float:
    m1, m2, s1, s2, denom = _moments(inputs)
    v1, v2 = inputs.v
    num = v2 * (m1**2 + s1 - m1 * m2) - v1 * (m2**2 + s2 - m1 * m2)
    return inputs.x * num / ((v2 - v1) * denom)


def efficient_2x2(inputs: TwoByTwoInputs) -> np.ndarray:
    q11 = q11_2x2(inputs)
    off = inputs.x - q11
    return np.array([[q11, off], [off, q11]])


def distance_from_diversification_2x2(inputs: TwoByTwoInputs) -> float:
    """Frobenius distance of the f-efficient matrix from ``x/2 * ones``."""
    m1, m2, s1, s2, denom = _moments(inputs)
    v1, v2 = inputs.v
    return inputs.x * abs(m1**2 - m2**2 + s1 - s2) * abs(v1 + v2) / (abs(v2 - v1) * denom)


def distance_from_weights_2x2(inputs: TwoByTwoInputs) -> float:
    """Same distance written through ``z = G^{-1} 1``."""
    z1, z2 = weights_2x2(inputs)
    v1, v2 = inputs.v
    return inputs.x * abs(z1 - z2) * abs(v1 + v2) / (abs(v2 - v1) * abs(z1 + z2))


def analytic_derivatives(inputs: TwoByTwoInputs) -> dict:
    """Derivative expressions of ``d^2``, ``d`` and ``Q11`` from the closed forms.

    ``d2_sigma1`` assumes ``mu1 == mu2``; the rest are general.
    """
    m1, m2, s1, s2, denom = _moments(inputs)
    v1, v2 = inputs.v
    x = inputs.x
    sig1 = np.sqrt(s1)
    inner = -2 * m2 * s1 + m1 * (m1**2 + m2**2 - 2 * m1 * m2 + s1 - s2)
    return {
        "d2_sigma1": 8 * sig1 * s2 * (s1 - s2) * (v1 + v2) ** 2 * x**2 / ((s1 + s2) ** 3 * (v1 - v2) ** 2),
        "q11_sigma1": x * 2 * sig1 * (m2**2 + s2 - m1 * m2) * (v1 + v2) / ((v2 - v1) * denom**2),
        "d2_mu2": x**2 * 4 * (m1**2 - m2**2 + s1 - s2) * inner * (v1 + v2) ** 2 / (denom**3 * (v2 - v1) ** 2),
        "q11_mu2": x * inner * (v1 + v2) / (denom**2 * (v2 - v1)),
        "d_v2": x * 2 * v1 / ((v1 + v2) * (v1 - v2)) * distance_from_diversification_2x2(inputs) / x,
    }


def statics_sweep(inputs: TwoByTwoInputs, parameter: str, grid) -> dict:
    """Evaluate ``Q11``, ``Q21`` and the distance over a parameter grid.

    Returns columns ``param, q11, q21, distance, valid``; inadmissible grid
    points get ``valid = False`` and NaN values.
    """
    if parameter not in PARAMETERS:
        raise ValueError(f"unknown parameter {parameter!r}; expected one of {PARAMETERS}")
    grid = np.asarray(grid, dtype=float).reshape(-1)
    q11 = np.full(grid.size, np.nan)
    q21 = np.full(grid.size, np.nan)
    dist = np.full(grid.size, np.nan)
    valid = np.zeros(grid.size, dtype=bool)
    for idx, value in enumerate(grid):
        try:
            point = inputs.with_parameter(parameter, value)
        except ValidationError:
            continue
        q = efficient_2x2(point)
        q11[idx], q21[idx] = q[0, 0], q[1, 0]
        dist[idx] = distance_from_diversification_2x2(point)
        valid[idx] = True
    return {"param": grid, "q11": q11, "q21": q21, "distance": dist, "valid": valid}


@dataclass(frozen=True)
class FigurePreset:
    inputs: TwoByTwoInputs
    parameter: str
    lo: float
    hi: float

    def grid(self, points: int = DEFAULT_POINTS) -> np.ndarray:
        return np.linspace(self.lo, self.hi, points)

    def sweep(self, points: int = DEFAULT_POINTS) -> dict:
        return statics_sweep(self.inputs, self.parameter, self.grid(points))


# Axis ranges are not given numerically anywhere; these are plotting defaults.
FIGURES = {
    "sigma1_sq": FigurePreset(TwoByTwoInputs(0.08, (0.0, 0.0), (0.2, 0.2), (0.04, 0.07)), "sigma1_sq", 0.0, 0.5),
    "mu2": FigurePreset(TwoByTwoInputs(0.08, (0.0, 0.0), (0.1, 0.2), (0.04, 0.07)), "mu2", -0.5, 0.5),
    "v2": FigurePreset(TwoByTwoInputs(0.08, (0.0, 0.0), (0.1, 0.2), (0.04, 0.07)), "v2", 0.0, 0.2),
}


def _central(f, inputs, parameter, value, transform=None):
    h = FD_STEP * max(1.0, abs(value))
    lo, hi = value - h, value + h
    if transform is not None:
        lo, hi = transform(lo), transform(hi)
    return (f(inputs.with_parameter(parameter, hi)) - f(inputs.with_parameter(parameter, lo))) / (2 * h)


def _sign(value: float) -> int:
    return 0 if abs(value) < ZERO_THRESHOLD else (1 if value > 0 else -1)


@dataclass
class DerivativeReport:
    lemma: str
    numeric: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def observed_sign(self, key: str) -> int:
        return _sign(self.numeric[key])


def _distance_sq(point):
    return distance_from_diversification_2x2(point) ** 2


def check_derivative_signs(inputs: TwoByTwoInputs, lemma: str) -> DerivativeReport:
    """Finite-difference derivative signs checked against the known sign tables.

    ``lemma`` picks the parameter: ``"sigma1"`` (needs ``mu1 == mu2``),
    ``"mu2"`` (needs ``sigma1^2 == sigma2^2`` and ``mu1 == 0``) or ``"v2"``
    (needs ``v1, v2 > 0`` and ``|z1| != |z2|``). The distance sign is read off
    ``d^2``, which shares the sign of the derivative of ``d`` wherever
    ``d > 0`` and stays differentiable where ``d`` vanishes. ``Q11`` signs are
    checked only when ``v2 > v1 > 0``.
    """
    report = DerivativeReport(lemma)
    v1, v2 = inputs.v
    ordered = v2 > v1 > 0
    if lemma == "sigma1":
        if inputs.mu[0] != inputs.mu[1]:
            raise HypothesisNotMet("requires mu1 == mu2")
        s1 = np.sqrt(inputs.sigma2[0])
        square = lambda s: s * s  # noqa: E731
        report.numeric["distance"] = _central(_distance_sq, inputs, "sigma1_sq", s1, square)
        report.expected["distance"] = int(np.sign(inputs.sigma2[0] - inputs.sigma2[1]))
        if ordered:
            report.numeric["q11"] = _central(q11_2x2, inputs, "sigma1_sq", s1, square)
            report.expected["q11"] = 1
    elif lemma == "mu2":
        if inputs.sigma2[0] != inputs.sigma2[1] or inputs.mu[0] != 0:
            raise HypothesisNotMet("requires sigma1^2 == sigma2^2 and mu1 == 0")
        m2 = inputs.mu[1]
        report.numeric["distance"] = _central(_distance_sq, inputs, "mu2", m2)
        report.expected["distance"] = int(np.sign(m2))
        if ordered:
            report.numeric["q11"] = _central(q11_2x2, inputs, "mu2", m2)
            report.expected["q11"] = -int(np.sign(m2))
    elif lemma == "v2":
        z1, z2 = weights_2x2(inputs)
        if not (v1 > 0 and v2 > 0) or abs(z1) == abs(z2):
            raise HypothesisNotMet("requires v1, v2 > 0 and |z1| != |z2|")
        report.numeric["distance"] = _central(distance_from_diversification_2x2, inputs, "v2", v2)
        report.expected["distance"] = 1 if v2 < v1 else -1
    else:
        raise ValueError(f"unknown lemma {lemma!r}; expected 'sigma1', 'mu2' or 'v2'")
    for key, sign in report.expected.items():
        if report.observed_sign(key) != sign:
            report.violations.append(
                f"d{key}/d{lemma}: expected sign {sign:+d}, finite difference {report.numeric[key]:.3e}"
            )
    return report
