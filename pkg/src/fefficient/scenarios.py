"""Calibrated market scenarios and JSON scenario files.

File layout (all numbers decimal, matrices as lists of rows)::

    {
      "name": "L",
      "assets": {"mu": [...], "sigma2": [...], "gamma": [...], "q_tot": [...],
                 "q_nonbank": [...],   # optional, default q_tot - row sums
                 "p0": [...]},         # optional, default ones
      "banks": {"kappa": [...], "alpha": [[...]], "holdings": [[...]],
                "budgets": [...]},     # optional, default column sums
      "shock": {"family": "normal", "mean": [...], "variance": [...]},  # optional
      "run": {"samples": 100000, "seed": 20200319}                       # optional
    }
"""

from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .market import AssetUniverse, BankingSector, MarketModel

DEFAULT_SEED = 20200319
DEFAULT_SAMPLES = 100_000
SHOCK_FAMILIES = ("normal",)

_MU = (0.1, 0.1, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.3, 0.3)
_CALIBRATION = {
    "L": ((9, 9, 8, 8, 8, 8, 8, 8, 7, 7), (0.1, 0.1, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.3, 0.3)),
    "I": ((9, 9, 8, 8, 8, 8, 8, 8, 1, 1), (0.1, 0.1, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 1.0, 1.0)),
    "H": ((3, 3, 2, 2, 2, 2, 2, 2, 1, 1), (0.9, 0.9, 1.1, 1.1, 1.1, 1.1, 1.1, 1.1, 1.2, 1.2)),
}
BUILTIN_NAMES = ("L", "I", "H", "B")


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    assets: AssetUniverse
    banks: BankingSector
    shock_mean: np.ndarray
    shock_variance: np.ndarray
    family: str = "normal"
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        k, n = self.assets.count, self.banks.count
        if self.banks.holdings.shape != (k, n):
            raise ValidationError(
                f"holdings are {self.banks.holdings.shape}, expected {k} x {n}", code="VALIDATION_SHAPE"
            )
        mean = np.asarray(self.shock_mean, dtype=float).reshape(-1)
        var = np.asarray(self.shock_variance, dtype=float).reshape(-1)
        if mean.size != k or var.size != k:
            raise ValidationError("shock mean and variance must have one entry per asset", code="VALIDATION_SHAPE")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(var))):
            raise ValidationError("shock moments must be finite", code="VALIDATION_FINITE")
        if np.any(var <= 0):
            raise ValidationError("shock variance entries must be > 0", code="VALIDATION_SIGMA")
        if self.family not in SHOCK_FAMILIES:
            raise ValidationError(f"unsupported shock family {self.family!r}", code="VALIDATION_FAMILY")
        if int(self.samples) < 1:
            raise ValidationError("samples must be >= 1", code="VALIDATION_SAMPLES")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer", code="VALIDATION_SEED")
        object.__setattr__(self, "shock_mean", mean)
        object.__setattr__(self, "shock_variance", var)
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed))

    def model(self) -> MarketModel:
        return MarketModel(self.assets, self.banks)

    def to_dict(self) -> dict:
        a, b = self.assets, self.banks
        assets = {"mu": a.mu, "sigma2": a.sigma2, "gamma": a.gamma, "q_tot": a.q_tot}
        if a.q_nonbank is not None:
            assets["q_nonbank"] = a.q_nonbank
        assets["p0"] = a.p0
        tree = {
            "name": self.name,
            "assets": assets,
            "banks": {"kappa": b.kappa, "alpha": b.alpha, "holdings": b.holdings, "budgets": b.budgets},
            "shock": {"family": self.family, "mean": self.shock_mean, "variance": self.shock_variance},
            "run": {"samples": self.samples, "seed": self.seed},
        }
        return _tolist(tree)


def _tolist(node):
    if isinstance(node, dict):
        return {k: _tolist(v) for k, v in node.items()}
    if isinstance(node, np.ndarray):
        return node.tolist()
    return node


def builtin_scenario(name: str) -> ScenarioConfig:
    """Calibrated ten-asset, two-bank scenarios ``L``, ``I``, ``H``, plus fixture ``B``.

    In ``L``/``I``/``H`` banks hold 0.08 of every asset in aggregate (split
    evenly, so each budget is 0.4), nonbanks hold 0.92, supply is 1, leverage
    targets are (9, 10) and both banks liquidate proportionally.

    ``B`` is a three-bank, three-asset economy with zero-mean shocks,
    ``sigma2 = (0.15, 0.2, 0.3)``, ``q = b = 0.08`` and leverage targets
    chosen so that ``v = (0.15, 0.1, 0.05)``.
    """
    key = name.upper()
    if key == "B":
        return _three_bank_fixture()
    if key not in _CALIBRATION:
        raise ValidationError(f"unknown builtin scenario {name!r}; choose from {BUILTIN_NAMES}", code="VALIDATION_SCENARIO")
    gamma, sigma = _CALIBRATION[key]
    k, n = len(gamma), 2
    sigma2 = np.square(sigma)
    assets = AssetUniverse(mu=_MU, sigma2=sigma2, gamma=gamma, q_tot=np.ones(k), q_nonbank=np.full(k, 0.92))
    banks = BankingSector(
        kappa=(9.0, 10.0),
        alpha=np.full((k, n), 1.0 / k),
        holdings=np.full((k, n), 0.04),
        budgets=(0.4, 0.4),
    )
    return ScenarioConfig(key, assets, banks, np.array(_MU), sigma2)


def _three_bank_fixture() -> ScenarioConfig:
    x, k = 0.08, 3
    nonbank = 1.0 - x
    v = np.array([0.15, 0.1, 0.05])
    assets = AssetUniverse(
        mu=np.zeros(k), sigma2=(0.15, 0.2, 0.3), gamma=np.ones(k), q_tot=np.ones(k), q_nonbank=np.full(k, nonbank)
    )
    # v_i = kappa_i * sum_k alpha_ki / (gamma_k * qnb_k) = kappa_i / qnb with uniform alpha
    banks = BankingSector(
        kappa=v * nonbank, alpha=np.full((k, k), 1.0 / k), holdings=np.full((k, k), x / k), budgets=np.full(k, x)
    )
    return ScenarioConfig("B", assets, banks, np.zeros(k), np.array([0.15, 0.2, 0.3]))


def _require(tree: dict, path: str):
    node = tree
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ParseError(f"missing field {path!r}", code="PARSE_MISSING")
        node = node[part]
    return node


def _optional(tree: dict, path: str, default=None):
    try:
        return _require(tree, path)
    except ParseError:
        return default


def _array(value, path: str, ndim: int):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {path!r} is not numeric: {exc}", code="PARSE_TYPE") from None
    if arr.ndim != ndim:
        raise ParseError(f"field {path!r} must be a {'matrix' if ndim == 2 else 'vector'}", code="PARSE_TYPE")
    return arr


def config_from_dict(tree: dict) -> ScenarioConfig:
    if not isinstance(tree, dict):
        raise ParseError("scenario document must be a JSON object", code="PARSE_TYPE")
    vec = lambda p: _array(_require(tree, p), p, 1)  # noqa: E731
    mat = lambda p: _array(_require(tree, p), p, 2)  # noqa: E731
    opt = lambda p, nd: None if _optional(tree, p) is None else _array(_optional(tree, p), p, nd)  # noqa: E731
    assets = AssetUniverse(
        mu=vec("assets.mu"),
        sigma2=vec("assets.sigma2"),
        gamma=vec("assets.gamma"),
        q_tot=vec("assets.q_tot"),
        q_nonbank=opt("assets.q_nonbank", 1),
        p0=opt("assets.p0", 1),
    )
    banks = BankingSector(
        kappa=vec("banks.kappa"),
        alpha=mat("banks.alpha"),
        holdings=mat("banks.holdings"),
        budgets=opt("banks.budgets", 1),
    )
    mean = opt("shock.mean", 1)
    variance = opt("shock.variance", 1)
    return ScenarioConfig(
        name=str(_optional(tree, "name", "custom")),
        assets=assets,
        banks=banks,
        shock_mean=assets.mu if mean is None else mean,
        shock_variance=assets.sigma2 if variance is None else variance,
        family=str(_optional(tree, "shock.family", "normal")),
        samples=_optional(tree, "run.samples", DEFAULT_SAMPLES),
        seed=_optional(tree, "run.seed", DEFAULT_SEED),
    )


def read_tree(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", code="PARSE_IO") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", code="PARSE_SYNTAX") from None


def load_scenario(path, overrides=()) -> ScenarioConfig:
    tree = apply_overrides(read_tree(path), overrides)
    return config_from_dict(tree)


def save_scenario(config: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")


def apply_overrides(tree: dict, overrides) -> dict:
    """Apply ``dotted.path=value`` overrides; list elements are addressed by index.

    Values are parsed as JSON, falling back to the raw string.
    """
    tree = json.loads(json.dumps(tree))
    for item in overrides:
        if "=" not in item:
            raise ParseError(f"override {item!r} is not of the form key=value", code="PARSE_OVERRIDE")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = key.strip().split(".")
        node = tree
        for depth, part in enumerate(parts):
            last = depth == len(parts) - 1
            if isinstance(node, list):
                try:
                    idx = int(part)
                    node[idx]
                except (ValueError, IndexError):
                    raise ParseError(f"override {key!r}: bad list index {part!r}", code="PARSE_OVERRIDE") from None
                if last:
                    node[idx] = value
                else:
                    node = node[idx]
            elif isinstance(node, dict):
                if last:
                    node[part] = value
                else:
                    node = node.setdefault(part, {})
            else:
                raise ParseError(f"override {key!r}: cannot descend into a scalar", code="PARSE_OVERRIDE")
    return tree


def resolve_scenario(ref: str, overrides=()) -> ScenarioConfig:
    """Builtin name (``L``, ``I``, ``H``, ``B``) or path to a scenario file."""
    if ref.upper() in BUILTIN_NAMES and not Path(ref).exists():
        config = builtin_scenario(ref)
        if overrides:
            config = config_from_dict(apply_overrides(config.to_dict(), overrides))
        return config
    return load_scenario(ref, overrides)
