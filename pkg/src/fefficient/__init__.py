"""Fire-sale efficient bank holdings in a leverage-targeting market model."""

from .errors import (
    AssumptionViolated,
    DegenerateAggregation,
    FefficientError,
    HypothesisNotMet,
    InfeasibleHoldings,
    InvalidStrategy,
    NegativeEntry,
    NonpositivePrice,
    NumericalError,
    OutputError,
    ParseError,
    SingularMatrix,
    UnstableSystem,
    ValidationError,
    ZeroTotal,
)
from .liquidation import LiquidationProblem, kkt_point, kkt_residuals, most_liquid_strategy, msd_of_strategy
from .market import (
    AssetUniverse,
    BankingSector,
    MarketModel,
    check_market_clearing,
    market_capitalizations,
    mean_squared_deviation,
    price_change,
    systemic_significance,
    systemicness_matrix,
)
from .montecarlo import ScenarioRun, compare_holdings, empirical_density, run_simulation
from .scenarios import ScenarioConfig, builtin_scenario, load_scenario, save_scenario
from .solver import (
    EfficientSolutionSet,
    FeasibilitySpec,
    diversified_holdings,
    is_diversification_efficient,
    min_distance_solution,
    solve_f_efficient,
)
from .statics import TwoByTwoInputs, check_derivative_signs, efficient_2x2, statics_sweep

__version__ = "0.1.0"
