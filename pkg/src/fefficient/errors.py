"""Exception hierarchy.

Every error carries a machine-readable ``code`` and the process exit status
the command-line front end uses for it (2 validation, 3 numerical, 4 IO).
"""


class FefficientError(Exception):
    code = "ERROR"
    exit_status = 1

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


# -- validation (exit 2) ----------------------------------------------------

class ValidationError(FefficientError, ValueError):
    code = "VALIDATION"
    exit_status = 2


class ParseError(ValidationError):
    code = "PARSE"


class NegativeEntry(ValidationError):
    code = "VALIDATION_NEGATIVE"


class AssumptionViolated(ValidationError):
    code = "ASSUMPTION"


class ZeroTotal(ValidationError):
    code = "ZERO_TOTAL"


class InvalidStrategy(ValidationError):
    code = "INVALID_STRATEGY"


class InfeasibleHoldings(ValidationError):
    code = "INFEASIBLE_HOLDINGS"


class HypothesisNotMet(ValidationError):
    code = "HYPOTHESIS_NOT_MET"


# -- numerical (exit 3) -----------------------------------------------------

class NumericalError(FefficientError, ArithmeticError):
    code = "NUMERICAL"
    exit_status = 3


class SingularMatrix(NumericalError):
    code = "SINGULAR"


class UnstableSystem(NumericalError):
    code = "UNSTABLE"


class NonpositivePrice(NumericalError):
    code = "NONPOSITIVE_PRICE"


class DegenerateAggregation(NumericalError):
    code = "DEGENERATE_AGGREGATION"


# -- IO (exit 4) --------------------------------------------------------------

class OutputError(FefficientError, OSError):
    code = "IO"
    exit_status = 4
