"""Exception hierarchy.

Domain errors map to CLI exit code 1, usage and parse errors to exit code 2.
"""


class DrinfeldError(Exception):
    """Base class for all library errors."""

    code = "error"


class DomainError(DrinfeldError):
    code = "domain"


class UsageError(DrinfeldError):
    code = "usage"


class ParseError(UsageError):
    code = "parse"


class ZeroArgument(DomainError):
    code = "zero_argument"


class ZeroTwist(DomainError):
    code = "zero_twist"


class ConstantArgument(DomainError):
    code = "constant_argument"


class DegeneratePolynomial(DomainError):
    code = "degenerate_polynomial"


class NeedsExtension(DomainError):
    code = "needs_extension"


class PrecisionExhausted(DomainError):
    code = "precision_exhausted"


class HenselHypothesisFailed(DomainError):
    code = "hensel_hypothesis_failed"


class BudgetExceeded(DomainError):
    code = "budget_exceeded"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotInJuliaSet(DomainError):
    code = "not_in_julia_set"


class NotASubgroup(DomainError):
    code = "not_a_subgroup"


class IncompleteComponentData(DomainError):
    code = "incomplete_component_data"


class InvariantViolation(DomainError):
    code = "invariant_violation"


class TrivialConductor(DomainError):
    code = "trivial_conductor"


class NotSemistable(DomainError):
    code = "not_semistable"


class NTooSmall(DomainError):
    code = "n_too_small"
