"""Exception hierarchy shared by every layer.

Library code raises these; `main.py` turns them into a stderr message and the
exit code stored on the class (2 input, 3 domain, 4 verification/consistency).
"""
from typing import Optional, Tuple


class UtilityError(Exception):
    exit_code = 1


# ---------------- INPUT (exit 2) ---------------- #

class InputError(UtilityError, ValueError):
    exit_code = 2


class NegativeProbError(InputError):
    pass


class NotNormalizedError(InputError):
    pass


class DuplicateLabelError(InputError):
    pass


class TooFewAtomsError(InputError):
    pass


class AllZeroCountsError(InputError):
    pass


class NonFiniteError(InputError):
    pass


class DistributionFormatError(InputError):
    """Distribution JSON or counts CSV could not be parsed"""


class InvalidRangeError(InputError):
    """Malformed `start:stop:step` sweep range"""


# ---------------- DOMAIN (exit 3) ---------------- #

class DomainError(UtilityError):
    exit_code = 3


class LabelMismatchError(DomainError):
    pass


class SupportMismatchError(DomainError):
    """U puts mass on an atom where P is zero (fairness ratio undefined)"""


class SupportViolationError(DomainError):
    """U is not absolutely continuous w.r.t. P"""


class DegeneratePmfError(DomainError):
    pass


class NoConvergenceError(DomainError):
    pass


class AlphabetTooLargeError(DomainError):
    pass


class NoFeasiblePointError(DomainError):
    pass


class InfeasibleSeedError(DomainError):
    pass


class TooLargeError(DomainError):
    pass


class InvalidGridStepError(DomainError):
    """Lattice step outside the oracle bounds"""


class _RangeError(DomainError):
    def __init__(self, message: str, feasible: Optional[Tuple[float, float]] = None):
        if feasible is not None:
            message = f"{message}; feasible range [{feasible[0]:.12g}, {feasible[1]:.12g}]"
        super().__init__(message)
        self.feasible = feasible


class BetaOutOfRangeError(_RangeError):
    pass


class InfeasibleBudgetError(_RangeError):
    pass


# ---------------- VERIFICATION (exit 4) ---------------- #

class ConsistencyError(UtilityError):
    """An identity that must hold by construction did not"""
    exit_code = 4
