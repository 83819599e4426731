import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from config.settings import Config
from distributions.pmf import Pmf
from utils.errors import DegeneratePmfError, InputError
from utils.validators import ensure_finite_scalar

logger = logging.getLogger("solver.constraint")


class Mode(str, Enum):
    EQUALITY = "equality"       # sum P(a)U(a) = beta, the full family incl. w < 0
    INEQUALITY = "inequality"   # sum P(a)U(a) <= beta, the minimisation problem

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            raise InputError(f"mode must be 'equality' or 'inequality', got {value!r}") from e


@dataclass(frozen=True)
class ConstraintSpec:
    """Usage budget given as beta or as its slack alpha = 1 - beta."""
    mode: Mode
    budget: Optional[float] = None
    slack: Optional[float] = None

    def __post_init__(self):
        if self.mode is None:
            raise InputError("constraint mode must be given explicitly")
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if (self.budget is None) == (self.slack is None):
            raise InputError("give exactly one of budget (beta) or slack (alpha)")
        if self.budget is not None:
            beta = ensure_finite_scalar(self.budget, "beta")
            object.__setattr__(self, "budget", beta)
            object.__setattr__(self, "slack", 1.0 - beta)
        else:
            alpha = ensure_finite_scalar(self.slack, "alpha")
            object.__setattr__(self, "slack", alpha)
            object.__setattr__(self, "budget", 1.0 - alpha)

    @classmethod
    def equality(cls, beta: float) -> "ConstraintSpec":
        return cls(Mode.EQUALITY, budget=beta)

    @classmethod
    def inequality(cls, beta: float) -> "ConstraintSpec":
        return cls(Mode.INEQUALITY, budget=beta)

    @property
    def beta(self) -> float:
        return self.budget

    @property
    def alpha(self) -> float:
        return self.slack

    def with_mode(self, mode) -> "ConstraintSpec":
        return ConstraintSpec(Mode.parse(mode), budget=self.budget)

    def satisfied_by(self, p: np.ndarray, u: np.ndarray, slack: float = 0.0) -> bool:
        """Check sum P(a)U(a) against the budget, allowing `slack`."""
        value = float(np.dot(p, u))
        if self.mode is Mode.EQUALITY:
            return abs(value - self.budget) <= slack
        return value <= self.budget + slack


@dataclass(frozen=True)
class FeasibleRange:
    beta_min: float
    beta_max: float
    beta_neutral: float

    def contains_open(self, beta: float, tol: Optional[float] = None) -> bool:
        """Strictly inside (beta_min, beta_max), i.e. reachable at finite w."""
        tol = Config.BETA_TOL if tol is None else tol
        return self.beta_min + tol < beta < self.beta_max - tol

    def as_tuple(self):
        return (self.beta_min, self.beta_max)


def distinct_support(P: Pmf) -> np.ndarray:
    p = P.vector
    return np.unique(p[p > 0.0])


def require_nondegenerate(P: Pmf):
    if distinct_support(P).size < 2:
        raise DegeneratePmfError(
            "beta(w) is constant: need at least two distinct positive probabilities"
        )


def feasible_range(P: Pmf) -> FeasibleRange:
    """Reachable budgets [p_min, p_max] and the neutral budget sum p_i^2."""
    require_nondegenerate(P)
    return FeasibleRange(P.p_min, P.p_max, P.collision_probability)
