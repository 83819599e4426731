"""
The beta <-> w map on the equality family.

beta(w) = sum_j p_j U*_j(w) is strictly decreasing for any distribution with
two distinct positive probabilities: d beta / dw = -Var_{U*(w)}(p) < 0. The
inverse is found by bisection on a bracket grown by doubling from [-1, 1].
"""
import logging
from typing import Tuple, Union

import numpy as np
from scipy.optimize import bisect

from config.settings import Config
from distributions.pmf import Pmf
from solver.constraint import ConstraintSpec, Mode, feasible_range, require_nondegenerate
from tilting.tilt import ImportanceCoefficient, OmegaLike, as_omega, tilted_vector
from utils.errors import BetaOutOfRangeError, InputError, NoConvergenceError

logger = logging.getLogger("solver.equality")


def _beta_at(p: np.ndarray, omega: float) -> float:
    u, _ = tilted_vector(p, omega)
    return float(np.dot(p, u))


def beta_of_omega(P: Pmf, omega: OmegaLike) -> float:
    """Average usage sum P(a)U*(a) produced by coefficient w."""
    require_nondegenerate(P)
    return _beta_at(P.vector, as_omega(omega))


def beta_derivative(P: Pmf, omega: OmegaLike) -> float:
    """d beta / dw = -(E_U[p^2] - E_U[p]^2) under U = U*(w)."""
    require_nondegenerate(P)
    p = P.vector
    u, _ = tilted_vector(p, as_omega(omega))
    mean = float(np.dot(u, p))
    return -(float(np.dot(u, p * p)) - mean * mean)


def _bracket(p: np.ndarray, beta: float) -> Tuple[float, float]:
    """Find lo < hi with beta(lo) >= beta >= beta(hi)."""
    lo, hi = -1.0, 1.0
    for _ in range(Config.MAX_BRACKET_DOUBLINGS):
        if _beta_at(p, hi) <= beta:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NoConvergenceError(f"could not bracket beta={beta!r} from above (w up to {hi:g})")

    for _ in range(Config.MAX_BRACKET_DOUBLINGS):
        if _beta_at(p, lo) >= beta:
            break
        lo, hi = lo * 2.0, min(hi, lo)
    else:
        raise NoConvergenceError(f"could not bracket beta={beta!r} from below (w down to {lo:g})")
    return lo, hi


def solve_omega(P: Pmf, spec: Union[ConstraintSpec, float]) -> ImportanceCoefficient:
    """
    Importance coefficient whose tilt uses exactly the budget beta.

    Args:
        P: source distribution with at least two distinct positive probabilities
        spec: equality-mode constraint (a bare float is read as beta)

    Raises:
        BetaOutOfRangeError: beta not strictly inside (p_min, p_max)
        DegeneratePmfError: beta(w) is constant
        NoConvergenceError: bracketing or bisection failed
    """
    if not isinstance(spec, ConstraintSpec):
        spec = ConstraintSpec.equality(spec)
    if spec.mode is not Mode.EQUALITY:
        raise InputError("solve_omega needs an equality-mode constraint")

    rng = feasible_range(P)
    beta = spec.beta
    if not rng.contains_open(beta):
        raise BetaOutOfRangeError(
            f"beta={beta!r} is not reachable at finite omega", feasible=rng.as_tuple()
        )

    p = P.vector
    lo, hi = _bracket(p, beta)
    logger.debug(f"beta={beta!r} bracketed in [{lo}, {hi}]")

    def gap(w):
        return _beta_at(p, w) - beta

    if gap(lo) == 0.0:
        return ImportanceCoefficient(lo)
    if gap(hi) == 0.0:
        return ImportanceCoefficient(hi)

    root, info = bisect(
        gap, lo, hi,
        xtol=Config.OMEGA_XTOL,
        maxiter=Config.MAX_BISECTION_ITER,
        full_output=True,
        disp=False,
    )
    residual = abs(gap(root))
    if not info.converged or residual > Config.BETA_TOL:
        raise NoConvergenceError(
            f"bisection for beta={beta!r} stopped at w={root!r} "
            f"after {info.iterations} iterations (residual {residual:.3g})"
        )
    logger.info(f"Solved beta={beta!r} -> omega={root!r} in {info.iterations} iterations")
    return ImportanceCoefficient(root)
