import dataclasses
import logging
from typing import Union

from config.settings import Config
from distributions.pmf import Pmf
from solver.constraint import ConstraintSpec, Mode
from solver.equality import solve_omega
from tilting.tilt import LimitSide, TiltResult, limit_result, tilt
from utils.errors import InfeasibleBudgetError

logger = logging.getLogger("solver.problem")


def is_constraint_active(P: Pmf, beta: float) -> bool:
    """The budget binds iff it is below the neutral budget sum p_i^2."""
    return beta < P.collision_probability


def solve_problem_p(P: Pmf, spec: Union[ConstraintSpec, float]) -> TiltResult:
    """
    Minimise D(U || P) subject to sum P(a)U(a) <= beta.

    If beta >= sum p_i^2 the constraint is inactive and U* = P (w = 0, D = 0).
    Otherwise the minimiser sits on the boundary sum P(a)U(a) = beta and is the
    tilt at the w > 0 solving it; beta == p_min gives the w = +inf limit.

    Raises:
        InfeasibleBudgetError: beta < p_min, no distribution meets the budget
    """
    if not isinstance(spec, ConstraintSpec):
        spec = ConstraintSpec.inequality(spec)
    beta = spec.beta
    p_min = P.p_min

    if beta < p_min - Config.BETA_TOL:
        raise InfeasibleBudgetError(
            f"budget beta={beta!r} is below p_min={p_min!r}", feasible=(p_min, 1.0)
        )

    if not is_constraint_active(P, beta):
        logger.info(f"Constraint inactive for beta={beta!r} (sum p^2={P.collision_probability!r})")
        neutral = tilt(P, 0.0)
        return dataclasses.replace(
            neutral,
            utility=P,
            beta=P.collision_probability,
            alpha=1.0 - P.collision_probability,
            mim_total=1.0,
            log_mim_total=0.0,
            kl_to_source=0.0,
        )

    if beta <= p_min + Config.BETA_TOL:
        logger.info(f"Budget at p_min={p_min!r}; returning the omega=+inf limit")
        return limit_result(P, LimitSide.PLUS)

    omega = solve_omega(P, spec.with_mode(Mode.EQUALITY))
    return tilt(P, omega)
