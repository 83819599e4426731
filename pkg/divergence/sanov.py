"""
Large-deviation bound for the usage event.

For X_1..X_n i.i.d. ~ P, the event is that the empirical type T meets the
budget, sum P(a)T(a) <= beta. The method-of-types bound is

    P^n(E) <= (n+1)^|X| 2^{-n D(U*||P)}

with U* the constrained KL minimiser. D is computed in nats and converted to
bits here only; everything is kept as log2 until the final power.
"""
import logging
import math
from dataclasses import dataclass
from typing import Union

from distributions.pmf import Pmf
from solver.constraint import ConstraintSpec, Mode
from solver.problem import solve_problem_p
from utils.errors import InputError

logger = logging.getLogger("divergence.sanov")

_MAX_LOG2 = math.log2(1.7976931348623157e308)


@dataclass(frozen=True)
class SanovBound:
    n: int
    alphabet_size: int
    exponent: float      # n D(U*||P) in bits
    log2_bound: float
    bound: float         # may exceed 1; inf only past float range

    @property
    def is_trivial(self) -> bool:
        return self.bound >= 1.0


def sanov_bound(P: Pmf, spec: Union[ConstraintSpec, float], n: int) -> SanovBound:
    """Upper bound on the probability that a length-n type meets the budget."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"sequence length n must be a positive integer, got {n!r}")
    n = int(n)
    if not isinstance(spec, ConstraintSpec):
        spec = ConstraintSpec.inequality(spec)
    # The event is defined by the inequality regardless of the requested mode
    result = solve_problem_p(P, spec.with_mode(Mode.INEQUALITY))

    k = len(P)
    exponent = n * result.kl_to_source / math.log(2.0)
    log2_bound = k * math.log2(n + 1) - exponent
    bound = math.inf if log2_bound > _MAX_LOG2 else 2.0 ** log2_bound

    logger.info(
        f"Sanov bound n={n} |X|={k} D={result.kl_to_source:.6g} nats -> bound={bound:.6g}"
    )
    return SanovBound(n=n, alphabet_size=k, exponent=exponent, log2_bound=log2_bound, bound=bound)
