import itertools
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.stats import multinomial

from config.settings import Config
from distributions.pmf import Pmf
from solver.constraint import ConstraintSpec
from utils.errors import InputError, TooLargeError

logger = logging.getLogger("oracle.types")


@dataclass(frozen=True)
class TypeEnumeration:
    n: int
    exact_probability: float
    num_types_in_E: int
    num_types: int


def compositions(n: int, k: int) -> np.ndarray:
    """Every k-part composition of n (stars and bars), one per row."""
    rows = []
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        edges = (-1,) + bars + (n + k - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(k)])
    return np.asarray(rows, dtype=np.int64)


def enumerate_types(P: Pmf, spec: Union[ConstraintSpec, float], n: int,
                    complement: bool = False) -> TypeEnumeration:
    """
    Exact P^n(E) for E = {types T : sum P(a)T(a) <= beta}.

    Sums the multinomial probability of every type class of length n inside E
    (or outside it when `complement` is set).
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"sequence length n must be a positive integer, got {n!r}")
    n = int(n)
    k = len(P)
    if k > Config.ENUM_MAX_ALPHABET or n > Config.ENUM_MAX_N:
        raise TooLargeError(
            f"type enumeration is capped at |X| <= {Config.ENUM_MAX_ALPHABET} and "
            f"n <= {Config.ENUM_MAX_N} (got |X|={k}, n={n})"
        )
    beta = spec.beta if isinstance(spec, ConstraintSpec) else float(spec)

    p = P.vector
    types = compositions(n, k)
    usage = types @ p / n
    inside = usage <= beta + Config.BETA_TOL
    selected = ~inside if complement else inside

    probs = multinomial(n, p).pmf(types)
    total = float(np.sum(probs[selected]))
    total = min(max(total, 0.0), 1.0)

    logger.info(
        f"Enumerated {len(types)} types for n={n}: {int(selected.sum())} selected, "
        f"probability {total:.6g}"
    )
    return TypeEnumeration(n=n, exact_probability=total,
                           num_types_in_E=int(selected.sum()), num_types=len(types))
