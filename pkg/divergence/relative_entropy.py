import logging

import numpy as np
from scipy.special import rel_entr

from distributions.pmf import Pmf
from utils.errors import SupportViolationError

logger = logging.getLogger("divergence.kl")


def kl_vectors(u: np.ndarray, p: np.ndarray) -> float:
    """D(u || p) in nats for aligned vectors, 0 ln 0 = 0. Caller checks support."""
    terms = rel_entr(u, p)
    value = float(np.sum(terms))
    # Cancellation can leave -1e-17 for u == p
    return max(value, 0.0)


def kl(U: Pmf, P: Pmf) -> float:
    """
    Relative entropy D(U || P) = sum U(a) ln(U(a)/P(a)) in nats.

    Raises:
        LabelMismatchError: label sets differ
        SupportViolationError: U(a) > 0 where P(a) = 0
    """
    P.require_same_labels(U)
    u, p = U.vector, P.vector
    violating = (u > 0.0) & (p == 0.0)
    if np.any(violating):
        bad = [U.labels[i] for i in np.flatnonzero(violating)]
        raise SupportViolationError(f"U is not absolutely continuous w.r.t. P on {bad}")
    return kl_vectors(u, p)
