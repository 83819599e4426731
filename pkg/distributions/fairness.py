import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from config.settings import Config
from distributions.pmf import Pmf, RawUsage
from utils.errors import LabelMismatchError, SupportMismatchError

logger = logging.getLogger("distributions.fairness")


class UsageClass(str, Enum):
    OVERUSED = "overused"
    FAIR = "fair"
    UNDERUSED = "underused"


@dataclass(frozen=True)
class FairnessReport:
    labels: Tuple[str, ...]
    ratios: Tuple[float, ...]
    classification: Tuple[UsageClass, ...]

    def by_label(self) -> Dict[str, Tuple[float, UsageClass]]:
        return {
            label: (ratio, cls)
            for label, ratio, cls in zip(self.labels, self.ratios, self.classification)
        }

    @property
    def all_fair(self) -> bool:
        return all(c is UsageClass.FAIR for c in self.classification)


class Budget(NamedTuple):
    beta: float
    alpha: float


def _classify(ratio: float, tol: float) -> UsageClass:
    if ratio > 1.0 + tol:
        return UsageClass.OVERUSED
    if ratio < 1.0 - tol:
        return UsageClass.UNDERUSED
    return UsageClass.FAIR


def fairness(P: Pmf, U: Pmf, tol: Optional[float] = None) -> FairnessReport:
    """
    Per-symbol usage ratio U(a)/P(a) and its class.

    Atoms with P(a) = U(a) = 0 get ratio 1 (fair). Mass of U on an atom
    with P(a) = 0 has no defined ratio and is rejected.
    """
    tol = Config.FAIRNESS_TOL if tol is None else tol
    P.require_same_labels(U)
    p, u = P.vector, U.vector

    orphan = (p == 0.0) & (u > 0.0)
    if np.any(orphan):
        bad = [P.labels[i] for i in np.flatnonzero(orphan)]
        raise SupportMismatchError(f"U puts mass where P is zero: {bad}")

    ratios = np.ones_like(p)
    pos = p > 0.0
    ratios[pos] = u[pos] / p[pos]

    classes = tuple(_classify(float(r), tol) for r in ratios)
    return FairnessReport(P.labels, tuple(float(r) for r in ratios), classes)


def beta_from_raw(P: Pmf, raw: RawUsage) -> Budget:
    """Observed budget beta = sum P(a) U(a) for normalized usage counts, plus alpha = 1 - beta."""
    if tuple(P.labels) != tuple(raw.labels):
        raise LabelMismatchError(
            f"usage labels {list(raw.labels)} do not match distribution labels {list(P.labels)}"
        )
    p, u = P.vector, raw.normalized
    if np.any((p == 0.0) & (u > 0.0)):
        raise SupportMismatchError("usage counts on symbols with zero probability")

    beta = float(np.dot(p, u))
    # Rounding can push a point mass a hair outside [p_min, p_max]
    beta = min(max(beta, P.p_min), P.p_max)
    logger.debug(f"beta from raw usage: {beta!r}")
    return Budget(beta, 1.0 - beta)
