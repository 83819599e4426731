"""Validated finite distributions and raw usage counts.

A `Pmf` is immutable: labels and probabilities are stored as tuples and the
numpy view handed out by `vector` is a read-only copy. Label order drives every
vector alignment downstream (tilting, CSV columns).
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import Config
from utils.errors import (
    AllZeroCountsError,
    InputError,
    LabelMismatchError,
    NegativeProbError,
    NotNormalizedError,
    TooFewAtomsError,
)
from utils.validators import as_finite_array, ensure_finite_scalar, validate_labels

logger = logging.getLogger("distributions.pmf")


@dataclass(frozen=True)
class Pmf:
    labels: Tuple[str, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.probs):
            raise InputError(
                f"labels ({len(self.labels)}) and probs ({len(self.probs)}) differ in length"
            )

    @classmethod
    def _from_array(cls, labels: Sequence[str], arr: np.ndarray) -> "Pmf":
        # Internal: caller guarantees arr is a valid pmf
        return cls(tuple(labels), tuple(float(x) for x in arr))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def vector(self) -> np.ndarray:
        arr = np.array(self.probs, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @property
    def support_mask(self) -> np.ndarray:
        return self.vector > 0.0

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.support_mask))

    @property
    def p_min(self) -> float:
        """Smallest positive probability (zero atoms are excluded)."""
        p = self.vector
        return float(p[p > 0.0].min())

    @property
    def p_max(self) -> float:
        return float(self.vector.max())

    @property
    def collision_probability(self) -> float:
        """sum p_i^2, the neutral budget."""
        p = self.vector
        return float(np.dot(p, p))

    def prob(self, label: str) -> float:
        return self.probs[self.labels.index(label)]

    def require_same_labels(self, other: "Pmf"):
        if self.labels != other.labels:
            raise LabelMismatchError(
                f"label sets differ: {list(self.labels)} vs {list(other.labels)}"
            )

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "probs": list(self.probs)}


@dataclass(frozen=True)
class RawUsage:
    """Unnormalised usage counts U'(a) with an optional raw budget beta'."""
    labels: Tuple[str, ...]
    counts: Tuple[float, ...]
    budget_raw: Optional[float] = field(default=None)

    @property
    def total(self) -> float:
        return float(sum(self.counts))

    @property
    def normalized(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.float64) / self.total

    @property
    def budget(self) -> Optional[float]:
        """Scaled budget beta = beta' / sum U'(a), if a raw budget was given."""
        if self.budget_raw is None:
            return None
        return self.budget_raw / self.total


def pmf_from_probs(labels: Sequence, probs: Sequence, renormalize: bool = False) -> Pmf:
    """
    Build a validated Pmf.

    Args:
        labels: symbol identifiers, unique
        probs: probabilities aligned with labels
        renormalize: divide by the total instead of rejecting a sum far from 1

    Returns:
        Pmf whose probabilities sum to 1 within Config.SUM_TOL
    """
    labels = list(labels)
    arr = as_finite_array(probs, "probs")
    if len(labels) != arr.size:
        raise InputError(f"labels ({len(labels)}) and probs ({arr.size}) differ in length")
    if arr.size < Config.MIN_ATOMS:
        raise TooFewAtomsError(f"need at least {Config.MIN_ATOMS} atoms, got {arr.size}")
    cleaned = validate_labels(labels)

    if np.any(arr < 0.0):
        bad = [cleaned[i] for i in np.flatnonzero(arr < 0.0)]
        raise NegativeProbError(f"negative probabilities for labels {bad}")

    total = float(arr.sum())
    if total <= 0.0:
        raise NotNormalizedError("probabilities sum to zero")
    if renormalize:
        if abs(total - 1.0) > Config.NORMALIZATION_TOL:
            logger.info(f"Renormalizing probabilities (sum was {total!r})")
    elif abs(total - 1.0) > Config.NORMALIZATION_TOL:
        raise NotNormalizedError(
            f"probabilities sum to {total!r}, not 1 (tolerance {Config.NORMALIZATION_TOL})"
        )
    # Within tolerance the division only removes float noise
    arr = arr / total

    if abs(float(arr.sum()) - 1.0) > Config.SUM_TOL:
        raise NotNormalizedError(f"normalized probabilities sum to {float(arr.sum())!r}")
    return Pmf._from_array(cleaned, arr)


def pmf_from_counts(labels: Sequence, counts: Sequence,
                    budget_raw: Optional[float] = None) -> Tuple[Pmf, RawUsage]:
    """Normalize usage counts U'(a) into U(a) = U'(a) / sum U'."""
    labels = list(labels)
    arr = as_finite_array(counts, "counts")
    if len(labels) != arr.size:
        raise InputError(f"labels ({len(labels)}) and counts ({arr.size}) differ in length")
    if np.any(arr < 0.0):
        raise NegativeProbError("counts must be nonnegative")
    if arr.sum() <= 0.0:
        raise AllZeroCountsError("all counts are zero")
    if budget_raw is not None:
        budget_raw = ensure_finite_scalar(budget_raw, "budget_raw")
        if budget_raw < 0.0:
            raise InputError("raw budget must be nonnegative")

    pmf = pmf_from_probs(labels, arr / arr.sum())
    raw = RawUsage(pmf.labels, tuple(float(c) for c in arr), budget_raw)
    return pmf, raw


def uniform_pmf(labels: Sequence) -> Pmf:
    labels = list(labels)
    return pmf_from_probs(labels, np.full(len(labels), 1.0 / len(labels)))
