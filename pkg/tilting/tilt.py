"""
Exponential tilting of a source distribution by the importance coefficient.

    U*(j) = p_j e^{w(1-p_j)} / sum_i p_i e^{w(1-p_i)}

Everything is evaluated in the log domain: log weights ln p_j + w(1-p_j) are
normalised with logsumexp, so the max exponent is shifted out before any
exp() and |w| in the thousands is fine. The normaliser Z (the total message
importance, MIM) is reported in linear scale only when it fits in a float.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from config.settings import Config
from distributions.pmf import Pmf
from divergence.relative_entropy import kl_vectors
from utils.errors import ConsistencyError, DegeneratePmfError, InputError
from utils.validators import ensure_finite_scalar

logger = logging.getLogger("tilting")

_MAX_LOG = math.log(np.finfo(np.float64).max)


@dataclass(frozen=True)
class ImportanceCoefficient:
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "omega", ensure_finite_scalar(self.omega, "omega"))

    @classmethod
    def from_lambda(cls, lam: float) -> "ImportanceCoefficient":
        return cls(-lam)

    @property
    def lam(self) -> float:
        """Lagrange multiplier of the usage constraint."""
        return -self.omega


OmegaLike = Union[float, int, ImportanceCoefficient]


def as_omega(omega: OmegaLike) -> float:
    if isinstance(omega, ImportanceCoefficient):
        return omega.omega
    return ImportanceCoefficient(omega).omega


class LimitSide(str, Enum):
    PLUS = "+inf"
    MINUS = "-inf"

    @classmethod
    def parse(cls, value) -> "LimitSide":
        if isinstance(value, LimitSide):
            return value
        text = str(value).strip().lower()
        if text in ("+inf", "inf", "+", "plus", "+infinity", "infinity"):
            return cls.PLUS
        if text in ("-inf", "-", "minus", "-infinity"):
            return cls.MINUS
        raise InputError(f"limit side must be +inf or -inf, got {value!r}")

    @property
    def omega(self) -> float:
        return math.inf if self is LimitSide.PLUS else -math.inf


class MimTotal(NamedTuple):
    value: Optional[float]   # None when Z does not fit in a float
    log_value: float
    overflow: bool


class EventImportance(NamedTuple):
    labels: Tuple[str, ...]
    log_weights: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class TiltResult:
    utility: Pmf
    omega: float
    beta: float
    alpha: float
    mim_total: Optional[float]
    log_mim_total: float
    mim_overflow: bool
    kl_to_source: float

    @property
    def lam(self) -> float:
        return -self.omega

    @property
    def argmax_label(self) -> str:
        u = self.utility.vector
        return self.utility.labels[int(np.argmax(u))]

    def summary(self) -> dict:
        return {
            "labels": list(self.utility.labels),
            "utility": list(self.utility.probs),
            "omega": self.omega,
            "lambda": self.lam,
            "beta": self.beta,
            "alpha": self.alpha,
            "mim_total": self.mim_total,
            "log_mim_total": self.log_mim_total,
            "mim_overflow": self.mim_overflow,
            "kl_to_source": self.kl_to_source,
        }


class Renyi2(NamedTuple):
    beta0: float
    h2: float


# ---------------- shared log-domain path ---------------- #

def _require_support(P: Pmf) -> np.ndarray:
    p = P.vector
    if not np.any(p > 0.0):
        raise DegeneratePmfError("distribution has no positive atoms")
    return p


def log_weights(p: np.ndarray, omega: float) -> np.ndarray:
    """ln(p_j) + w(1 - p_j); -inf on zero atoms."""
    out = np.full(p.shape, -np.inf)
    pos = p > 0.0
    out[pos] = np.log(p[pos]) + omega * (1.0 - p[pos])
    return out


def _mim_from_log(log_z: float) -> MimTotal:
    if log_z > _MAX_LOG:
        return MimTotal(None, log_z, True)
    return MimTotal(math.exp(log_z), log_z, False)


def tilted_vector(p: np.ndarray, omega: float) -> Tuple[np.ndarray, float]:
    """Tilted probabilities and ln Z for a raw probability vector."""
    lw = log_weights(p, omega)
    log_z = float(logsumexp(lw))
    u = np.exp(lw - log_z)
    return u / u.sum(), log_z


# ---------------- operations ---------------- #

def tilt(P: Pmf, omega: OmegaLike) -> TiltResult:
    """Utility distribution U* for a finite importance coefficient."""
    omega = as_omega(omega)
    p = _require_support(P)
    u, log_z = tilted_vector(p, omega)

    beta = float(np.dot(p, u))
    beta = min(max(beta, P.p_min), P.p_max)
    mim = _mim_from_log(log_z)
    if mim.overflow:
        logger.warning(f"MIM total overflows at omega={omega!r}; reporting ln Z={log_z!r}")

    utility = Pmf._from_array(P.labels, u)
    return TiltResult(
        utility=utility,
        omega=omega,
        beta=beta,
        alpha=1.0 - beta,
        mim_total=mim.value,
        log_mim_total=log_z,
        mim_overflow=mim.overflow,
        kl_to_source=kl_vectors(u, p),
    )


def mim_total(P: Pmf, omega: OmegaLike) -> MimTotal:
    """Total message importance sum_i p_i e^{w(1-p_i)} (log value kept on overflow)."""
    omega = as_omega(omega)
    p = _require_support(P)
    log_z = float(logsumexp(log_weights(p, omega)))
    return _mim_from_log(log_z)


def event_importance(P: Pmf, omega: OmegaLike) -> EventImportance:
    """Per-symbol importance p_j e^{w(1-p_j)}; linear weights are inf past float range."""
    omega = as_omega(omega)
    p = _require_support(P)
    lw = log_weights(p, omega)
    with np.errstate(over='ignore'):
        weights = np.exp(lw)
    return EventImportance(P.labels, lw, weights)


def renyi2_identity(P: Pmf) -> Renyi2:
    """Neutral budget sum p_i^2 and the order-2 Renyi entropy -ln of it."""
    p = _require_support(P)
    beta0 = float(np.dot(p, p))
    h2 = -math.log(beta0)

    neutral = tilt(P, 0.0).beta
    if abs(neutral - beta0) > Config.SUM_TOL:
        raise ConsistencyError(f"beta(0)={neutral!r} differs from sum p^2={beta0!r}")
    return Renyi2(beta0, h2)


def limit_distribution(P: Pmf, side) -> Pmf:
    """
    Limit of U* as w -> +inf (mass on the smallest positive probability) or
    w -> -inf (mass on the largest). Ties split the mass evenly.
    """
    side = LimitSide.parse(side)
    p = _require_support(P)
    target = P.p_min if side is LimitSide.PLUS else P.p_max
    mask = (p == target) & (p > 0.0)
    u = mask.astype(np.float64) / np.count_nonzero(mask)
    return Pmf._from_array(P.labels, u)


def limit_result(P: Pmf, side) -> TiltResult:
    """TiltResult at w = +/-inf; Z is not representable so only its log is kept."""
    side = LimitSide.parse(side)
    p = P.vector
    U = limit_distribution(P, side)
    beta = P.p_min if side is LimitSide.PLUS else P.p_max
    return TiltResult(
        utility=U,
        omega=side.omega,
        beta=beta,
        alpha=1.0 - beta,
        mim_total=None,
        log_mim_total=side.omega,
        mim_overflow=True,
        kl_to_source=kl_vectors(U.vector, p),
    )


def principal_omega(P: Pmf, label: str) -> float:
    """Coefficient 1/p_j at which symbol j is expected to dominate the utility."""
    if label not in P.labels:
        raise InputError(f"unknown label {label!r}")
    pj = P.prob(label)
    if pj <= 0.0:
        raise InputError(f"label {label!r} has zero probability")
    return 1.0 / pj
