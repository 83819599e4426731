"""
Local refinement of a lattice minimiser by multiplicative-weights descent.

Each iteration reweights by the exponentiated KL gradient,

    v  propto  u * exp(-eta * (ln(u/p) + 1))  =  u^(1-eta) p^eta,

and, when v breaks the budget, pulls it back onto sum p_a v_a = beta by
mixing geometrically toward the feasibility direction: v * exp(theta * p),
with the scalar theta found by a bracketed root search. Only the gradient and
the constraint vector are used, never the closed-form solution.
"""
import logging
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from config.settings import Config
from distributions.pmf import Pmf
from divergence.relative_entropy import kl_vectors
from oracle.grid import GridMinimizerResult
from solver.constraint import ConstraintSpec, Mode
from utils.errors import InfeasibleSeedError, NoConvergenceError

logger = logging.getLogger("oracle.refine")


def _normalize(log_u: np.ndarray) -> np.ndarray:
    return log_u - logsumexp(log_u)


def _usage(log_u: np.ndarray, p: np.ndarray) -> float:
    return float(np.dot(p, np.exp(log_u)))


def _project(log_v: np.ndarray, p: np.ndarray, beta: float) -> np.ndarray:
    """Geometric mixing v * e^(theta p), renormalised, so that sum p_a u_a = beta."""
    def gap(theta):
        return _usage(_normalize(log_v + theta * p), p) - beta

    lo, hi = -1.0, 1.0
    for _ in range(Config.MAX_BRACKET_DOUBLINGS):
        if gap(hi) >= 0.0:
            break
        lo, hi = hi, hi * 2.0
    for _ in range(Config.MAX_BRACKET_DOUBLINGS):
        if gap(lo) <= 0.0:
            break
        lo, hi = lo * 2.0, min(hi, lo)
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo > 0.0 or g_hi < 0.0:
        raise NoConvergenceError(f"could not bracket the projection onto beta={beta!r}")
    if g_lo == 0.0:
        return _normalize(log_v + lo * p)
    if g_hi == 0.0:
        return _normalize(log_v + hi * p)

    theta = brentq(gap, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                   maxiter=Config.MAX_BISECTION_ITER)
    return _normalize(log_v + theta * p)


def refine_minimize_kl(P: Pmf, spec: ConstraintSpec, seed: Pmf,
                       slack: float = 0.0) -> GridMinimizerResult:
    """
    Polish a feasible seed (typically the grid argmin) toward the exact minimiser.

    Args:
        P: source distribution
        spec: budget and mode
        seed: starting distribution on P's labels
        slack: tolerated constraint violation of the seed (a grid step in
            equality mode); iterates themselves meet the budget exactly

    Returns:
        GridMinimizerResult with method="refine"; never worse than an exactly
        feasible seed
    """
    P.require_same_labels(seed)
    p, s = P.vector, seed.vector
    tol = max(slack, Config.BETA_TOL)
    if not spec.satisfied_by(p, s, tol):
        raise InfeasibleSeedError(
            f"seed usage {float(np.dot(p, s))!r} violates beta={spec.beta!r} ({spec.mode.value})"
        )

    support = p > 0.0
    seed_exact = spec.satisfied_by(p, s, Config.BETA_TOL) and not np.any(s[~support] > 0.0)
    seed_kl = kl_vectors(s, p) if seed_exact else math.inf

    ps = p[support]
    beta = spec.beta
    # At p_min (or p_max in equality mode) the feasible set is a single limit point
    pinned = beta <= ps.min() + Config.BETA_TOL or (
        spec.mode is Mode.EQUALITY and beta >= ps.max() - Config.BETA_TOL
    )

    eps = Config.REFINE_SMOOTHING
    with np.errstate(divide='ignore'):
        log_u = _normalize(np.log((1.0 - eps) * s[support] + eps * ps))
    log_p = np.log(ps)

    def needs_projection(log_u):
        value = _usage(log_u, ps)
        if spec.mode is Mode.EQUALITY:
            return abs(value - beta) > Config.BETA_TOL
        return value > beta + Config.BETA_TOL

    if pinned:
        logger.info("Budget sits on the edge of the usage range; keeping the seed")
        return GridMinimizerResult(seed, kl_vectors(s, p), tol, 1, "refine", 0)

    if needs_projection(log_u):
        log_u = _project(log_u, ps, beta)

    eta = Config.REFINE_STEP
    current = kl_vectors(np.exp(log_u), ps)
    iterations = 0
    for iterations in range(1, Config.REFINE_MAX_ITER + 1):
        log_v = _normalize((1.0 - eta) * log_u + eta * log_p)
        if needs_projection(log_v):
            log_v = _project(log_v, ps, beta)
        updated = kl_vectors(np.exp(log_v), ps)
        improvement = current - updated
        log_u, current = log_v, updated
        if abs(improvement) < Config.REFINE_TOL:
            break
    else:
        logger.warning(f"Refinement hit {Config.REFINE_MAX_ITER} iterations")

    logger.info(f"Refinement finished after {iterations} iterations, KL={current:.12g}")

    if seed_kl <= current:
        return GridMinimizerResult(seed, seed_kl, tol, iterations + 1, "refine", iterations)

    u = np.zeros_like(p)
    u[support] = np.exp(log_u)
    u /= u.sum()
    argmin = Pmf._from_array(P.labels, u)
    return GridMinimizerResult(argmin, kl_vectors(u, p), tol, iterations + 1, "refine", iterations)
