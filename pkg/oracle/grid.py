"""
Brute-force constrained KL minimiser on the simplex lattice.

Every point c/m with c a composition of m = 1/step into |X| parts is checked.
KL is a separable sum, so per-symbol tables of (c/m) ln((c/m)/p_a) for
c = 0..m turn each lattice point into |X| table lookups. The scan is split by
the first coordinate; partitions are independent and reduced in order, which
keeps the lexicographic tie-break when they run on worker threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import rel_entr

from config.settings import Config
from distributions.pmf import Pmf
from solver.constraint import ConstraintSpec, Mode
from utils.errors import (
    AlphabetTooLargeError,
    InvalidGridStepError,
    NoFeasiblePointError,
    TooLargeError,
)

logger = logging.getLogger("oracle.grid")

GRID_MAX_POINTS = 2.5e8


@dataclass(frozen=True)
class GridMinimizerResult:
    argmin: Pmf
    kl_value: float
    grid_step: float
    feasible_points_checked: int
    method: str = "grid"
    iterations: int = 0


class _ChunkBest(NamedTuple):
    kl: float
    counts: Optional[np.ndarray]
    feasible: int


def lattice_resolution(grid_step: float) -> int:
    """Number of lattice divisions m for a step in [GRID_STEP_MIN, GRID_STEP_MAX]."""
    if not (Config.GRID_STEP_MIN <= grid_step <= Config.GRID_STEP_MAX):
        raise InvalidGridStepError(
            f"grid step {grid_step!r} outside [{Config.GRID_STEP_MIN}, {Config.GRID_STEP_MAX}]"
        )
    return max(1, int(round(1.0 / grid_step)))


def _tail(r: int, width: int):
    """All compositions of r into `width` (2 or 3) parts, lexicographic."""
    if width == 2:
        a = np.arange(r + 1)
        return [a, r - a]
    i, j = np.triu_indices(r + 1)
    return [i, j - i, r - j]


def _scan_chunk(first: Optional[int], tables: np.ndarray, p: np.ndarray, m: int,
                spec: ConstraintSpec, band: float) -> _ChunkBest:
    k = p.size
    if first is None:
        cols = _tail(m, k)
    else:
        rest = _tail(m - first, k - 1)
        cols = [np.full(rest[0].shape, first)] + rest

    counts = np.stack(cols, axis=1)
    kl = np.zeros(counts.shape[0])
    for a in range(k):
        kl += tables[a][counts[:, a]]
    usage = counts @ p / m

    if spec.mode is Mode.EQUALITY:
        feasible = np.abs(usage - spec.beta) <= band
    else:
        feasible = usage <= spec.beta + Config.BETA_TOL

    n_feasible = int(np.count_nonzero(feasible))
    if n_feasible == 0:
        return _ChunkBest(math.inf, None, 0)
    masked = np.where(feasible, kl, np.inf)
    idx = int(np.argmin(masked))   # first minimum: lexicographically smallest
    return _ChunkBest(float(masked[idx]), counts[idx].copy(), n_feasible)


def grid_minimize_kl(P: Pmf, spec: ConstraintSpec, grid_step: Optional[float] = None) -> GridMinimizerResult:
    """
    Exhaustive lattice search for argmin D(U || P) under the budget.

    Equality mode accepts points within half a step of the budget surface;
    inequality mode accepts sum P(a)U(a) <= beta.

    Raises:
        AlphabetTooLargeError: more than GRID_MAX_ALPHABET symbols
        NoFeasiblePointError: no lattice point meets the budget
    """
    grid_step = Config.GRID_STEP_DEFAULT if grid_step is None else float(grid_step)
    k = len(P)
    if k > Config.GRID_MAX_ALPHABET:
        raise AlphabetTooLargeError(
            f"grid oracle supports at most {Config.GRID_MAX_ALPHABET} symbols, got {k}"
        )
    m = lattice_resolution(grid_step)
    n_points = math.comb(m + k - 1, k - 1)
    if n_points > GRID_MAX_POINTS:
        raise TooLargeError(f"{n_points} lattice points at step {grid_step}; use a coarser step")

    p = P.vector
    levels = np.arange(m + 1) / m
    tables = np.stack([rel_entr(levels, p[a]) for a in range(k)])
    step = 1.0 / m
    band = step / 2.0

    logger.info("=" * 60)
    logger.info(f" GRID SCAN: |X|={k}, step={step:g}, {n_points} points, mode={spec.mode.value}")
    logger.info("=" * 60)

    if k == 2:
        chunks = [_scan_chunk(None, tables, p, m, spec, band)]
    else:
        def scan(first):
            return _scan_chunk(first, tables, p, m, spec, band)

        firsts = range(m + 1)
        if Config.MAX_WORKERS > 1:
            with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as pool:
                chunks = list(pool.map(scan, firsts))
        else:
            chunks = [scan(first) for first in firsts]

    best_kl, best_counts, checked = math.inf, None, 0
    for chunk in chunks:
        checked += chunk.feasible
        if chunk.counts is not None and chunk.kl < best_kl:
            best_kl, best_counts = chunk.kl, chunk.counts

    if best_counts is None:
        raise NoFeasiblePointError(
            f"no lattice point with step {step:g} meets beta={spec.beta!r} ({spec.mode.value})"
        )

    argmin = Pmf._from_array(P.labels, best_counts / m)
    logger.info(f"Grid argmin {list(argmin.probs)} with KL={best_kl:.6g} ({checked} feasible points)")
    return GridMinimizerResult(argmin, best_kl, step, checked)
