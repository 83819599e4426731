"""
Checks the closed-form utility distribution against the independent oracles.

Phase 1 (oracle): lattice scan + multiplicative-weights refinement vs. the
closed-form minimiser. Phase 2 (large deviations, |X| <= 3): exact type
enumeration vs. the method-of-types bound. Phase 3 (properties): seeded
random checks that need no reference numbers.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.settings import Config
from distributions.pmf import Pmf
from divergence.relative_entropy import kl_vectors
from divergence.sanov import sanov_bound
from oracle.grid import grid_minimize_kl
from oracle.refine import refine_minimize_kl
from oracle.type_classes import enumerate_types
from solver.constraint import ConstraintSpec, distinct_support
from solver.equality import beta_derivative, beta_of_omega
from solver.problem import solve_problem_p
from tilting.tilt import tilted_vector
from utils.errors import AlphabetTooLargeError, TooLargeError

logger = logging.getLogger("pipeline.verifier")


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name}: measured {self.measured:.6g} (threshold {self.threshold:.3g})"
        return f"{text} {self.detail}".rstrip()


@dataclass
class VerificationReport:
    checks: List[CheckOutcome] = field(default_factory=list)

    def add(self, name: str, measured: float, threshold: float, passed: Optional[bool] = None,
            detail: str = "") -> CheckOutcome:
        if passed is None:
            passed = bool(measured <= threshold)
        outcome = CheckOutcome(name, passed, float(measured), float(threshold), detail)
        self.checks.append(outcome)
        (logger.info if passed else logger.warning)(outcome.line())
        return outcome

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> List[str]:
        return [c.line() for c in self.checks]


class ClosedFormVerifier:
    """Runs every verification phase for one distribution and budget."""

    def __init__(self, P: Pmf, beta: float, grid_step: Optional[float] = None,
                 n: Optional[int] = None, seed: Optional[int] = None):
        self.P = P
        self.spec = ConstraintSpec.inequality(beta)
        self.grid_step = Config.GRID_STEP_DEFAULT if grid_step is None else grid_step
        self.n = Config.VERIFY_N if n is None else n
        self.rng = np.random.default_rng(Config.RANDOM_SEED if seed is None else seed)

    def check_caps(self):
        k = len(self.P)
        if k > Config.GRID_MAX_ALPHABET:
            raise AlphabetTooLargeError(
                f"verification supports at most {Config.GRID_MAX_ALPHABET} symbols, got {k}"
            )
        if k <= Config.ENUM_MAX_ALPHABET and self.n > Config.ENUM_MAX_N:
            raise TooLargeError(f"type enumeration is capped at n <= {Config.ENUM_MAX_N}, got {self.n}")

    def run(self, properties: bool = True) -> VerificationReport:
        self.check_caps()
        report = VerificationReport()
        self.run_oracle_phase(report)
        if len(self.P) <= Config.ENUM_MAX_ALPHABET:
            self.run_sanov_phase(report)
        if properties:
            self.run_property_phase(report)
        logger.info(f"Verification complete: {sum(c.passed for c in report.checks)}/"
                    f"{len(report.checks)} checks passed")
        return report

    # --- PHASE 1: ORACLE AGREEMENT ---
    def run_oracle_phase(self, report: VerificationReport):
        logger.info("=" * 60)
        logger.info(f" PHASE 1: CLOSED FORM vs ORACLE (beta={self.spec.beta!r})")
        logger.info("=" * 60)
        p = self.P.vector

        closed = solve_problem_p(self.P, self.spec)
        u_closed = closed.utility.vector
        report.add("closed form meets budget", float(np.dot(p, u_closed)) - self.spec.beta,
                   Config.BETA_TOL)

        grid = grid_minimize_kl(self.P, self.spec, self.grid_step)
        grid_gap = float(np.max(np.abs(grid.argmin.vector - u_closed)))
        report.add("grid argmin near closed form (L-inf)", grid_gap, 2.0 * grid.grid_step,
                   detail=f"[{grid.feasible_points_checked} feasible points]")
        report.add("closed form no worse than grid (KL)", closed.kl_to_source - grid.kl_value,
                   Config.BETA_TOL)

        refined = refine_minimize_kl(self.P, self.spec, grid.argmin)
        refined_gap = float(np.max(np.abs(refined.argmin.vector - u_closed)))
        report.add("refined argmin matches closed form (L-inf)", refined_gap,
                   Config.VERIFY_REFINED_LINF, detail=f"[{refined.iterations} iterations]")
        report.add("refined KL matches closed form", abs(refined.kl_value - closed.kl_to_source),
                   Config.VERIFY_KL_GAP)

    # --- PHASE 2: LARGE DEVIATIONS ---
    def run_sanov_phase(self, report: VerificationReport):
        logger.info("=" * 60)
        logger.info(f" PHASE 2: EXACT TYPE ENUMERATION vs BOUND (n={self.n})")
        logger.info("=" * 60)
        bound = sanov_bound(self.P, self.spec, self.n)
        inside = enumerate_types(self.P, self.spec, self.n)
        outside = enumerate_types(self.P, self.spec, self.n, complement=True)

        report.add("exact probability within bound", inside.exact_probability - bound.bound, 0.0,
                   detail=f"[exact {inside.exact_probability:.6g} <= bound {bound.bound:.6g}]")
        report.add("event and complement sum to 1",
                   abs(inside.exact_probability + outside.exact_probability - 1.0), Config.SUM_TOL)

    # --- PHASE 3: PROPERTIES ---
    def run_property_phase(self, report: VerificationReport):
        logger.info("=" * 60)
        logger.info(" PHASE 3: PROPERTY CHECKS")
        logger.info("=" * 60)
        k = len(self.P)
        p = self.P.vector

        pairs = self.rng.dirichlet(np.ones(k), size=(Config.VERIFY_PROPERTY_PAIRS, 2))
        kls = [kl_vectors(u, q) for u, q in pairs]
        report.add("KL nonnegative on random pairs", -min(kls), 0.0,
                   detail=f"[{len(kls)} pairs]")

        omegas = np.linspace(-50.0, 50.0, 201)
        sums = [abs(tilted_vector(p, w)[0].sum() - 1.0) for w in omegas]
        report.add("tilt output normalized", max(sums), Config.SUM_TOL)

        distinct = distinct_support(self.P)
        if distinct.size < 2:
            logger.info("Degenerate distribution: skipping monotonicity checks")
            return

        violations = 0
        for w in (0.5, 1.0, 5.0, 10.0):
            u, _ = tilted_vector(p, w)
            pos = p > 0.0
            order = np.argsort(p[pos], kind="stable")
            ratios = (u[pos] / p[pos])[order]
            ps = p[pos][order]
            for i in range(len(ps) - 1):
                if ps[i + 1] > ps[i] and not ratios[i + 1] < ratios[i]:
                    violations += 1
        report.add("U*/P decreasing in P for omega > 0", violations, 0)

        # Past |w| ~ 30 the tail mass can drop below float resolution
        betas = [beta_of_omega(self.P, w) for w in omegas[np.abs(omegas) <= 30.0]]
        increases = sum(1 for a, b in zip(betas, betas[1:]) if not b < a)
        report.add("beta strictly decreasing in omega", increases, 0)

        worst = 0.0
        h = 1e-5
        for w in (-5.0, -1.0, 0.0, 1.0, 5.0):
            numeric = (beta_of_omega(self.P, w + h) - beta_of_omega(self.P, w - h)) / (2 * h)
            analytic = beta_derivative(self.P, w)
            worst = max(worst, abs(numeric - analytic) / max(abs(analytic), 1e-6))
        report.add("d beta/d omega = -Var (finite differences, relative)", worst, 1e-5)
