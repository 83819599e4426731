"""Brute-force lattice search and its refinement against the closed form."""
import numpy as np
import pytest

from distributions.pmf import pmf_from_probs
from oracle.grid import grid_minimize_kl, lattice_resolution
from oracle.refine import refine_minimize_kl
from solver.constraint import ConstraintSpec
from solver.problem import solve_problem_p
from utils.errors import (
    AlphabetTooLargeError,
    DomainError,
    InfeasibleSeedError,
    InvalidGridStepError,
    NoFeasiblePointError,
)


class TestGrid:

    def test_binary_lattice_hits_exact_minimiser(self, binary):
        result = grid_minimize_kl(binary, ConstraintSpec.inequality(0.5), 1e-2)
        np.testing.assert_allclose(result.argmin.vector, [0.5, 0.5], atol=1e-12)
        assert result.method == "grid"
        assert result.feasible_points_checked == 51

    def test_p1_within_two_steps(self, p1):
        spec = ConstraintSpec.inequality(0.2)
        result = grid_minimize_kl(p1, spec, 1e-2)
        closed = solve_problem_p(p1, spec)
        assert np.max(np.abs(result.argmin.vector - closed.utility.vector)) <= 2e-2
        assert closed.kl_to_source <= result.kl_value + 1e-12

    def test_inactive_budget_finds_source(self, p1):
        result = grid_minimize_kl(p1, ConstraintSpec.inequality(0.35), 1e-2)
        np.testing.assert_allclose(result.argmin.vector, p1.vector, atol=1e-12)

    def test_equality_band(self, p1):
        result = grid_minimize_kl(p1, ConstraintSpec.equality(0.35), 5e-2)
        usage = float(np.dot(p1.vector, result.argmin.vector))
        assert abs(usage - 0.35) <= 2.5e-2

    def test_caps(self):
        five = pmf_from_probs(list("abcde"), [0.2] * 5)
        with pytest.raises(AlphabetTooLargeError):
            grid_minimize_kl(five, ConstraintSpec.inequality(0.2))
        with pytest.raises(InvalidGridStepError):
            lattice_resolution(0.5)

    @pytest.mark.parametrize("step", [0.5, 5e-5, float("nan")])
    def test_grid_step_outside_bounds_is_a_domain_error(self, p1, step):
        with pytest.raises(DomainError):
            grid_minimize_kl(p1, ConstraintSpec.inequality(0.2), step)

    def test_no_feasible_point(self, p1):
        with pytest.raises(NoFeasiblePointError):
            grid_minimize_kl(p1, ConstraintSpec.inequality(0.05), 1e-1)


class TestRefine:

    def test_refines_p1_to_closed_form(self, p1):
        spec = ConstraintSpec.inequality(0.2)
        seed = grid_minimize_kl(p1, spec, 1e-2).argmin
        refined = refine_minimize_kl(p1, spec, seed)
        closed = solve_problem_p(p1, spec)
        assert refined.method == "refine"
        assert np.max(np.abs(refined.argmin.vector - closed.utility.vector)) <= 1e-4
        assert refined.kl_value == pytest.approx(closed.kl_to_source, abs=1e-8)

    def test_never_worse_than_feasible_seed(self, p1):
        spec = ConstraintSpec.inequality(0.25)
        seed = grid_minimize_kl(p1, spec, 5e-2)
        refined = refine_minimize_kl(p1, spec, seed.argmin)
        assert refined.kl_value <= seed.kl_value + 1e-12

    def test_infeasible_seed(self, p1):
        with pytest.raises(InfeasibleSeedError):
            refine_minimize_kl(p1, ConstraintSpec.inequality(0.2), p1)

    def test_random_pairs_agree_with_closed_form(self):
        rng = np.random.default_rng(20180101)
        for _ in range(20):
            k = int(rng.integers(2, 5))
            p = rng.dirichlet(np.full(k, 2.0))
            P = pmf_from_probs([f"s{i}" for i in range(k)], p)
            beta = P.p_min + rng.uniform(0.2, 0.8) * (P.collision_probability - P.p_min)
            spec = ConstraintSpec.inequality(beta)

            closed = solve_problem_p(P, spec)
            seed = grid_minimize_kl(P, spec, 1e-2).argmin
            refined = refine_minimize_kl(P, spec, seed)
            np.testing.assert_allclose(refined.argmin.vector, closed.utility.vector, atol=1e-4)
            assert refined.kl_value == pytest.approx(closed.kl_to_source, abs=1e-8)


class TestWorkedExamples:

    def test_inactive_budget_at_neutral_point(self, p1):
        result = grid_minimize_kl(p1, ConstraintSpec.inequality(0.3), 1e-2)
        assert np.max(np.abs(result.argmin.vector - p1.vector)) <= 1e-2
        assert result.kl_value == pytest.approx(0.0, abs=1e-12)

    def test_binary_below_p_min(self, binary):
        with pytest.raises(NoFeasiblePointError):
            grid_minimize_kl(binary, ConstraintSpec.inequality(0.25), 1e-2)

    def test_exact_seed_is_kept(self, p1):
        spec = ConstraintSpec.inequality(0.2)
        closed = solve_problem_p(p1, spec)
        refined = refine_minimize_kl(p1, spec, closed.utility)
        assert refined.kl_value <= closed.kl_to_source + 1e-12
        np.testing.assert_allclose(refined.argmin.vector, closed.utility.vector, atol=1e-9)
