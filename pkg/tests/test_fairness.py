import pytest

from distributions.fairness import UsageClass, beta_from_raw, fairness
from distributions.pmf import pmf_from_counts, pmf_from_probs, uniform_pmf
from utils.errors import LabelMismatchError, SupportMismatchError


class TestFairness:

    def test_identical_usage_is_fair(self, p1):
        report = fairness(p1, p1)
        assert report.all_fair
        assert report.ratios == pytest.approx((1.0, 1.0, 1.0, 1.0))

    def test_uniform_usage_against_p1(self, p1):
        report = fairness(p1, uniform_pmf(p1.labels))
        assert report.ratios == pytest.approx((2.5, 1.25, 0.25 / 0.3, 0.625))
        assert report.classification == (
            UsageClass.OVERUSED, UsageClass.OVERUSED, UsageClass.UNDERUSED, UsageClass.UNDERUSED,
        )
        assert report.by_label()["a1"][1] is UsageClass.OVERUSED

    def test_tolerance_band(self):
        P = pmf_from_probs(["a", "b"], [0.5, 0.5])
        U = pmf_from_probs(["a", "b"], [0.5 + 1e-12, 0.5 - 1e-12])
        assert fairness(P, U).all_fair
        assert not fairness(P, U, tol=1e-14).all_fair

    def test_zero_atoms_on_both_sides_are_fair(self):
        P = pmf_from_probs(["a", "b", "c"], [0.0, 0.5, 0.5])
        assert fairness(P, P).ratios[0] == 1.0

    def test_mass_outside_support(self):
        P = pmf_from_probs(["a", "b", "c"], [0.0, 0.5, 0.5])
        U = pmf_from_probs(["a", "b", "c"], [0.2, 0.4, 0.4])
        with pytest.raises(SupportMismatchError):
            fairness(P, U)


class TestBetaFromRaw:

    def test_matching_counts_give_collision_probability(self, p1):
        _, raw = pmf_from_counts(p1.labels, [1, 2, 3, 4])
        budget = beta_from_raw(p1, raw)
        assert budget.beta == pytest.approx(0.3, abs=1e-12)
        assert budget.alpha == pytest.approx(0.7, abs=1e-12)

    def test_point_mass_usage_hits_p_min(self, p1):
        _, raw = pmf_from_counts(p1.labels, [5, 0, 0, 0])
        assert beta_from_raw(p1, raw).beta == pytest.approx(0.1)

    def test_label_mismatch(self, p1):
        _, raw = pmf_from_counts(["x", "y", "z", "w"], [1, 1, 1, 1])
        with pytest.raises(LabelMismatchError):
            beta_from_raw(p1, raw)

    def test_usage_on_zero_atom(self):
        P = pmf_from_probs(["a", "b", "c"], [0.0, 0.5, 0.5])
        _, raw = pmf_from_counts(["a", "b", "c"], [1, 1, 1])
        with pytest.raises(SupportMismatchError):
            beta_from_raw(P, raw)
