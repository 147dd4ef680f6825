import math

import pytest
from hypothesis import given, settings

from causal_bounds.bounds import (
    LOWER,
    full_report,
    find_violations,
    printed_rows_report,
    tight_bounds_lp,
)
from causal_bounds.classical import ace, forward, random_model
from causal_bounds.constants import LP_AGREEMENT_TOL
from causal_bounds.epr import PUBLISHED_VIOLATION
from causal_bounds.inequalities import instrumental_lower, instrumental_upper
from tests.utils import seeds


class TestTightBoundsLp:
    def test_compliance(self, compliance_dist):
        lp = tight_bounds_lp(compliance_dist)
        assert lp.feasible
        assert lp.lower == pytest.approx(0.3, abs=1e-9)
        assert lp.upper == pytest.approx(0.3, abs=1e-9)

    def test_uniform(self, uniform_dist):
        lp = tight_bounds_lp(uniform_dist)
        assert lp.lower == pytest.approx(-0.5, abs=1e-9)
        assert lp.upper == pytest.approx(0.5, abs=1e-9)

    def test_toy_shows_fake_effect(self, toy_dist):
        lp = tight_bounds_lp(toy_dist)
        assert lp.feasible
        assert lp.lower == pytest.approx(PUBLISHED_VIOLATION, abs=1e-7)
        assert lp.lower > 0

    def test_infeasible(self, infeasible_dist):
        lp = tight_bounds_lp(infeasible_dist)
        assert not lp.feasible
        assert lp.lower is None and lp.upper is None

    @given(seeds)
    @settings(max_examples=100, deadline=None)
    def test_matches_closed_forms(self, seed):
        dist = forward(random_model(seed))
        lp = tight_bounds_lp(dist)
        assert lp.feasible
        assert lp.lower == pytest.approx(max(instrumental_lower(dist)), abs=LP_AGREEMENT_TOL)
        assert lp.upper == pytest.approx(min(instrumental_upper(dist)), abs=LP_AGREEMENT_TOL)


class TestFindViolations:
    def test_toy_against_zero(self, toy_dist):
        violations = find_violations(
            instrumental_lower(toy_dist), instrumental_upper(toy_dist), 0.0
        )
        assert [(v.side, v.index) for v in violations] == [(LOWER, 3)]
        assert math.isclose(violations[0].value, 0.133883, abs_tol=1e-6)

    def test_uniform_against_zero(self, uniform_dist):
        assert find_violations(
            instrumental_lower(uniform_dist), instrumental_upper(uniform_dist), 0.0
        ) == []

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_classical_models_never_violate(self, seed):
        model = random_model(seed)
        dist = forward(model)
        assert find_violations(
            instrumental_lower(dist), instrumental_upper(dist), ace(model)
        ) == []


class TestFullReport:
    def test_toy(self, toy_dist):
        report = full_report(toy_dist, true_ace=0.0)
        assert report.feasible
        assert report.best_lower == pytest.approx(PUBLISHED_VIOLATION, abs=1e-12)
        assert [v.index for v in report.violations] == [3]

    def test_without_true_ace(self, toy_dist):
        assert full_report(toy_dist).violations == ()

    def test_to_dict_key_order(self, compliance_dist):
        data = full_report(compliance_dist).to_dict()
        assert list(data) == [
            "natural_lower",
            "natural_upper",
            "inst_lower",
            "inst_upper",
            "lp_lower",
            "lp_upper",
            "feasible",
            "feasibility_margin",
            "violations",
        ]

    def test_infeasible(self, infeasible_dist):
        report = full_report(infeasible_dist)
        assert not report.feasible
        assert report.feasibility_margin < 0
        assert report.to_dict()["lp_lower"] is None


class TestPrintedRowsReport:
    def test_toy(self, toy_dist):
        report = printed_rows_report(toy_dist)
        assert report["inconsistent"] == [4]
        assert len(report["rows"]) == 8
