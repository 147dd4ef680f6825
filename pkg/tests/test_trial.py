import io
import math

import numpy as np
import pytest
from hypothesis import given, settings

from causal_bounds.classical import forward, random_model
from causal_bounds.epr import A_MINUS, A_PLUS
from causal_bounds.exceptions import (
    EmptyArm,
    InvalidDistribution,
    InvalidRecord,
    ParseError,
)
from causal_bounds.trial import (
    ObservedDistribution,
    TrialRecord,
    estimate,
    naive_effect,
    read_records_csv,
    sample_distribution,
    validate,
    write_records_csv,
)
from tests.utils import assert_close, exact_counts, seeds


class TestTrialRecord:
    def test_fields(self):
        record = TrialRecord(1, 0, 1)
        assert (record.z, record.x, record.y) == (1, 0, 1)

    @pytest.mark.parametrize("values", [(2, 0, 1), (0, -1, 0), (0, 0, 0.5)])
    def test_rejects_non_bits(self, values):
        with pytest.raises(InvalidRecord):
            TrialRecord(*values)


class TestObservedDistribution:
    def test_clamps_round_off(self):
        p = np.full((2, 2, 2), 0.25)
        p[0, 0, 0] = -1e-13
        p[1, 1, 0] = 0.5 + 1e-13
        dist = ObservedDistribution(p)
        assert dist.cell(0, 0, 0) == 0.0
        assert math.isclose(dist.p[:, :, 0].sum(), 1.0, abs_tol=1e-15)

    def test_keeps_malformed_slices(self):
        p = np.full((2, 2, 2), 0.25)
        p[0, 0, 1] = 0.15
        dist = ObservedDistribution(p)
        assert math.isclose(dist.p[:, :, 1].sum(), 0.9)

    def test_wrong_shape(self):
        with pytest.raises(InvalidDistribution):
            ObservedDistribution(np.zeros((2, 2)))

    def test_read_only(self, uniform_dist):
        with pytest.raises(ValueError):
            uniform_dist.p[0, 0, 0] = 1.0

    def test_json_round_trip_is_exact(self, toy_dist):
        again = ObservedDistribution.from_json(toy_dist.to_json())
        assert np.array_equal(again.p, toy_dist.p)
        assert again.pz == toy_dist.pz

    @given(seeds)
    @settings(max_examples=100, deadline=None)
    def test_construction_is_idempotent(self, seed):
        dist = forward(random_model(seed))
        again = ObservedDistribution(dist.p, dist.pz)
        assert np.array_equal(again.p, dist.p)
        assert np.array_equal(ObservedDistribution.from_json(dist.to_json()).p, dist.p)

    def test_renormalizes_small_drift(self):
        p = np.full((2, 2, 2), 0.25)
        p[1, 1, 1] = 0.25 + 1e-11
        dist = ObservedDistribution(p)
        assert math.isclose(dist.p[:, :, 1].sum(), 1.0, abs_tol=1e-15)
        assert np.array_equal(ObservedDistribution(dist.p).p, dist.p)

    def test_from_dict_missing_key(self):
        with pytest.raises(InvalidDistribution):
            ObservedDistribution.from_dict({"pz": 0.5})

    def test_marginals(self, compliance_dist):
        assert math.isclose(compliance_dist.p_y1(1), 0.7)
        assert math.isclose(compliance_dist.p_x1(1), 1.0)
        assert compliance_dist.p_x1(0) == 0.0


class TestEstimate:
    def test_counts(self):
        records = [TrialRecord(1, 1, 1), TrialRecord(0, 0, 1), TrialRecord(1, 0, 0), TrialRecord(0, 0, 0)]
        dist = estimate(records)
        assert dist.cell(1, 1, 1) == 0.5
        assert dist.cell(0, 0, 1) == 0.5
        assert dist.cell(1, 0, 0) == 0.5
        assert dist.cell(0, 0, 0) == 0.5
        assert dist.pz == 0.5

    def test_empty_arm(self):
        with pytest.raises(EmptyArm) as e:
            estimate([TrialRecord(1, 0, 0), TrialRecord(1, 1, 1)])
        assert e.value.z == 0

    def test_exact_counts_recover_distribution(self, compliance_dist):
        records = [TrialRecord(*r) for r in exact_counts(compliance_dist)]
        dist = estimate(records)
        assert_close(dist.p, compliance_dist.p)
        assert validate(dist, 1e-12) == []


class TestValidate:
    def test_uniform(self, uniform_dist):
        assert validate(uniform_dist) == []

    def test_toy(self, toy_dist):
        assert validate(toy_dist) == []

    def test_short_slice(self):
        p = np.full((2, 2, 2), 0.25)
        p[0, 0, 1] = 0.15
        problems = validate(ObservedDistribution(p))
        assert len([problem for problem in problems if "slice" in problem]) == 1

    def test_entry_out_of_range(self):
        p = np.full((2, 2, 2), 0.25)
        p[0, 0, 0] = -0.25
        p[1, 1, 0] = 0.75
        problems = validate(ObservedDistribution(p))
        assert any("outside [0, 1]" in problem for problem in problems)


class TestNaiveEffect:
    def test_uniform(self, uniform_dist):
        assert naive_effect(uniform_dist) == 0.0

    def test_compliance(self, compliance_dist):
        assert math.isclose(naive_effect(compliance_dist), 0.3)

    def test_toy(self, toy_dist):
        assert math.isclose(naive_effect(toy_dist), A_MINUS - A_PLUS, abs_tol=1e-12)
        assert math.isclose(naive_effect(toy_dist), -1 / (2 * math.sqrt(2)), abs_tol=1e-12)

    def test_antisymmetric_under_advice_swap(self, compliance_dist):
        assert math.isclose(
            naive_effect(compliance_dist.swap_z()), -naive_effect(compliance_dist)
        )


class TestSampleDistribution:
    def test_deterministic(self, toy_dist):
        assert sample_distribution(toy_dist, 500, 7) == sample_distribution(toy_dist, 500, 7)

    def test_rejects_empty(self, toy_dist):
        with pytest.raises(ValueError):
            sample_distribution(toy_dist, 0, 7)

    @pytest.mark.slow
    def test_recovers_toy_cells(self, toy_dist):
        dist = estimate(sample_distribution(toy_dist, 10**6, 42))
        assert np.max(np.abs(dist.p - toy_dist.p)) <= 3e-3


class TestCsv:
    def test_read(self):
        records = read_records_csv("z,x,y\n1,1,0\n0,0,1\n")
        assert records == [TrialRecord(1, 1, 0), TrialRecord(0, 0, 1)]

    def test_bad_value_reports_line(self):
        with pytest.raises(ParseError) as e:
            read_records_csv("z,x,y\n1,1,0\n2,0,1\n")
        assert e.value.line == 3

    def test_bad_header(self):
        with pytest.raises(ParseError) as e:
            read_records_csv("a,b,c\n1,1,0\n")
        assert e.value.line == 1

    def test_write_then_read(self):
        records = [TrialRecord(0, 1, 1), TrialRecord(1, 0, 0)]
        stream = io.StringIO()
        write_records_csv(records, stream)
        assert stream.getvalue().startswith("z,x,y\n")
        assert read_records_csv(stream.getvalue()) == records
