"""Unit tests for the total-variation ball solver."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import divball as db
from conftest import assert_tv_pattern, random_objective, random_pmf, sorted_minimizer


class TestTvDistance:
    def test_identity(self):
        p, _ = db.validate([0.2, 0.3, 0.5], [1, 2, 3])
        assert db.tv_distance(p, p) == 0.0

    def test_disjoint_point_masses(self):
        q = db.Pmf(np.array([1.0, 0.0]))
        p = db.Pmf(np.array([0.0, 1.0]))
        assert db.tv_distance(q, p) == 1.0

    def test_hand_sum(self):
        q = db.Pmf(np.array([0.6, 0.3, 0.1]))
        p = db.Pmf(np.array([0.2, 0.3, 0.5]))
        got = db.tv_distance(q, p)
        assert abs(got - 0.4) <= 1e-15
        assert abs(got - db.naive_tv_distance(q, p)) <= 1e-15

    def test_length_mismatch(self):
        with pytest.raises(db.LengthMismatchError):
            db.tv_distance(db.Pmf(np.array([1.0])), db.Pmf(np.array([0.5, 0.5])))


class TestThresholdIndex:
    def test_partial_budget(self):
        p, f = db.validate([0.2, 0.3, 0.5], [1, 2, 3])
        sp = db.sort_and_prefix(p, f)
        # suffix masses after r = 1, 2, 3 are 0.8, 0.5, 0.
        assert db.tv_threshold_index(sp, 0.4) == 3
        assert db.tv_threshold_index(sp, 0.5) == 2
        assert db.tv_threshold_index(sp, 0.79) == 2

    def test_full_budget(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            sp = db.sort_and_prefix(random_pmf(rng, n), random_objective(rng, n))
            assert db.tv_threshold_index(sp, 1.0) == 1
            assert db.tv_threshold_index(sp, 2.5) == 1

    def test_zero_budget(self):
        p, f = db.validate([0.5, 0.5], [0, 1])
        sp = db.sort_and_prefix(p, f)
        assert db.tv_threshold_index(sp, 0.0) == 2

    def test_negative_delta(self):
        p, f = db.validate([0.5, 0.5], [0, 1])
        with pytest.raises(db.NegativeDeltaError):
            db.tv_threshold_index(db.sort_and_prefix(p, f), -0.1)

    def test_exhaustive_scan_agreement(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(1, 10))
            p = random_pmf(rng, n)
            sp = db.sort_and_prefix(p, random_objective(rng, n))
            delta = float(rng.uniform(0, 1))
            r = db.tv_threshold_index(sp, delta)
            candidates = [
                k
                for k in range(1, n + 1)
                if delta >= db.suffix_masses(sp.p_sorted)[k - 1]
            ]
            assert r == min(candidates)


class TestTvLowerExpectation:
    def test_worked_three_point(self):
        p, f = db.validate([0.2, 0.3, 0.5], [1, 2, 3])
        res = db.tv_lower_expectation(p, f, 0.4)
        assert abs(res.value - 1.5) <= 1e-12
        np.testing.assert_allclose(res.minimizer.weights, [0.6, 0.3, 0.1], atol=1e-12)
        assert res.active_index == 3
        assert res.branch == "interior"
        report = db.oracle_lower_expectation(p, f, db.BallSpec("tv", 0.4), 200)
        assert 0 <= report.grid_minimum - res.value <= report.tolerance

    def test_zero_delta_returns_center(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            p = random_pmf(rng, n)
            f = random_objective(rng, n)
            res = db.tv_lower_expectation(p, f, 0.0)
            assert abs(res.value - db.expectation(p, f)) <= 1e-12
            np.testing.assert_allclose(res.minimizer.weights, p.weights, atol=1e-15)

    def test_degenerate_all_mass_moves(self):
        p, f = db.validate([0.7, 0.3], [1, 0])
        res = db.tv_lower_expectation(p, f, 0.9)
        assert res.value == 0.0
        np.testing.assert_allclose(res.minimizer.weights, [0.0, 1.0], atol=0)
        assert res.active_index == 1
        assert res.branch == "degenerate"

    def test_delta_above_one_clamps(self):
        p, f = db.validate([0.4, 0.6], [2, 5])
        res = db.tv_lower_expectation(p, f, 3.0)
        assert res.value == 2.0
        assert db.tv_distance(res.minimizer, p) == pytest.approx(0.6, abs=1e-15)

    def test_negative_delta(self):
        p, f = db.validate([0.5, 0.5], [0, 1])
        with pytest.raises(db.NegativeDeltaError):
            db.tv_lower_expectation(p, f, -1e-9)

    def test_single_outcome(self):
        p, f = db.validate([1.0], [4.5])
        for delta in (0.0, 0.3, 1.0, 2.0):
            res = db.tv_lower_expectation(p, f, delta)
            assert res.value == 4.5
            assert res.minimizer.weights[0] == 1.0

    def test_minimizer_labels_preserved(self):
        p = db.Pmf(np.array([0.5, 0.5]), labels=("a", "b"))
        f = db.Objective(np.array([0.0, 1.0]))
        res = db.tv_lower_expectation(p, f, 0.2)
        assert res.minimizer.labels == ("a", "b")


class TestTvUpperExpectation:
    def test_zero_delta(self):
        p, f = db.validate([0.2, 0.8], [3, -1])
        assert db.tv_upper_expectation(p, f, 0.0).value == pytest.approx(
            db.expectation(p, f), abs=1e-12
        )

    def test_worked_two_point(self):
        p, f = db.validate([0.5, 0.5], [0, 1])
        res = db.tv_upper_expectation(p, f, 0.2)
        assert abs(res.value - 0.7) <= 1e-12
        assert db.expectation(res.minimizer, f) == pytest.approx(0.7, abs=1e-12)

    def test_constant_objective(self):
        p, f = db.validate([0.3, 0.7], [2.5, 2.5])
        for delta in (0.0, 0.4, 1.0):
            assert db.tv_upper_expectation(p, f, delta).value == 2.5


class TestTvInvariants:
    def test_boundary_distance(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            n = int(rng.integers(1, 9))
            p = random_pmf(rng, n)
            if rng.random() < 0.3 and n > 1:
                w = p.weights.copy()
                w[int(rng.integers(0, n))] = 0.0
                p = db.Pmf(w / w.sum()) if w.sum() > 0 else p
            f = random_objective(rng, n)
            delta = float(rng.uniform(0, 1.3))
            res = db.tv_lower_expectation(p, f, delta)
            sp = db.sort_and_prefix(p, f)
            expected = min(min(delta, 1.0), 1.0 - sp.p_sorted[0])
            assert abs(db.tv_distance(res.minimizer, p) - expected) <= 1e-12
            assert abs(db.expectation(res.minimizer, f) - res.value) <= 1e-9

    def test_minimizer_structure(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            p = random_pmf(rng, n)
            f = random_objective(rng, n)
            delta = float(rng.uniform(0, 1.2))
            res = db.tv_lower_expectation(p, f, delta)
            sp = db.sort_and_prefix(p, f)
            q_sorted = sorted_minimizer(sp, res)
            delta_eff = min(min(delta, 1.0), 1.0 - sp.p_sorted[0])
            assert_tv_pattern(sp, q_sorted, delta_eff, res.active_index)
            # At most one coordinate rises (the objective-smallest); the rest
            # weakly decrease.
            diff = res.minimizer.weights - p.weights
            raised = diff > 1e-12
            assert raised.sum() <= 1
            if raised.any():
                assert int(np.flatnonzero(raised)[0]) == int(sp.perm[0])

    def test_monotone_in_delta(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            p = random_pmf(rng, n)
            f = random_objective(rng, n)
            deltas = np.sort(rng.uniform(0, 1.2, 8))
            values = [db.tv_lower_expectation(p, f, d).value for d in deltas]
            for a, b in zip(values, values[1:]):
                assert b <= a + 1e-12

    def test_conjugacy_is_exact(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            p = random_pmf(rng, n)
            f = random_objective(rng, n)
            delta = float(rng.uniform(0, 1.2))
            up = db.tv_upper_expectation(p, f, delta)
            lo = db.tv_lower_expectation(p, f.negated(), delta)
            assert up.value == -lo.value

    @given(
        st.integers(2, 6),
        st.floats(0, 1.2),
        st.floats(-5, 5),
        st.floats(0, 4),
        st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=80, deadline=None)
    def test_translation_and_scaling(self, n, delta, shift, scale, seed):
        rng = np.random.default_rng(seed)
        p = random_pmf(rng, n)
        f = random_objective(rng, n, -3, 3)
        base = db.tv_lower_expectation(p, f, delta).value
        shifted = db.tv_lower_expectation(
            p, db.Objective(f.values + shift), delta
        ).value
        assert abs(shifted - (base + shift)) <= 1e-9
        scaled = db.tv_lower_expectation(
            p, db.Objective(scale * f.values), delta
        ).value
        assert abs(scaled - scale * base) <= 1e-9 * (1 + abs(scale))

    def test_value_between_min_and_center(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            p = random_pmf(rng, n)
            f = random_objective(rng, n)
            delta = float(rng.uniform(0, 1.3))
            value = db.tv_lower_expectation(p, f, delta).value
            assert float(f.values.min()) - 1e-12 <= value
            assert value <= db.expectation(p, f) + 1e-12

    def test_oracle_sandwich_small_instances(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            n = int(rng.integers(2, 5))
            resolution = 200 if n <= 3 else 100
            p = random_pmf(rng, n, grid=resolution)
            f = random_objective(rng, n)
            delta = float(rng.uniform(0, 1.2))
            res = db.tv_lower_expectation(p, f, delta)
            report = db.oracle_lower_expectation(
                p, f, db.BallSpec("tv", delta), resolution
            )
            gap = report.grid_minimum - res.value
            assert gap >= -1e-12 * (1 + abs(res.value))
            assert gap <= report.tolerance
            assert db.naive_tv_distance(res.minimizer, p) <= delta + 1e-9
