"""Paired significance testing and improvement tables."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skidtrack.errors import EmptyRecord, MismatchedRuns
from skidtrack.simulate import ExperimentRecord
from skidtrack.stats import (
    MAX_EXACT_ARRANGEMENTS,
    compare,
    far_permutation_p,
    far_test,
    finner_posthoc,
    improvement,
)

TOL = 1e-10


def reference_aligned_rank_statistic(groups: np.ndarray) -> float:
    """Straight-line transcription of the aligned-ranks test statistic.

    Kept deliberately independent of the library code: ranking is done with
    argsort plus explicit tie averaging instead of scipy.
    """
    groups = np.asarray(groups, dtype=float)
    k, n = groups.shape
    aligned = groups - groups.mean(axis=0, keepdims=True)
    flat = aligned.ravel()
    order = np.argsort(flat, kind="mergesort")
    ranks = np.empty(flat.size)
    ranks[order] = np.arange(1, flat.size + 1, dtype=float)
    for value in np.unique(flat):
        mask = flat == value
        if mask.sum() > 1:
            ranks[mask] = ranks[mask].mean()
    ranks = ranks.reshape(k, n)
    treatment_sums = ranks.sum(axis=1)
    block_sums = ranks.sum(axis=0)
    kn = k * n
    numerator = (k - 1) * (
        np.sum(treatment_sums**2) - (k * n**2 / 4.0) * (kn + 1) ** 2
    )
    denominator = kn * (kn + 1) * (2 * kn + 1) / 6.0 - np.sum(block_sums**2) / k
    return numerator / denominator


def make_record(kind: str, pair_seed: int, e_x) -> ExperimentRecord:
    e_x = np.asarray(e_x, dtype=float)
    n = e_x.size
    # nonzero heading keeps every baseline metric away from zero denominators
    return ExperimentRecord(
        meta={
            "trajectory": kind,
            "slip_seed": pair_seed,
            "plant_seed": pair_seed + 1,
        },
        columns={
            "t": 0.01 * np.arange(n),
            "e_x": e_x,
            "e_y": np.zeros(n),
            "e_theta": np.full(n, 0.05),
        },
    )


class TestFarTest:
    def test_identical_groups_flagged_degenerate(self):
        result = far_test(np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]))
        assert result.degenerate
        assert result.p_value == 1.0
        assert result.statistic == 0.0

    def test_uniform_winner_is_significant(self):
        baseline = np.array([10.0, 11.5, 12.0, 13.2, 14.0, 15.1, 16.0, 17.3])
        gaps = np.array([1.0, 1.2, 0.9, 1.4, 1.1, 1.3, 0.8, 1.5])
        result = far_test(np.array([baseline, baseline - gaps]))
        assert not result.degenerate
        assert result.p_value < 0.05

    def test_statistic_matches_reference_formula(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            k = rng.integers(2, 4)
            n = rng.integers(2, 7)
            if rng.random() < 0.5:
                groups = rng.integers(0, 5, size=(k, n)).astype(float)
            else:
                groups = rng.normal(size=(k, n))
            expected = reference_aligned_rank_statistic(groups)
            if not np.isfinite(expected):
                continue
            result = far_test(groups)
            if result.degenerate:
                continue
            assert result.statistic == pytest.approx(expected, abs=1e-10)
            assert result.dof == k - 1

    def test_shape_validation(self):
        with pytest.raises(EmptyRecord):
            far_test(np.zeros((1, 5)))
        with pytest.raises(EmptyRecord):
            far_test(np.zeros((2, 0)))

    def test_block_offsets_do_not_move_the_statistic(self):
        # alignment subtracts block means, so per-block shifts are invisible;
        # continuous data keeps float noise away from any rank tie breaks
        rng = np.random.default_rng(7)
        for _ in range(50):
            k = int(rng.integers(2, 4))
            n = int(rng.integers(2, 7))
            groups = rng.normal(size=(k, n))
            offsets = rng.integers(-100, 100, size=n).astype(float)
            a = far_test(groups)
            b = far_test(groups + offsets)
            assert a.degenerate == b.degenerate
            if not a.degenerate:
                assert a.statistic == pytest.approx(b.statistic, abs=1e-9)


class TestPermutation:
    def test_exact_path_matches_enumeration(self):
        groups = np.array([[3.0, 5.0, 4.0], [1.0, 4.6, 3.0]])
        p, method = far_permutation_p(groups)
        assert method == "exact"
        t_obs = far_test(groups).statistic
        count = 0
        total = 0
        for mask in range(2 ** groups.shape[1]):
            permuted = groups.copy()
            for j in range(groups.shape[1]):
                if mask >> j & 1:
                    permuted[0, j], permuted[1, j] = groups[1, j], groups[0, j]
            total += 1
            if far_test(permuted).statistic >= t_obs - 1e-12:
                count += 1
        assert p == pytest.approx(count / total, abs=TOL)

    def test_large_instances_fall_back_to_monte_carlo(self):
        rng = np.random.default_rng(1)
        groups = rng.normal(size=(2, 20))
        assert 2**20 > MAX_EXACT_ARRANGEMENTS
        p1, method = far_permutation_p(groups)
        p2, _ = far_permutation_p(groups)
        assert method == "monte-carlo"
        assert 0.0 < p1 <= 1.0
        assert p1 == p2

    def test_degenerate_input(self):
        p, method = far_permutation_p(np.ones((2, 4)))
        assert method == "degenerate"
        assert p == 1.0


class TestFinner:
    def test_single_comparison_is_identity(self):
        assert finner_posthoc([0.03], comparisons=1) == [0.03]

    def test_zeros_stay_zero(self):
        assert finner_posthoc([0.0, 0.0]) == [0.0, 0.0]

    def test_two_comparisons(self):
        adjusted = finner_posthoc([0.01, 0.04])
        assert adjusted[0] == pytest.approx(1.0 - (1.0 - 0.01) ** 2, abs=TOL)
        assert adjusted[1] == pytest.approx(0.04, abs=TOL)

    def test_empty(self):
        assert finner_posthoc([]) == []

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8))
    @settings(max_examples=100, deadline=None)
    def test_adjustment_properties(self, raw):
        adjusted = finner_posthoc(raw)
        assert len(adjusted) == len(raw)
        for p_raw, p_adj in zip(raw, adjusted):
            assert 0.0 <= p_adj <= 1.0
            assert p_adj >= p_raw - 1e-12
        # ordering is preserved: smaller raw p never gets the larger adjustment
        order = np.argsort(raw, kind="mergesort")
        sorted_adj = [adjusted[i] for i in order]
        assert all(
            a <= b + 1e-12 for a, b in zip(sorted_adj, sorted_adj[1:])
        )

    def test_matches_step_down_formula(self):
        raw = [0.2, 0.01, 0.03, 0.5]
        m = len(raw)
        order = np.argsort(raw, kind="mergesort")
        stepped = []
        running = 0.0
        for rank, idx in enumerate(order, start=1):
            value = 1.0 - (1.0 - raw[idx]) ** (m / rank)
            running = max(running, value)
            stepped.append((idx, min(1.0, running)))
        expected = [0.0] * m
        for idx, value in stepped:
            expected[idx] = value
        assert finner_posthoc(raw) == pytest.approx(expected, abs=1e-12)


class TestImprovement:
    def test_percentage(self):
        assert improvement(15.55, 11.21) == pytest.approx(27.91, abs=0.005)

    def test_no_change(self):
        assert improvement(4.2, 4.2) == 0.0

    def test_regression_is_negative(self):
        assert improvement(10.0, 12.0) == pytest.approx(-20.0, abs=TOL)


class TestCompare:
    def test_identical_lists_are_degenerate(self):
        records = [
            make_record("straight", 100, [0.1, 0.2]),
            make_record("circular", 200, [0.2, 0.3]),
        ]
        result = compare(records, records)
        assert result.far.degenerate
        assert not result.significant
        for metric, (a, b, imp) in result.overall.items():
            assert a == b
            assert imp == 0.0

    def test_improvement_table(self):
        a = [make_record("straight", 100, [0.2])]
        b = [make_record("straight", 100, [0.1])]
        result = compare(a, b)
        base, var, imp = result.per_trajectory["straight"]["mean_dis_cm"]
        assert base == pytest.approx(20.0, abs=1e-9)
        assert var == pytest.approx(10.0, abs=1e-9)
        assert imp == pytest.approx(50.0, abs=1e-9)
        assert result.n_pairs == 1

    def test_length_mismatch_rejected(self):
        a = [make_record("straight", 100, [0.2])]
        with pytest.raises(MismatchedRuns):
            compare(a, [])

    def test_pairing_mismatch_rejected(self):
        a = [make_record("straight", 100, [0.2])]
        b = [make_record("circular", 100, [0.2])]
        with pytest.raises(MismatchedRuns):
            compare(a, b)

    def test_seed_mismatch_rejected(self):
        a = [make_record("straight", 100, [0.2])]
        b = [make_record("straight", 101, [0.2])]
        with pytest.raises(MismatchedRuns):
            compare(a, b)

    def test_empty_rejected(self):
        with pytest.raises(EmptyRecord):
            compare([], [])
