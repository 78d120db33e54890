"""Entropy case enumeration: separation, limits, and the n=1 degeneracy."""

import json
import math

import numpy as np
import pytest

from mimlab.oracle import entropy_case_oracle, format_reports, sweep_cases

SEPARABLE_PAIRS = [(n, total) for n in range(2, 5) for total in range(n + 1, 9)]


class TestCaseSeparation:
    @pytest.mark.parametrize("n,total", SEPARABLE_PAIRS)
    def test_inequality_holds_for_multi_token_masks(self, n, total):
        report = entropy_case_oracle(n, total, grid_steps=50)
        assert report.inequality_holds
        assert report.max_case2_entropy < report.min_case1_entropy

    @pytest.mark.parametrize("n,total", SEPARABLE_PAIRS)
    def test_case1_floor_approaches_log_n(self, n, total):
        report = entropy_case_oracle(n, total, grid_steps=50)
        assert report.min_case1_entropy == pytest.approx(math.log(n), rel=0.02)
        # approached from above, never attained exactly
        assert report.min_case1_entropy > math.log(n)

    @pytest.mark.parametrize("n,total", SEPARABLE_PAIRS)
    def test_case2_floor_approaches_zero(self, n, total):
        report = entropy_case_oracle(n, total, grid_steps=50)
        assert 0.0 < report.min_case2_entropy < 0.05

    @pytest.mark.parametrize("n,total", [(2, 6), (3, 8), (4, 5)])
    def test_monotone_approach(self, n, total):
        report = entropy_case_oracle(n, total, grid_steps=50)
        assert report.case1_monotone_approach
        assert report.case2_monotone_approach


class TestMirrorDegeneracy:
    """With a single masked token the two families are permutations of
    each other, so their entropy sets coincide exactly and a strict
    separation is impossible."""

    @pytest.mark.parametrize("total", range(2, 9))
    def test_n1_entropy_sets_coincide(self, total):
        report = entropy_case_oracle(1, total, grid_steps=50)
        assert report.mirror_degenerate
        assert report.min_case1_entropy == report.min_case2_entropy
        assert report.max_case1_entropy == report.max_case2_entropy
        assert not report.inequality_holds

    def test_n2_not_degenerate(self):
        assert not entropy_case_oracle(2, 4).mirror_degenerate


class TestSparsityConnection:
    def test_visible_peak_beats_masked_peak(self):
        """A visible row concentrated on a visible column always carries
        less entropy than one concentrated on the masked block, so the
        row-entropy objective prefers visible-visible weight."""
        report = entropy_case_oracle(2, 6, grid_steps=50)
        assert report.max_case2_entropy < report.min_case1_entropy


class TestValidationAndFormat:
    def test_bad_counts(self):
        with pytest.raises(ValueError):
            entropy_case_oracle(4, 4)
        with pytest.raises(ValueError):
            entropy_case_oracle(0, 4)

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            entropy_case_oracle(2, 6, grid_steps=5)

    def test_report_serialization(self):
        reports = sweep_cases([(2, 6), (3, 7)], grid_steps=20)
        text = format_reports(reports)
        lines = text.strip().splitlines()
        assert len(lines) == 3  # one record per pair plus the verdict line
        first = json.loads(lines[0])
        assert first["n_masked"] == 2 and first["n_total"] == 6
        verdict = json.loads(lines[-1])
        assert verdict["all_inequalities_hold"] is True

    def test_runtime_is_interactive(self):
        import time

        start = time.perf_counter()
        sweep_cases(
            [(n, total) for n in range(1, 5) for total in range(n + 1, 9)],
            grid_steps=50,
        )
        assert time.perf_counter() - start < 10.0

    def test_rows_are_valid_distributions(self):
        report = entropy_case_oracle(3, 7, grid_steps=25)
        # extremes are finite, ordered, and within [0, log N]
        assert 0 < report.min_case2_entropy <= report.max_case2_entropy
        assert report.min_case1_entropy <= report.max_case1_entropy <= np.log(7)
