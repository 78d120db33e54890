"""Objective values: closed forms, bounds, and invariances."""

import numpy as np
import pytest

from mimlab.errors import DimensionError, NumericError
from mimlab.losses import (
    LossWeights,
    heterogeneity,
    inverse_heterogeneity_loss,
    ranking_loss,
    reconstruction_loss,
    softmax_affinity,
    sparsity_loss,
    total_loss,
)
from mimlab.patches import sample_mask


def mask_of(indices, n):
    from mimlab.patches import MaskSpec

    return MaskSpec(
        masked_indices=np.asarray(indices), ratio=len(indices) / n, seed=0, n_patches=n
    )


class TestSoftmaxAffinity:
    def test_symmetric_logits(self):
        aff = softmax_affinity(np.array([[0.0, 0.0]]), np.eye(2))
        np.testing.assert_allclose(aff.values, [[0.5, 0.5]], atol=1e-15)

    def test_closed_form_ln2(self):
        # logits [ln 2, 0] -> [2/3, 1/3]
        queries = np.array([[1.0]])
        keys = np.array([[np.log(2.0)], [0.0]])
        aff = softmax_affinity(queries, keys)
        np.testing.assert_allclose(aff.values, [[2 / 3, 1 / 3]], atol=1e-12)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        aff = softmax_affinity(rng.normal(size=(5, 3)), rng.normal(size=(7, 3)))
        np.testing.assert_allclose(aff.values.sum(axis=1), 1.0, atol=1e-6)

    def test_width_mismatch(self):
        with pytest.raises(DimensionError):
            softmax_affinity(np.zeros((2, 3)), np.zeros((2, 4)))

    def test_strictly_inside_unit_interval(self):
        """Softmax of finite logits never reaches exactly 0 or 1.

        Exact in real arithmetic; in float64 the dominant entry rounds to
        1.0 once the logit gap passes ~36, so we draw tokens at unit
        scale where every gap stays well inside the representable range.
        """
        rng = np.random.default_rng(1)
        for _ in range(200):
            aff = softmax_affinity(
                rng.normal(size=(4, 6)), rng.normal(size=(5, 6))
            )
            assert aff.values.min() > 0.0
            assert aff.values.max() < 1.0

    def test_temperature_flag(self):
        q = np.array([[2.0, 0.0]])
        k = np.array([[1.0, 0.0], [0.0, 1.0]])
        hot = softmax_affinity(q, k).values
        cool = softmax_affinity(q, k, temperature=10.0).values
        assert cool[0, 0] < hot[0, 0]  # higher temperature flattens


class TestHeterogeneity:
    def test_uniform_rows_hit_log_v(self):
        # Zero masked rows give zero logits, hence uniform affinities.
        states = np.vstack([np.zeros((2, 4)), np.random.default_rng(2).normal(size=(3, 4))])
        mask = mask_of([0, 1], 5)
        np.testing.assert_allclose(heterogeneity(states, mask), np.log(3), atol=1e-12)

    def test_one_hot_rows_vanish(self):
        visible = np.eye(3) * 30.0
        masked = visible[0:1]
        states = np.vstack([masked, visible])
        assert heterogeneity(states, mask_of([0], 4)) < 1e-6

    def test_half_uniform_half_peaked(self):
        # One uniform row and one one-hot row over 2 visible tokens:
        # H -> (log 2)/2 as the peak sharpens.
        visible = np.eye(2) * 40.0
        states = np.vstack([np.zeros(2), visible[0], visible])
        mask = mask_of([0, 1], 4)
        np.testing.assert_allclose(heterogeneity(states, mask), np.log(2) / 2, atol=1e-4)

    def test_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            states = rng.normal(size=(10, 6))
            mask = sample_mask(10, 0.4, int(rng.integers(1 << 30)))
            h = heterogeneity(states, mask)
            assert 0.0 <= h <= np.log(10 - mask.n_masked) + 1e-12

    def test_permutation_of_visible_tokens(self):
        rng = np.random.default_rng(4)
        states = rng.normal(size=(8, 5))
        mask = mask_of([1, 4, 6], 8)
        h = heterogeneity(states, mask)
        permuted = states.copy()
        vis = mask.visible_indices
        permuted[vis] = states[vis][rng.permutation(len(vis))]
        np.testing.assert_allclose(heterogeneity(permuted, mask), h, rtol=1e-12)

    def test_empty_split_errors(self):
        states = np.zeros((4, 3))
        with pytest.raises(ValueError):
            heterogeneity(states, mask_of([], 4))
        with pytest.raises(ValueError):
            heterogeneity(states, mask_of([0, 1, 2, 3], 4))


class TestReconstructionLoss:
    def test_perfect_prediction(self):
        target = np.random.default_rng(5).random((6, 12))
        mask = mask_of([0, 3], 6)
        assert reconstruction_loss(target.copy(), target, mask) == 0.0

    def test_pythagorean_residual(self):
        target = np.zeros((4, 8))
        pred = np.zeros((4, 8))
        pred[2, 0], pred[2, 1] = 3.0, 4.0
        assert reconstruction_loss(pred, target, mask_of([2], 4)) == pytest.approx(25.0)

    def test_constant_residual_mask_size_cancels(self):
        d = 12
        target = np.zeros((8, d))
        c = 0.7
        pred = np.full((8, d), c)
        for masked in ([1], [0, 2, 5], list(range(8))):
            loss = reconstruction_loss(pred, target, mask_of(masked, 8))
            assert loss == pytest.approx(d * c**2)

    def test_empty_mask_errors(self):
        with pytest.raises(ValueError):
            reconstruction_loss(np.zeros((4, 3)), np.zeros((4, 3)), mask_of([], 4))


class TestSparsityLoss:
    def test_one_hot_rows_vanish(self):
        states = np.eye(6) * 30.0  # each row's self-affinity is ~one-hot on itself
        loss = sparsity_loss(states, mask_of([0, 1], 6))
        assert loss < 1e-6

    def test_uniform_rows_hit_count_times_log_n(self):
        states = np.zeros((6, 4))
        mask = mask_of([0, 1], 6)
        np.testing.assert_allclose(
            sparsity_loss(states, mask), 4 * np.log(6), atol=1e-12
        )

    def test_nonnegative(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            states = rng.normal(size=(7, 5))
            assert sparsity_loss(states, mask_of([0, 2], 7)) >= 0.0

    def test_all_masked_errors(self):
        with pytest.raises(ValueError):
            sparsity_loss(np.zeros((3, 2)), mask_of([0, 1, 2], 3))


class TestInverseHeterogeneityLoss:
    def test_zero_h(self):
        assert inverse_heterogeneity_loss(0.0, 1e-6) == pytest.approx(1e6)

    def test_unit_h(self):
        assert inverse_heterogeneity_loss(1.0, 1e-6) == pytest.approx(0.999999, abs=1e-9)

    def test_strictly_decreasing(self):
        values = [inverse_heterogeneity_loss(h, 1e-6) for h in np.linspace(0, 3, 50)]
        assert np.all(np.diff(values) < 0)

    def test_minimal_at_log_v(self):
        v = 6
        h_max = np.log(v)
        floor = inverse_heterogeneity_loss(h_max, 1e-6)
        assert floor == pytest.approx(1.0 / (h_max + 1e-6))
        assert inverse_heterogeneity_loss(h_max - 0.1, 1e-6) > floor

    def test_negative_h_rejected(self):
        with pytest.raises(ValueError):
            inverse_heterogeneity_loss(-0.1, 1e-6)

    def test_bad_epsilon_rejected(self):
        with pytest.raises(ValueError):
            inverse_heterogeneity_loss(1.0, 0.0)


class TestRankingLoss:
    def test_flat_profile_gives_l_log2(self):
        profile = np.full(5, 1.3)
        for direction in ("penalize_increase", "penalize_decrease"):
            np.testing.assert_allclose(
                ranking_loss(profile, direction), 4 * np.log(2), atol=1e-12
            )

    def test_decreasing_profile_closed_forms(self):
        profile = np.array([2.0, 1.0, 0.0])
        np.testing.assert_allclose(
            ranking_loss(profile, "penalize_increase"),
            2 * np.log(1 + np.exp(-1)),
            atol=1e-12,
        )
        np.testing.assert_allclose(
            ranking_loss(profile, "penalize_decrease"),
            2 * np.log(1 + np.exp(1)),
            atol=1e-12,
        )

    def test_positive(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            assert ranking_loss(rng.normal(size=6)) > 0.0

    def test_too_short_errors(self):
        with pytest.raises(ValueError):
            ranking_loss(np.array([1.0]))

    def test_unknown_direction(self):
        with pytest.raises(ValueError):
            ranking_loss(np.array([1.0, 2.0]), "sideways")


class TestTotalLoss:
    def test_zero_weights_reduce_to_reconstruction(self):
        weights = LossWeights(sparsity=0, inverse_h=0, ranking=0)
        parts = {"recon": 3.5, "sparsity": 10.0, "inv_h": 2.0, "ranking": 1.0}
        assert total_loss(parts, weights) == pytest.approx(3.5)

    def test_single_term(self):
        weights = LossWeights(sparsity=1.0, inverse_h=0, ranking=0)
        parts = {"recon": 0.0, "sparsity": 7.25}
        assert total_loss(parts, weights) == pytest.approx(7.25)

    def test_default_weights_arithmetic(self):
        parts = {"recon": 1.0, "sparsity": 10.0, "inv_h": 0.5, "ranking": 1.4}
        weights = LossWeights(sparsity=0.01, inverse_h=0.01, ranking=0.01)
        assert total_loss(parts, weights) == pytest.approx(1.119)

    def test_non_finite_part_named(self):
        with pytest.raises(NumericError, match="sparsity"):
            total_loss({"recon": 1.0, "sparsity": np.inf}, LossWeights())

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            LossWeights(sparsity=-0.1)
