"""Training objectives over token states.

All objectives use natural logarithms.  Probabilities are floored at
LOG_FLOOR inside logs only, which is far below the 1e-6 row-sum
tolerance of the affinity matrices, so entropy values are unaffected at
float64 precision.

Each loss has a closed-form gradient (``grad_*``) with respect to the
token states it consumes; these are the same functions the trainer
backpropagates through and the finite-difference suite checks.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import DimensionError, NumericError
from .patches import MaskSpec, PatchGrid

LOG_FLOOR = 1e-12

RANK_PENALIZE_INCREASE = "penalize_increase"
RANK_PENALIZE_DECREASE = "penalize_decrease"
RANK_DIRECTIONS = (RANK_PENALIZE_INCREASE, RANK_PENALIZE_DECREASE)


@dataclasses.dataclass(frozen=True)
class AffinityMatrix:
    """Row-stochastic similarity matrix between two token sets."""

    values: np.ndarray
    row_index_set: np.ndarray
    col_index_set: np.ndarray


@dataclasses.dataclass(frozen=True)
class LossWeights:
    """Combination weights for the auxiliary objectives.

    epsilon is the zero-division guard inside the inverse-heterogeneity
    term.  Defaults put each weighted auxiliary term well below the
    reconstruction term at initialization on the default architecture.
    """

    sparsity: float = 0.01
    inverse_h: float = 0.01
    ranking: float = 0.01
    epsilon: float = 1e-6

    def __post_init__(self):
        if min(self.sparsity, self.inverse_h, self.ranking) < 0:
            raise ValueError("loss weights must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def _safe_log(p: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(p, LOG_FLOOR))


def _row_entropy(p: np.ndarray) -> np.ndarray:
    """Shannon entropy of each row of a row-stochastic matrix (nats)."""
    return -np.sum(p * _safe_log(p), axis=-1)


def row_softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax over the last axis."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_affinity(
    queries: np.ndarray,
    keys: np.ndarray,
    temperature: float | None = None,
    row_index_set: np.ndarray | None = None,
    col_index_set: np.ndarray | None = None,
) -> AffinityMatrix:
    """Row-wise softmax of the raw dot products queries @ keys.T.

    No temperature is applied by default; pass ``temperature`` to divide
    the logits before the softmax.
    """
    queries = np.asarray(queries, dtype=float)
    keys = np.asarray(keys, dtype=float)
    if queries.ndim != 2 or keys.ndim != 2:
        raise DimensionError("queries and keys must be 2-D token matrices")
    if queries.shape[1] != keys.shape[1]:
        raise DimensionError(
            f"token width mismatch: queries d={queries.shape[1]}, "
            f"keys d={keys.shape[1]}"
        )
    logits = queries @ keys.T
    if temperature is not None:
        logits = logits / temperature
    if row_index_set is None:
        row_index_set = np.arange(queries.shape[0])
    if col_index_set is None:
        col_index_set = np.arange(keys.shape[0])
    return AffinityMatrix(
        values=row_softmax(logits),
        row_index_set=np.asarray(row_index_set),
        col_index_set=np.asarray(col_index_set),
    )


def _split_states(states: np.ndarray, mask: MaskSpec) -> tuple[np.ndarray, np.ndarray]:
    states = np.asarray(states, dtype=float)
    if states.ndim != 2:
        raise DimensionError(f"token states must be 2-D, got shape {states.shape}")
    if states.shape[0] != mask.n_patches:
        raise DimensionError(
            f"states have {states.shape[0]} rows, mask covers {mask.n_patches} tokens"
        )
    return states[mask.masked_indices], states[mask.visible_indices]


def heterogeneity(states: np.ndarray, mask: MaskSpec) -> float:
    """Mean row entropy of the masked-to-visible affinity matrix.

    Bounded by [0, log V] where V is the visible-token count; high values
    mean masked tokens relate diffusely (indistinctly) to every visible
    token, low values mean they have locked onto specific visible tokens.
    """
    x_masked, x_visible = _split_states(states, mask)
    if x_masked.shape[0] == 0 or x_visible.shape[0] == 0:
        raise ValueError(
            "heterogeneity requires at least one masked and one visible token"
        )
    affinity = softmax_affinity(x_masked, x_visible)
    return float(_row_entropy(affinity.values).sum() / x_masked.shape[0])


def _entropy_logit_grad(p: np.ndarray) -> np.ndarray:
    """d(row entropy)/d(logits) for a row-stochastic ``p``.

    For e(p) = -sum p*log p with p = softmax(s):
    de/ds_j = p_j * (-log p_j - e).
    """
    e = _row_entropy(p)
    return p * (-_safe_log(p) - e[..., None])


def grad_heterogeneity(states: np.ndarray, mask: MaskSpec) -> np.ndarray:
    """Gradient of :func:`heterogeneity` with respect to the token states."""
    x_masked, x_visible = _split_states(states, mask)
    if x_masked.shape[0] == 0 or x_visible.shape[0] == 0:
        raise ValueError(
            "heterogeneity requires at least one masked and one visible token"
        )
    affinity = softmax_affinity(x_masked, x_visible)
    d_logits = _entropy_logit_grad(affinity.values) / x_masked.shape[0]
    grad = np.zeros_like(np.asarray(states, dtype=float))
    grad[mask.masked_indices] = d_logits @ x_visible
    grad[mask.visible_indices] = d_logits.T @ x_masked
    return grad


def reconstruction_loss(
    prediction: PatchGrid | np.ndarray,
    target: PatchGrid | np.ndarray,
    mask: MaskSpec,
) -> float:
    """Mean squared patch residual over the masked indices only."""
    pred = _patch_values(prediction)
    tgt = _patch_values(target)
    if pred.shape != tgt.shape:
        raise DimensionError(
            f"prediction shape {pred.shape} != target shape {tgt.shape}"
        )
    if mask.n_masked == 0:
        raise ValueError("reconstruction loss needs at least one masked patch")
    residual = pred[mask.masked_indices] - tgt[mask.masked_indices]
    return float(np.sum(residual**2) / mask.n_masked)


def grad_reconstruction_loss(
    prediction: PatchGrid | np.ndarray,
    target: PatchGrid | np.ndarray,
    mask: MaskSpec,
) -> np.ndarray:
    """Gradient of :func:`reconstruction_loss` with respect to the prediction."""
    pred = _patch_values(prediction)
    tgt = _patch_values(target)
    if mask.n_masked == 0:
        raise ValueError("reconstruction loss needs at least one masked patch")
    grad = np.zeros_like(pred)
    rows = mask.masked_indices
    grad[rows] = 2.0 * (pred[rows] - tgt[rows]) / mask.n_masked
    return grad


def _patch_values(grid: PatchGrid | np.ndarray) -> np.ndarray:
    if isinstance(grid, PatchGrid):
        return grid.patches
    return np.asarray(grid, dtype=float)


def sparsity_loss(states: np.ndarray, mask: MaskSpec) -> float:
    """Summed entropy of the visible rows of the full self-affinity map.

    Minimizing this sharpens each visible token's weight distribution, and
    (per the case analysis in :mod:`mimlab.oracle`) the minimum-entropy
    configurations put the dominant weight on visible-visible rather than
    visible-masked interactions.  Applies to the initial embedding.
    """
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[0] != mask.n_patches:
        raise DimensionError(
            f"states shape {states.shape} inconsistent with N={mask.n_patches}"
        )
    visible = mask.visible_indices
    if visible.size == 0:
        raise ValueError("sparsity loss requires at least one visible token")
    full = softmax_affinity(states, states)
    return float(_row_entropy(full.values[visible]).sum())


def grad_sparsity_loss(states: np.ndarray, mask: MaskSpec) -> np.ndarray:
    """Gradient of :func:`sparsity_loss` with respect to the token states.

    Gradient flows through both the query side (visible rows) and the key
    side (all tokens, masked included); masked tokens feel this loss
    purely as attended-to keys.
    """
    states = np.asarray(states, dtype=float)
    visible = mask.visible_indices
    if visible.size == 0:
        raise ValueError("sparsity loss requires at least one visible token")
    full = softmax_affinity(states, states)
    d_logits = np.zeros_like(full.values)
    d_logits[visible] = _entropy_logit_grad(full.values[visible])
    return d_logits @ states + d_logits.T @ states


def inverse_heterogeneity_loss(h0: float, epsilon: float) -> float:
    """1 / (h0 + epsilon): minimized by pushing depth-0 heterogeneity up."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if h0 < 0:
        raise ValueError(f"heterogeneity must be nonnegative, got {h0}")
    return 1.0 / (h0 + epsilon)


def grad_inverse_heterogeneity_loss(h0: float, epsilon: float) -> float:
    """d/dh0 of :func:`inverse_heterogeneity_loss`."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if h0 < 0:
        raise ValueError(f"heterogeneity must be nonnegative, got {h0}")
    return -1.0 / (h0 + epsilon) ** 2


def ranking_loss(
    profile_values: np.ndarray, direction: str = RANK_PENALIZE_INCREASE
) -> float:
    """Soft ranking penalty over a depth profile of heterogeneity values.

    ``penalize_increase`` (default) sums softplus(H[l] - H[l-1]) and so
    pushes the profile toward decreasing with depth; ``penalize_decrease``
    sums softplus(H[l-1] - H[l]), the mirrored form.
    """
    values = np.asarray(profile_values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("profile needs at least 2 entries (depth 0 plus one layer)")
    diffs = np.diff(values)
    if direction == RANK_PENALIZE_INCREASE:
        return float(np.logaddexp(0.0, diffs).sum())
    if direction == RANK_PENALIZE_DECREASE:
        return float(np.logaddexp(0.0, -diffs).sum())
    raise ValueError(f"unknown ranking direction: {direction!r}")


def grad_ranking_loss(
    profile_values: np.ndarray, direction: str = RANK_PENALIZE_INCREASE
) -> np.ndarray:
    """Gradient of :func:`ranking_loss` with respect to the profile values."""
    values = np.asarray(profile_values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("profile needs at least 2 entries (depth 0 plus one layer)")
    diffs = np.diff(values)
    if direction == RANK_PENALIZE_INCREASE:
        sig = _sigmoid(diffs)
    elif direction == RANK_PENALIZE_DECREASE:
        sig = -_sigmoid(-diffs)
    else:
        raise ValueError(f"unknown ranking direction: {direction!r}")
    grad = np.zeros_like(values)
    grad[1:] += sig
    grad[:-1] -= sig
    return grad


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


LOSS_PARTS = ("recon", "sparsity", "inv_h", "ranking")


def total_loss(parts: dict, weights: LossWeights) -> float:
    """Weighted combination: recon + w_spa*sparsity + w_inv*inv_h + w_rank*ranking.

    Parts absent from the dict count as zero (disabled objectives).
    """
    for name, value in parts.items():
        if not np.isfinite(value):
            raise NumericError(f"loss part {name!r} is non-finite: {value}")
    return float(
        parts.get("recon", 0.0)
        + weights.sparsity * parts.get("sparsity", 0.0)
        + weights.inverse_h * parts.get("inv_h", 0.0)
        + weights.ranking * parts.get("ranking", 0.0)
    )
