"""Per-layer heterogeneity profiles, affinity quadrant maps, and
checkpoint comparison reports."""

from __future__ import annotations

import dataclasses
import warnings
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .losses import heterogeneity, softmax_affinity
from .model import LayerTrace, forward_trace, load_checkpoint
from .patches import MaskSpec, patchify, sample_mask

DEFAULT_ANALYSIS_BATCH = 64


@dataclasses.dataclass(frozen=True)
class HeterogeneityProfile:
    """Depth profile H^0..H^L of one traced forward pass.

    Entry 0 is the initial embedding; batch traces store the per-depth
    mean over images.  Depths that had no masked/visible split are
    recorded in skipped_depths and hold NaN in values.
    """

    values: np.ndarray
    routing: str
    checkpoint_id: str = ""
    batch_descriptor: str = ""
    skipped_depths: tuple[int, ...] = ()

    @property
    def n_layers(self) -> int:
        return len(self.values) - 1


@dataclasses.dataclass(frozen=True)
class QuadrantMap:
    """Masked-first reordering of the full self-affinity map.

    quadrant_means are taken before min-max normalization, in the order
    (masked-masked, masked-visible, visible-masked, visible-visible).
    A constant matrix normalizes to all 0.5.
    """

    matrix: np.ndarray
    ordering: np.ndarray
    quadrant_means: tuple[float, float, float, float]
    n_masked: int


def profile(
    trace: LayerTrace, checkpoint_id: str = "", batch_descriptor: str = ""
) -> HeterogeneityProfile:
    """Layer-wise heterogeneity, averaged over the images in the trace."""
    values = []
    skipped = []
    for depth, states in enumerate(trace.states):
        per_image = []
        for b in range(states.shape[0]):
            mask = trace.masks[b]
            if mask.n_masked == 0 or mask.n_masked == mask.n_patches:
                continue
            per_image.append(heterogeneity(states[b], mask))
        if per_image:
            values.append(float(np.mean(per_image)))
        else:
            warnings.warn(
                f"depth {depth}: no masked/visible split available, skipping",
                stacklevel=2,
            )
            skipped.append(depth)
            values.append(float("nan"))
    return HeterogeneityProfile(
        values=np.asarray(values),
        routing=trace.routing,
        checkpoint_id=checkpoint_id,
        batch_descriptor=batch_descriptor,
        skipped_depths=tuple(skipped),
    )


def quadrant_map(states: np.ndarray, mask: MaskSpec) -> QuadrantMap:
    """Full self-affinity map re-indexed masked-first and min-max normalized."""
    states = np.asarray(states, dtype=float)
    if mask.n_masked == 0 or mask.n_masked == mask.n_patches:
        raise ValueError(
            "quadrant map needs at least one masked and one visible token"
        )
    full = softmax_affinity(states, states).values
    order = np.concatenate([mask.masked_indices, mask.visible_indices])
    reordered = full[np.ix_(order, order)]
    m = mask.n_masked
    means = (
        float(reordered[:m, :m].mean()),
        float(reordered[:m, m:].mean()),
        float(reordered[m:, :m].mean()),
        float(reordered[m:, m:].mean()),
    )
    lo, hi = reordered.min(), reordered.max()
    if hi - lo < 1e-15:
        normalized = np.full_like(reordered, 0.5)
    else:
        normalized = (reordered - lo) / (hi - lo)
    return QuadrantMap(
        matrix=normalized, ordering=order, quadrant_means=means, n_masked=m
    )


def monotonicity_score(values) -> float:
    """Fraction of adjacent depth pairs with H[l] <= H[l-1]."""
    if isinstance(values, HeterogeneityProfile):
        values = values.values
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size < 2:
        raise ValueError("monotonicity score needs at least 2 profile entries")
    diffs = np.diff(values)
    return float(np.mean(diffs <= 0))


@dataclasses.dataclass(frozen=True)
class CheckpointComparison:
    early_profile: HeterogeneityProfile
    late_profile: HeterogeneityProfile
    early_score: float
    late_score: float

    @property
    def score_difference(self) -> float:
        return self.late_score - self.early_score

    def to_text(self) -> str:
        lines = [
            f"early checkpoint: {self.early_profile.checkpoint_id}",
            f"  profile: {np.array2string(self.early_profile.values, precision=4)}",
            f"  monotonicity score: {self.early_score:.4f}",
            f"late checkpoint: {self.late_profile.checkpoint_id}",
            f"  profile: {np.array2string(self.late_profile.values, precision=4)}",
            f"  monotonicity score: {self.late_score:.4f}",
            f"score difference (late - early): {self.score_difference:.4f}",
            f"batch: {self.early_profile.batch_descriptor}",
        ]
        return "\n".join(lines)


def trace_images(
    images: np.ndarray,
    config,
    params: dict,
    ratio: float,
    mask_seed: int,
) -> LayerTrace:
    """Patchify a (B, H, W, 3) image batch and trace it with per-image masks."""
    grids = np.stack([patchify(im, config.patch_size).patches for im in images])
    masks = [
        sample_mask(config.n_patches, ratio, mask_seed + i)
        for i in range(len(images))
    ]
    return forward_trace(grids, masks, params, config)


def compare_checkpoints(
    early_path,
    late_path,
    images: np.ndarray,
    ratio: float = 0.6,
    mask_seed: int = 0,
) -> CheckpointComparison:
    """Profile two checkpoints of one architecture on a shared batch."""
    early_cfg, early_params, _ = load_checkpoint(early_path)
    late_cfg, late_params, _ = load_checkpoint(late_path)
    if early_cfg != late_cfg:
        raise ConfigError(
            f"architecture mismatch between {early_path} and {late_path}"
        )
    descriptor = f"batch={len(images)} ratio={ratio} mask_seed={mask_seed}"
    out = []
    for path, params in ((early_path, early_params), (late_path, late_params)):
        trace = trace_images(images, early_cfg, params, ratio, mask_seed)
        out.append(profile(trace, checkpoint_id=str(path), batch_descriptor=descriptor))
    early_profile, late_profile = out
    return CheckpointComparison(
        early_profile=early_profile,
        late_profile=late_profile,
        early_score=monotonicity_score(early_profile),
        late_score=monotonicity_score(late_profile),
    )


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def export_profile_csv(
    path, prof: HeterogeneityProfile, quadrants: list[QuadrantMap] | None = None
) -> None:
    """CSV with one row per depth: depth, H, and quadrant means if given."""
    header = "depth,H"
    if quadrants is not None:
        header += ",q1_masked_masked,q2_masked_visible,q3_visible_masked,q4_visible_visible"
    lines = [header]
    for depth, h in enumerate(prof.values):
        row = f"{depth},{h:.10g}"
        if quadrants is not None:
            row += "," + ",".join(f"{m:.10g}" for m in quadrants[depth].quadrant_means)
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n")


def export_quadrant_csv(path, qmap: QuadrantMap) -> None:
    np.savetxt(path, qmap.matrix, delimiter=",", fmt="%.8g")


def export_quadrant_image(path, qmap: QuadrantMap) -> None:
    """Grayscale raster of the normalized affinity map."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.imsave(path, qmap.matrix, cmap="gray", vmin=0.0, vmax=1.0)
