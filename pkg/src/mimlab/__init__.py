"""Desk-scale laboratory for masked-image-modeling pre-training."""

from .errors import (
    ConfigError,
    DegenerateBaselineError,
    DimensionError,
    NumericError,
)
from .patches import (
    MaskSpec,
    PatchGrid,
    make_synthetic_images,
    patchify,
    sample_mask,
    unpatchify,
)
from .losses import (
    AffinityMatrix,
    LossWeights,
    heterogeneity,
    inverse_heterogeneity_loss,
    ranking_loss,
    reconstruction_loss,
    softmax_affinity,
    sparsity_loss,
    total_loss,
)
from .oracle import CaseEntropyReport, entropy_case_oracle
from .model import (
    ArchitectureConfig,
    LayerTrace,
    embed,
    forward_trace,
    init_parameters,
    load_checkpoint,
    predict_pixels,
    save_checkpoint,
)
from .analysis import (
    HeterogeneityProfile,
    QuadrantMap,
    compare_checkpoints,
    monotonicity_score,
    profile,
    quadrant_map,
)
from .curves import TrainingCurve, interpolate, rauc
from .training import ExperimentConfig, RunRecord, run_ablation, train

__version__ = "0.1.0"

__all__ = [
    "AffinityMatrix",
    "ArchitectureConfig",
    "CaseEntropyReport",
    "ConfigError",
    "DegenerateBaselineError",
    "DimensionError",
    "ExperimentConfig",
    "HeterogeneityProfile",
    "LayerTrace",
    "LossWeights",
    "MaskSpec",
    "NumericError",
    "PatchGrid",
    "QuadrantMap",
    "RunRecord",
    "TrainingCurve",
    "compare_checkpoints",
    "embed",
    "entropy_case_oracle",
    "forward_trace",
    "heterogeneity",
    "init_parameters",
    "interpolate",
    "inverse_heterogeneity_loss",
    "load_checkpoint",
    "make_synthetic_images",
    "monotonicity_score",
    "patchify",
    "predict_pixels",
    "profile",
    "quadrant_map",
    "ranking_loss",
    "rauc",
    "reconstruction_loss",
    "run_ablation",
    "sample_mask",
    "save_checkpoint",
    "softmax_affinity",
    "sparsity_loss",
    "total_loss",
    "train",
    "unpatchify",
]
