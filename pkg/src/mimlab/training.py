"""Config-driven training, evaluation, and the ablation runner.

A run optimizes the combined objective (reconstruction plus the enabled
auxiliary terms) with Adam under a warmup+cosine schedule, evaluates
masked-patch reconstruction on a held-out split at fixed intervals, and
writes an append-only :class:`RunRecord` with curves, per-step loss
parts, heterogeneity profiles, and checkpoints.  Runs are bit-replayable
in deterministic mode: every random stream derives from the seeds in the
config.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from pathlib import Path

import numpy as np
import yaml

from . import losses as L
from .analysis import HeterogeneityProfile, QuadrantMap, profile, quadrant_map
from .curves import TrainingCurve, rauc, read_curve_csv, write_curve_csv
from .errors import ConfigError, NumericError
from .model import (
    ArchitectureConfig,
    backward,
    forward_model,
    forward_trace,
    init_parameters,
    save_checkpoint,
)
from .patches import load_corpus, make_synthetic_images, patchify, sample_mask

logger = logging.getLogger(__name__)

RUN_ROOT_ENV = "MIMLAB_RUN_ROOT"

ABLATION_FLAG_ROWS = [
    (False, False, False),
    (True, False, False),
    (False, True, False),
    (False, False, True),
    (True, True, False),
    (True, False, True),
    (False, True, True),
    (True, True, True),
]


def _flag_row_name(flags: tuple[bool, bool, bool]) -> str:
    names = [n for n, on in zip(("sparsity", "inv_h", "ranking"), flags) if on]
    return "+".join(names) if names else "none"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class MaskingConfig:
    ratio: float = 0.6
    seed: int = 0


@dataclasses.dataclass(frozen=True)
class OptimizationConfig:
    steps: int = 5000
    batch_size: int = 16
    learning_rate: float = 1e-3
    schedule: str = "cosine"  # "cosine" or "constant"
    warmup_frac: float = 0.05
    seed: int = 0
    eval_every: int = 250
    grad_clip: float = 5.0
    deterministic: bool = True

    def __post_init__(self):
        if self.schedule not in ("cosine", "constant"):
            raise ConfigError(f"unknown schedule {self.schedule!r}")
        if self.steps < 1 or self.batch_size < 1 or self.eval_every < 1:
            raise ConfigError("steps, batch_size, and eval_every must be positive")


@dataclasses.dataclass(frozen=True)
class LossConfig:
    weights: L.LossWeights = dataclasses.field(default_factory=L.LossWeights)
    enable_sparsity: bool = True
    enable_inverse_h: bool = True
    enable_ranking: bool = True
    rank_direction: str = L.RANK_PENALIZE_INCREASE
    # Ranking pressure alone can push every profile entry to zero; below
    # this depth-0 heterogeneity the ranking gradient is dropped.
    guard_h_floor: float = 0.01

    def __post_init__(self):
        if self.rank_direction not in L.RANK_DIRECTIONS:
            raise ConfigError(f"unknown rank direction {self.rank_direction!r}")

    @property
    def flags(self) -> tuple[bool, bool, bool]:
        return (self.enable_sparsity, self.enable_inverse_h, self.enable_ranking)

    def with_flags(self, flags: tuple[bool, bool, bool]) -> "LossConfig":
        return dataclasses.replace(
            self,
            enable_sparsity=flags[0],
            enable_inverse_h=flags[1],
            enable_ranking=flags[2],
        )


@dataclasses.dataclass(frozen=True)
class DatasetConfig:
    path: str | None = None  # raw tensor file or image directory; None = synthetic
    synthetic_count: int = 256
    synthetic_seed: int = 0
    holdout_fraction: float = 0.125

    def __post_init__(self):
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ConfigError("holdout_fraction must be in (0, 1)")


@dataclasses.dataclass(frozen=True)
class OutputConfig:
    run_dir: str | None = None
    checkpoint_every: int = 0  # 0 = only initial and final
    probe_batch: int = 16


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    name: str = "run"
    architecture: ArchitectureConfig = dataclasses.field(
        default_factory=ArchitectureConfig
    )
    masking: MaskingConfig = dataclasses.field(default_factory=MaskingConfig)
    optimization: OptimizationConfig = dataclasses.field(
        default_factory=OptimizationConfig
    )
    losses: LossConfig = dataclasses.field(default_factory=LossConfig)
    dataset: DatasetConfig = dataclasses.field(default_factory=DatasetConfig)
    output: OutputConfig = dataclasses.field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        loss_block = dict(d.get("losses", {}))
        if "weights" in loss_block:
            loss_block["weights"] = L.LossWeights(**loss_block["weights"])
        return cls(
            name=d.get("name", "run"),
            architecture=ArchitectureConfig(**d.get("architecture", {})),
            masking=MaskingConfig(**d.get("masking", {})),
            optimization=OptimizationConfig(**d.get("optimization", {})),
            losses=LossConfig(**loss_block),
            dataset=DatasetConfig(**d.get("dataset", {})),
            output=OutputConfig(**d.get("output", {})),
        )

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path} does not contain a mapping")
        config = cls.from_dict(raw)
        if config.dataset.path is not None and not Path(config.dataset.path).exists():
            raise ConfigError(f"dataset path does not exist: {config.dataset.path}")
        return config

    def to_yaml(self, path) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=False))

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    def resolve_run_dir(self) -> Path:
        if self.output.run_dir is not None:
            return Path(self.output.run_dir)
        root = Path(os.environ.get(RUN_ROOT_ENV, "runs"))
        return root / f"{self.name}-{self.config_hash()}"


# ---------------------------------------------------------------------------
# run record
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class RunRecord:
    """Append-only account of one training run."""

    config: ExperimentConfig
    config_hash: str
    method_name: str
    steps: list[int] = dataclasses.field(default_factory=list)
    loss_parts: dict[str, list[float]] = dataclasses.field(
        default_factory=lambda: {k: [] for k in (*L.LOSS_PARTS, "total", "lr")}
    )
    curve: TrainingCurve | None = None
    profiles: list[tuple[int, HeterogeneityProfile]] = dataclasses.field(
        default_factory=list
    )
    quadrants: list[QuadrantMap] = dataclasses.field(default_factory=list)
    checkpoint_paths: list[str] = dataclasses.field(default_factory=list)
    guard_events: list[dict] = dataclasses.field(default_factory=list)
    aborted: bool = False

    @property
    def final_score(self) -> float:
        if self.curve is None:
            return float("nan")
        return float(self.curve.scores[-1])

    def save(self, run_dir: Path) -> None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        self.config.to_yaml(run_dir / "config.yaml")
        meta = {
            "config_hash": self.config_hash,
            "method_name": self.method_name,
            "aborted": self.aborted,
            "final_score": self.final_score if self.curve is not None else None,
            "checkpoint_paths": self.checkpoint_paths,
            "guard_events": self.guard_events,
            "profile_steps": [int(s) for s, _ in self.profiles],
        }
        (run_dir / "record.json").write_text(json.dumps(meta, indent=2))
        header = ",".join(["step", *L.LOSS_PARTS, "total", "lr"])
        rows = [header]
        for i, step in enumerate(self.steps):
            vals = [f"{self.loss_parts[k][i]:.10g}" for k in (*L.LOSS_PARTS, "total", "lr")]
            rows.append(",".join([str(step), *vals]))
        (run_dir / "losses.csv").write_text("\n".join(rows) + "\n")
        if self.curve is not None:
            write_curve_csv(run_dir / "curve.csv", self.curve)
        prof_rows = ["step,depth,H"]
        for step, prof in self.profiles:
            for depth, h in enumerate(prof.values):
                prof_rows.append(f"{step},{depth},{h:.10g}")
        (run_dir / "profiles.csv").write_text("\n".join(prof_rows) + "\n")
        if self.quadrants:
            qdir = run_dir / "quadrants"
            qdir.mkdir(exist_ok=True)
            for depth, qmap in enumerate(self.quadrants):
                np.savetxt(qdir / f"depth{depth}.csv", qmap.matrix, delimiter=",",
                           fmt="%.8g")

    @classmethod
    def load(cls, run_dir: Path) -> "RunRecord":
        run_dir = Path(run_dir)
        config = ExperimentConfig.from_dict(
            yaml.safe_load((run_dir / "config.yaml").read_text())
        )
        meta = json.loads((run_dir / "record.json").read_text())
        record = cls(
            config=config,
            config_hash=meta["config_hash"],
            method_name=meta["method_name"],
            checkpoint_paths=meta.get("checkpoint_paths", []),
            guard_events=meta.get("guard_events", []),
            aborted=meta.get("aborted", False),
        )
        if (run_dir / "curve.csv").exists():
            record.curve = read_curve_csv(run_dir / "curve.csv", config.name)
        loss_rows = (run_dir / "losses.csv").read_text().strip().splitlines()
        keys = loss_rows[0].split(",")[1:]
        for row in loss_rows[1:]:
            vals = row.split(",")
            record.steps.append(int(vals[0]))
            for key, val in zip(keys, vals[1:]):
                record.loss_parts.setdefault(key, []).append(float(val))
        prof_rows = (run_dir / "profiles.csv").read_text().strip().splitlines()[1:]
        by_step: dict[int, dict[int, float]] = {}
        for row in prof_rows:
            s, depth, h = row.split(",")
            by_step.setdefault(int(s), {})[int(depth)] = float(h)
        for s in sorted(by_step):
            vals = np.array([by_step[s][d] for d in sorted(by_step[s])])
            record.profiles.append(
                (s, HeterogeneityProfile(values=vals, routing=config.architecture.routing))
            )
        qdir = run_dir / "quadrants"
        if qdir.exists():
            for f in sorted(qdir.glob("depth*.csv")):
                matrix = np.loadtxt(f, delimiter=",")
                record.quadrants.append(
                    QuadrantMap(matrix=matrix, ordering=np.arange(matrix.shape[0]),
                                quadrant_means=(np.nan,) * 4, n_masked=0)
                )
        return record


# ---------------------------------------------------------------------------
# optimizer
# ---------------------------------------------------------------------------


class Adam:
    def __init__(self, params: dict, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict, lr: float) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            params[name] -= lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def learning_rate_at(opt: OptimizationConfig, step: int) -> float:
    if opt.schedule == "constant":
        return opt.learning_rate
    warmup = max(1, int(round(opt.warmup_frac * opt.steps)))
    if step < warmup:
        return opt.learning_rate * (step + 1) / warmup
    frac = (step - warmup) / max(1, opt.steps - warmup)
    return opt.learning_rate * 0.5 * (1.0 + np.cos(np.pi * frac))


def clip_gradients(grads: dict, max_norm: float) -> float:
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm > 0 and total > max_norm:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return total


# ---------------------------------------------------------------------------
# data handling
# ---------------------------------------------------------------------------


def load_dataset(config: ExperimentConfig) -> np.ndarray:
    ds = config.dataset
    arch = config.architecture
    if ds.path is None:
        images = make_synthetic_images(
            ds.synthetic_count, arch.image_height, arch.image_width, ds.synthetic_seed
        )
    else:
        images = load_corpus(ds.path)
    if images.shape[1] != arch.image_height or images.shape[2] != arch.image_width:
        raise ConfigError(
            f"dataset images are {images.shape[1]}x{images.shape[2]}, architecture "
            f"expects {arch.image_height}x{arch.image_width}"
        )
    return images


def split_dataset(
    images: np.ndarray, holdout_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic shuffled split into (train, holdout)."""
    order = np.random.default_rng(seed).permutation(len(images))
    n_hold = max(1, int(round(holdout_fraction * len(images))))
    hold = order[:n_hold]
    train = order[n_hold:]
    if train.size == 0:
        raise ConfigError("holdout fraction leaves no training images")
    return images[train], images[hold]


def _patchify_all(images: np.ndarray, patch_size: int) -> np.ndarray:
    return np.stack([patchify(im, patch_size).patches for im in images])


# ---------------------------------------------------------------------------
# loss assembly
# ---------------------------------------------------------------------------


def batch_objective(trace, prediction, grids, masks, loss_cfg: LossConfig):
    """Loss parts and state/prediction gradients for one batch.

    Per-image losses are averaged over the batch; disabled parts are
    recorded as zero and contribute no gradient.  Returns
    (parts, d_prediction, d_states, mean_h0, guard_engaged).
    """
    weights = loss_cfg.weights
    n_img = prediction.shape[0]
    n_states = len(trace.states)
    parts = {k: 0.0 for k in L.LOSS_PARTS}
    d_pred = np.zeros_like(prediction)
    d_states = [np.zeros_like(s) for s in trace.states]
    need_profile = loss_cfg.enable_inverse_h or loss_cfg.enable_ranking

    h0_values = []
    ranking_guard = False
    for b in range(n_img):
        mask = masks[b]
        parts["recon"] += L.reconstruction_loss(prediction[b], grids[b], mask) / n_img
        d_pred[b] = L.grad_reconstruction_loss(prediction[b], grids[b], mask) / n_img

        if loss_cfg.enable_sparsity:
            x0 = trace.states[0][b]
            parts["sparsity"] += L.sparsity_loss(x0, mask) / n_img
            d_states[0][b] += weights.sparsity * L.grad_sparsity_loss(x0, mask) / n_img

        if need_profile:
            prof = np.array(
                [L.heterogeneity(trace.states[l][b], mask) for l in range(n_states)]
            )
            h0_values.append(prof[0])
            if loss_cfg.enable_inverse_h:
                parts["inv_h"] += (
                    L.inverse_heterogeneity_loss(prof[0], weights.epsilon) / n_img
                )
                scale = (
                    weights.inverse_h
                    * L.grad_inverse_heterogeneity_loss(prof[0], weights.epsilon)
                    / n_img
                )
                d_states[0][b] += scale * L.grad_heterogeneity(trace.states[0][b], mask)
            if loss_cfg.enable_ranking:
                parts["ranking"] += (
                    L.ranking_loss(prof, loss_cfg.rank_direction) / n_img
                )
                if prof[0] < loss_cfg.guard_h_floor:
                    ranking_guard = True  # drop collapse-inducing gradient
                else:
                    coef = L.grad_ranking_loss(prof, loss_cfg.rank_direction)
                    for l in range(n_states):
                        if coef[l] != 0.0:
                            d_states[l][b] += (
                                weights.ranking
                                * coef[l]
                                * L.grad_heterogeneity(trace.states[l][b], mask)
                                / n_img
                            )
    mean_h0 = float(np.mean(h0_values)) if h0_values else float("nan")
    return parts, d_pred, d_states, mean_h0, ranking_guard


def evaluate_reconstruction(
    params, config: ExperimentConfig, holdout_grids, holdout_masks, batch_size=32
) -> float:
    """Mean masked-patch reconstruction error on the held-out split."""
    arch = config.architecture
    errors = []
    for start in range(0, len(holdout_grids), batch_size):
        grids = holdout_grids[start : start + batch_size]
        masks = holdout_masks[start : start + batch_size]
        trace, pred, _ = forward_model(grids, masks, params, arch)
        for b in range(len(grids)):
            errors.append(L.reconstruction_loss(pred[b], grids[b], masks[b]))
    return float(np.mean(errors))


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


def train(config: ExperimentConfig, save_outputs: bool = True) -> RunRecord:
    """Run one experiment; returns (and optionally persists) its record.

    The held-out evaluation score is the negated masked-patch
    reconstruction error, so higher is better and the curve feeds the
    relative-AUC metric directly.
    """
    opt = config.optimization
    arch = config.architecture
    if opt.deterministic:
        root = np.random.SeedSequence(opt.seed)
    else:
        root = np.random.SeedSequence()
    init_ss, data_ss, mask_ss = root.spawn(3)

    images = load_dataset(config)
    train_images, holdout_images = split_dataset(
        images, config.dataset.holdout_fraction, seed=opt.seed
    )
    train_grids = _patchify_all(train_images, arch.patch_size)
    holdout_grids = _patchify_all(holdout_images, arch.patch_size)
    n = arch.n_patches
    ratio = config.masking.ratio
    holdout_masks = [
        sample_mask(n, ratio, config.masking.seed + 100_000 + i)
        for i in range(len(holdout_grids))
    ]
    probe_count = min(config.output.probe_batch, len(holdout_grids))
    probe_grids = holdout_grids[:probe_count]
    probe_masks = holdout_masks[:probe_count]

    params = init_parameters(arch, seed=init_ss.generate_state(1)[0])
    optimizer = Adam(params)
    data_rng = np.random.default_rng(data_ss)
    mask_rng = np.random.default_rng(mask_ss)

    run_dir = config.resolve_run_dir()
    record = RunRecord(
        config=config, config_hash=config.config_hash(), method_name=config.name
    )
    ckpt_dir = run_dir / "checkpoints"
    if save_outputs:
        ckpt_dir.mkdir(parents=True, exist_ok=True)

    def checkpoint(tag: str, step: int):
        if not save_outputs:
            return
        path = ckpt_dir / f"{tag}.npz"
        save_checkpoint(
            path, params, arch,
            meta={"step": step, "config_hash": record.config_hash,
                  "method_name": record.method_name},
        )
        if str(path) not in record.checkpoint_paths:
            record.checkpoint_paths.append(str(path))

    curve_epochs: list[float] = []
    curve_scores: list[float] = []

    def run_eval(step: int):
        error = evaluate_reconstruction(params, config, holdout_grids, holdout_masks)
        curve_epochs.append(float(step))
        curve_scores.append(-error)
        trace = forward_trace(probe_grids, probe_masks, params, arch)
        prof = profile(
            trace,
            checkpoint_id=f"step{step}",
            batch_descriptor=(
                f"holdout probe={probe_count} ratio={ratio} "
                f"mask_seed_base={config.masking.seed + 100_000}"
            ),
        )
        record.profiles.append((step, prof))
        logger.info(
            "%s step %d: eval score %.5f, H0 %.4f",
            config.name, step, -error, prof.values[0],
        )
        return trace

    checkpoint("step0", 0)
    run_eval(0)

    epoch_order = np.array([], dtype=int)
    aborted = False
    for step in range(opt.steps):
        if epoch_order.size < opt.batch_size:
            epoch_order = data_rng.permutation(len(train_grids))
        batch_idx, epoch_order = (
            epoch_order[: opt.batch_size],
            epoch_order[opt.batch_size :],
        )
        grids = train_grids[batch_idx]
        seeds = mask_rng.integers(0, 2**31, size=len(batch_idx))
        masks = [sample_mask(n, ratio, int(s)) for s in seeds]

        try:
            trace, pred, cache = forward_model(grids, masks, params, arch)
        except NumericError as exc:
            record.guard_events.append(
                {"step": step, "kind": "non_finite_forward", "detail": str(exc)}
            )
            aborted = True
            checkpoint("abort", step)
            logger.error("%s: %s at step %d, aborting", config.name, exc, step)
            break
        parts, d_pred, d_states, mean_h0, guard = batch_objective(
            trace, pred, grids, masks, config.losses
        )
        total = L.total_loss(parts, config.losses.weights)
        if not np.isfinite(total):
            record.guard_events.append(
                {"step": step, "kind": "non_finite_loss", "parts": parts}
            )
            aborted = True
            checkpoint("abort", step)
            logger.error("%s: non-finite loss at step %d, aborting", config.name, step)
            break
        if guard:
            record.guard_events.append(
                {"step": step, "kind": "ranking_guard", "h0": mean_h0}
            )

        grads = backward(cache, params, d_prediction=d_pred, d_states=d_states)
        grad_norm = clip_gradients(grads, opt.grad_clip)
        if not np.isfinite(grad_norm):
            record.guard_events.append({"step": step, "kind": "non_finite_grad"})
            aborted = True
            checkpoint("abort", step)
            logger.error("%s: non-finite gradient at step %d, aborting", config.name, step)
            break
        lr = learning_rate_at(opt, step)
        optimizer.step(params, grads, lr)

        record.steps.append(step)
        for key in L.LOSS_PARTS:
            record.loss_parts[key].append(parts[key])
        record.loss_parts["total"].append(total)
        record.loss_parts["lr"].append(lr)

        done = step + 1
        if done % opt.eval_every == 0 or done == opt.steps:
            run_eval(done)
            if (
                config.output.checkpoint_every
                and done % config.output.checkpoint_every == 0
                and done != opt.steps
            ):
                checkpoint(f"step{done}", done)

    record.aborted = aborted
    if len(curve_epochs) >= 2:
        record.curve = TrainingCurve(
            epochs=np.asarray(curve_epochs),
            scores=np.asarray(curve_scores),
            method_name=config.name,
        )
    if not aborted:
        final_trace = forward_trace(probe_grids, probe_masks, params, arch)
        record.quadrants = [
            quadrant_map(final_trace.states[depth][0], probe_masks[0])
            for depth in range(len(final_trace.states))
        ]
        checkpoint("final", opt.steps)
    if save_outputs:
        record.save(run_dir)
    return record


# ---------------------------------------------------------------------------
# ablation
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class AblationReport:
    rows: list[dict]
    window: tuple[float, float]

    def to_text(self) -> str:
        lines = [
            f"ablation over loss flags; RAUC window {self.window}",
            f"{'row':<28}{'final_score':>14}{'rauc_vs_none':>14}"
            f"{'guards':>8}{'aborted':>9}{'note':>22}",
        ]
        for row in self.rows:
            rauc_txt = (
                f"{row['rauc_vs_none']:.4f}" if row["rauc_vs_none"] is not None else "-"
            )
            lines.append(
                f"{row['name']:<28}{row['final_score']:>14.5f}{rauc_txt:>14}"
                f"{row['guard_events']:>8}{str(row['aborted']):>9}"
                f"{row.get('note', ''):>22}"
            )
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps({"window": self.window, "rows": self.rows}, indent=2)


def run_ablation(config: ExperimentConfig, save_outputs: bool = True) -> AblationReport:
    """Train the 8-row enable-flag matrix with shared seeds.

    Every row reuses the base config's seeds, so rows differ only in
    which auxiliary objectives are active.  Reports per-row final scores
    and relative AUC against the all-off row over the late 80% of the
    run.  The ranking-only row is flagged stability-sensitive: on its
    own, the ranking objective can drive all heterogeneity to zero, so
    the collapse guard is expected to engage there if anywhere.
    """
    base_dir = config.resolve_run_dir()
    records: list[RunRecord] = []
    for flags in ABLATION_FLAG_ROWS:
        name = _flag_row_name(flags)
        row_config = dataclasses.replace(
            config,
            name=f"{config.name}-{name}",
            losses=config.losses.with_flags(flags),
            output=dataclasses.replace(
                config.output, run_dir=str(base_dir / f"ablation_{name}")
            ),
        )
        logger.info("ablation row %s", name)
        records.append(train(row_config, save_outputs=save_outputs))

    baseline = records[0]
    e1 = 0.2 * config.optimization.steps
    e2 = float(config.optimization.steps)
    rows = []
    for flags, rec in zip(ABLATION_FLAG_ROWS, records):
        name = _flag_row_name(flags)
        value = None
        if rec is not baseline and not rec.aborted and not baseline.aborted:
            value = rauc(baseline.curve, rec.curve, e1, e2)
        row = {
            "name": name,
            "flags": {
                "sparsity": flags[0], "inv_h": flags[1], "ranking": flags[2],
            },
            "final_score": rec.final_score,
            "rauc_vs_none": value,
            "guard_events": len(rec.guard_events),
            "aborted": rec.aborted,
            "config_hash": rec.config_hash,
        }
        if flags == (False, False, True):
            row["note"] = "stability-sensitive"
        rows.append(row)
    report = AblationReport(rows=rows, window=(e1, e2))
    if save_outputs:
        base_dir.mkdir(parents=True, exist_ok=True)
        (base_dir / "ablation_report.json").write_text(report.to_json())
        (base_dir / "ablation_report.txt").write_text(report.to_text() + "\n")
    return report


# ---------------------------------------------------------------------------
# loss-weight grid search
# ---------------------------------------------------------------------------


def grid_search_weights(
    config: ExperimentConfig, values: list[float], save_outputs: bool = False
) -> list[dict]:
    """One-dimensional sweep setting all three auxiliary weights to each value.

    Each candidate trains with shared seeds and is scored by relative AUC
    against the all-off baseline over the late 80% of the run.
    """
    baseline_config = dataclasses.replace(
        config,
        name=f"{config.name}-gridbase",
        losses=config.losses.with_flags((False, False, False)),
    )
    baseline = train(baseline_config, save_outputs=save_outputs)
    e1, e2 = 0.2 * config.optimization.steps, float(config.optimization.steps)
    results = []
    for value in values:
        weights = dataclasses.replace(
            config.losses.weights, sparsity=value, inverse_h=value, ranking=value
        )
        candidate = dataclasses.replace(
            config,
            name=f"{config.name}-grid{value:g}",
            losses=dataclasses.replace(config.losses, weights=weights),
        )
        rec = train(candidate, save_outputs=save_outputs)
        results.append(
            {
                "weight": value,
                "final_score": rec.final_score,
                "rauc_vs_baseline": rauc(baseline.curve, rec.curve, e1, e2),
                "aborted": rec.aborted,
            }
        )
    return results
