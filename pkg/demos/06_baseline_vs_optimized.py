"""Baseline pre-training versus masked-token optimization, paired seeds.

Trains the reconstruction-only baseline and the full auxiliary-objective
configuration from identical seeds on the synthetic corpus, then scores
the optimized run with the relative-AUC ratio over the late 80% of the
run.  A shortened schedule keeps this demo to a few minutes; the
acceptance suite runs the full-length version.

Writes curves and figures into demos/output/.
"""

import dataclasses
from pathlib import Path

from mimlab import rauc
from mimlab.plots import emit_plots
from mimlab.training import (
    DatasetConfig,
    ExperimentConfig,
    LossConfig,
    OptimizationConfig,
    OutputConfig,
    train,
)

out_dir = Path(__file__).parent / "output"
STEPS = 1500

config = ExperimentConfig(
    name="optimized",
    optimization=OptimizationConfig(steps=STEPS, batch_size=16, eval_every=150, seed=0),
    dataset=DatasetConfig(synthetic_count=256),
    output=OutputConfig(run_dir=str(out_dir / "optimized-run"), probe_batch=32),
)
baseline_config = dataclasses.replace(
    config,
    name="baseline",
    losses=LossConfig(
        enable_sparsity=False, enable_inverse_h=False, enable_ranking=False
    ),
    output=OutputConfig(run_dir=str(out_dir / "baseline-run"), probe_batch=32),
)

print(f"training baseline for {STEPS} steps...")
baseline = train(baseline_config)
print(f"training with auxiliary objectives for {STEPS} steps...")
optimized = train(config)

print(f"baseline  final held-out score: {baseline.final_score:.4f}")
print(f"optimized final held-out score: {optimized.final_score:.4f}")
value = rauc(baseline.curve, optimized.curve, 0.2 * STEPS, STEPS)
print(f"relative AUC over ({0.2 * STEPS:g}, {STEPS}): {value:.4f}"
      f"  ({'faster' if value > 1 else 'not faster'} than baseline)")

h0_first = optimized.profiles[0][1].values[0]
h0_last = optimized.profiles[-1][1].values[0]
print(f"depth-0 heterogeneity: {h0_first:.4f} at init -> {h0_last:.4f} trained")

figures = emit_plots([baseline, optimized], out_dir / "figures")
print(f"wrote {len(figures)} figures to {out_dir / 'figures'}")
