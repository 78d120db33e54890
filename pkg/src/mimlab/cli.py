"""Command-line entry points.

Subcommands: pretrain, analyze, rauc, prove, ablate, plot, grid.
Run ``mimlab <subcommand> -h`` for the options of each.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, oracle
from .curves import rauc, read_curve_csv
from .model import load_checkpoint
from .patches import load_corpus
from .plots import emit_plots
from .training import (
    ExperimentConfig,
    RunRecord,
    grid_search_weights,
    run_ablation,
    train,
)


def _add_pretrain(sub):
    p = sub.add_parser("pretrain", help="train one run from a config file")
    p.add_argument("--config", required=True, help="experiment config (YAML)")
    p.add_argument("--no-plots", action="store_true", help="skip figure emission")
    p.set_defaults(func=_cmd_pretrain)


def _cmd_pretrain(args) -> int:
    config = ExperimentConfig.from_yaml(args.config)
    record = train(config)
    run_dir = config.resolve_run_dir()
    if not args.no_plots:
        emit_plots([record], run_dir / "plots")
    status = "aborted" if record.aborted else "finished"
    print(f"{record.method_name} {status}: final score {record.final_score:.5f}")
    print(f"outputs in {run_dir}")
    return 1 if record.aborted else 0


def _add_analyze(sub):
    p = sub.add_parser(
        "analyze", help="heterogeneity profile and quadrant maps of a checkpoint"
    )
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="image directory or raw tensor file")
    p.add_argument("--ratio", type=float, default=0.6, help="masking ratio")
    p.add_argument("--mask-seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=64, help="images to analyze")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument(
        "--compare", default=None, help="optional earlier checkpoint to compare against"
    )
    p.set_defaults(func=_cmd_analyze)


def _cmd_analyze(args) -> int:
    config, params, meta = load_checkpoint(args.checkpoint)
    images = load_corpus(args.data)[: args.batch]
    out = Path(args.out) if args.out else Path(args.checkpoint).parent / "analysis"
    out.mkdir(parents=True, exist_ok=True)

    trace = analysis.trace_images(images, config, params, args.ratio, args.mask_seed)
    descriptor = f"data={args.data} batch={len(images)} ratio={args.ratio} mask_seed={args.mask_seed}"
    prof = analysis.profile(trace, checkpoint_id=str(args.checkpoint),
                            batch_descriptor=descriptor)
    qmaps = [
        analysis.quadrant_map(trace.states[depth][0], trace.masks[0])
        for depth in range(len(trace.states))
    ]
    analysis.export_profile_csv(out / "profile.csv", prof, qmaps)
    for depth, qmap in enumerate(qmaps):
        analysis.export_quadrant_csv(out / f"quadrant_depth{depth}.csv", qmap)
        analysis.export_quadrant_image(out / f"quadrant_depth{depth}.png", qmap)

    lines = [
        f"checkpoint: {args.checkpoint} (meta: {meta})",
        f"batch: {descriptor}",
        f"profile H^0..H^L: {np.array2string(prof.values, precision=4)}",
        f"monotonicity score: {analysis.monotonicity_score(prof):.4f}",
    ]
    if args.compare:
        comparison = analysis.compare_checkpoints(
            args.compare, args.checkpoint, images, args.ratio, args.mask_seed
        )
        lines.append("")
        lines.append(comparison.to_text())
    report = "\n".join(lines)
    (out / "report.txt").write_text(report + "\n")
    print(report)
    print(f"analysis written to {out}")
    return 0


def _add_rauc(sub):
    p = sub.add_parser("rauc", help="relative AUC of curve2 against curve1")
    p.add_argument("curve1", help="baseline curve CSV (epoch,score)")
    p.add_argument("curve2", help="target curve CSV (epoch,score)")
    p.add_argument("--e1", type=float, required=True, help="window start epoch")
    p.add_argument("--e2", type=float, required=True, help="window end epoch")
    p.set_defaults(func=_cmd_rauc)


def _cmd_rauc(args) -> int:
    s1 = read_curve_csv(args.curve1)
    s2 = read_curve_csv(args.curve2)
    print(f"{rauc(s1, s2, args.e1, args.e2):.4f}")
    return 0


def _add_prove(sub):
    p = sub.add_parser(
        "prove", help="entropy case analysis for affinity-row configurations"
    )
    p.add_argument("--n", type=int, default=None, help="masked count (omit to sweep)")
    p.add_argument("--N", type=int, default=None, dest="total",
                   help="total token count (omit to sweep)")
    p.add_argument("--grid-steps", type=int, default=50)
    p.set_defaults(func=_cmd_prove)


def _cmd_prove(args) -> int:
    if (args.n is None) != (args.total is None):
        print("prove: give both --n and --N, or neither for the full sweep",
              file=sys.stderr)
        return 2
    if args.n is not None:
        pairs = [(args.n, args.total)]
    else:
        pairs = [(n, total) for n in range(1, 5) for total in range(n + 1, 9)]
    reports = oracle.sweep_cases(pairs, grid_steps=args.grid_steps)
    print(oracle.format_reports(reports))
    return 0 if all(r.inequality_holds for r in reports) else 1


def _add_ablate(sub):
    p = sub.add_parser("ablate", help="run the 8-row loss-flag ablation matrix")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_ablate)


def _cmd_ablate(args) -> int:
    config = ExperimentConfig.from_yaml(args.config)
    report = run_ablation(config)
    print(report.to_text())
    print(f"outputs in {config.resolve_run_dir()}")
    return 0


def _add_plot(sub):
    p = sub.add_parser("plot", help="emit figures for saved run directories")
    p.add_argument("--runs", nargs="+", required=True, help="run directories")
    p.add_argument("--out", default=None, help="output directory for figures")
    p.set_defaults(func=_cmd_plot)


def _cmd_plot(args) -> int:
    records = [RunRecord.load(d) for d in args.runs]
    out = Path(args.out) if args.out else Path(args.runs[0]) / "plots"
    written = emit_plots(records, out)
    print(f"wrote {len(written)} figures to {out}")
    return 0


def _add_grid(sub):
    p = sub.add_parser("grid", help="sweep the auxiliary loss weights")
    p.add_argument("--config", required=True)
    p.add_argument(
        "--values", required=True,
        help="comma-separated weight candidates, e.g. 0.003,0.01,0.03",
    )
    p.set_defaults(func=_cmd_grid)


def _cmd_grid(args) -> int:
    config = ExperimentConfig.from_yaml(args.config)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    results = grid_search_weights(config, values)
    print(f"{'weight':>10}{'final_score':>14}{'rauc_vs_base':>14}{'aborted':>9}")
    for row in results:
        print(
            f"{row['weight']:>10g}{row['final_score']:>14.5f}"
            f"{row['rauc_vs_baseline']:>14.4f}{str(row['aborted']):>9}"
        )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimlab",
        description="desk-scale masked-image-modeling laboratory",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_pretrain, _add_analyze, _add_rauc, _add_prove, _add_ablate,
                _add_plot, _add_grid):
        add(sub)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
