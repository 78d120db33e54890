"""Static plot emission for run records."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .training import RunRecord


def emit_plots(records: list[RunRecord], out_dir) -> list[Path]:
    """Write curve, profile, and quadrant-map figures for each record.

    Per record: one evaluation-curve plot, one heterogeneity-profile
    plot, and one grayscale image per traced depth of the final affinity
    quadrant decomposition.  With two or more records an overlay
    comparison of the curves is added.
    """
    if not records:
        raise ValueError("emit_plots needs at least one run record")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for record in records:
        name = record.method_name

        fig, ax = plt.subplots(figsize=(6, 4))
        if record.curve is not None:
            ax.plot(record.curve.epochs, record.curve.scores, marker="o", ms=3)
        ax.set_xlabel("step")
        ax.set_ylabel("held-out score (-reconstruction error)")
        ax.set_title(f"{name}: evaluation curve")
        ax.grid(alpha=0.3)
        path = out_dir / f"{name}_curve.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

        if record.profiles:
            fig, ax = plt.subplots(figsize=(6, 4))
            first_step, first = record.profiles[0]
            last_step, last = record.profiles[-1]
            depths = range(len(first.values))
            ax.plot(depths, first.values, marker="o", label=f"step {first_step}")
            if last is not first:
                ax.plot(depths, last.values, marker="s", label=f"step {last_step}")
            ax.set_xlabel("layer depth")
            ax.set_ylabel("heterogeneity H")
            ax.set_title(f"{name}: heterogeneity profile")
            ax.legend()
            ax.grid(alpha=0.3)
            path = out_dir / f"{name}_profile.png"
            fig.savefig(path, dpi=120, bbox_inches="tight")
            plt.close(fig)
            written.append(path)

        for depth, qmap in enumerate(record.quadrants):
            path = out_dir / f"{name}_quadrant_depth{depth}.png"
            plt.imsave(path, qmap.matrix, cmap="gray", vmin=0.0, vmax=1.0)
            written.append(path)

    if len(records) >= 2:
        fig, ax = plt.subplots(figsize=(6, 4))
        for record in records:
            if record.curve is not None:
                ax.plot(
                    record.curve.epochs,
                    record.curve.scores,
                    marker="o",
                    ms=3,
                    label=record.method_name,
                )
        ax.set_xlabel("step")
        ax.set_ylabel("held-out score")
        ax.set_title("evaluation curves")
        ax.legend()
        ax.grid(alpha=0.3)
        path = out_dir / "comparison_curves.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    return written
