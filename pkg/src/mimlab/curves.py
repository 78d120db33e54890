"""Training-curve bookkeeping and the relative area-under-curve ratio.

A curve is a piecewise-linear function through (epoch, score) samples.
The relative AUC of a target curve against a baseline over [e1, e2] is

    integral(S2(E) - S1(e1)) / integral(S1(E) - S1(e1)),

integrated with the trapezoid rule over the union of both curves' sample
epochs plus the window endpoints, which is exact for piecewise-linear
curves and therefore stable under knot insertion.  A value of 1 means
the target matches the baseline; above 1, it accumulates score faster.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .errors import DegenerateBaselineError


@dataclasses.dataclass(frozen=True)
class TrainingCurve:
    """Ordered (epoch, score) samples of one method's evaluation curve."""

    epochs: np.ndarray
    scores: np.ndarray
    method_name: str = ""

    def __post_init__(self):
        epochs = np.asarray(self.epochs, dtype=float)
        scores = np.asarray(self.scores, dtype=float)
        if epochs.ndim != 1 or epochs.shape != scores.shape:
            raise ValueError("epochs and scores must be matching 1-D arrays")
        if epochs.size < 2:
            raise ValueError("a curve needs at least 2 samples")
        if not np.all(np.diff(epochs) > 0):
            raise ValueError("epochs must be strictly increasing")
        if not (np.isfinite(epochs).all() and np.isfinite(scores).all()):
            raise ValueError("curve samples must be finite")
        object.__setattr__(self, "epochs", epochs)
        object.__setattr__(self, "scores", scores)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.epochs[0]), float(self.epochs[-1])


def interpolate(curve: TrainingCurve, epoch: float) -> float:
    """Piecewise-linear value at ``epoch``; no extrapolation."""
    lo, hi = curve.span
    if not lo <= epoch <= hi:
        raise ValueError(
            f"epoch {epoch} outside curve span [{lo}, {hi}] "
            f"(extrapolation is not supported)"
        )
    return float(np.interp(epoch, curve.epochs, curve.scores))


def rauc(s1: TrainingCurve, s2: TrainingCurve, e1: float, e2: float) -> float:
    """Relative area of s2 over s1's starting score on [e1, e2]."""
    if not e1 < e2:
        raise ValueError(f"need e1 < e2, got ({e1}, {e2})")
    for curve in (s1, s2):
        lo, hi = curve.span
        if e1 < lo or e2 > hi:
            raise ValueError(
                f"curve {curve.method_name!r} spans [{lo}, {hi}], "
                f"cannot integrate over [{e1}, {e2}]"
            )
    knots = np.union1d(s1.epochs, s2.epochs)
    knots = knots[(knots > e1) & (knots < e2)]
    knots = np.concatenate([[e1], knots, [e2]])
    base = interpolate(s1, e1)
    f2 = np.array([interpolate(s2, e) for e in knots]) - base
    f1 = np.array([interpolate(s1, e) for e in knots]) - base
    numerator = np.trapezoid(f2, knots)
    denominator = np.trapezoid(f1, knots)
    if denominator == 0.0:
        raise DegenerateBaselineError(
            f"baseline {s1.method_name!r} is flat over [{e1}, {e2}]; "
            f"the relative area ratio is undefined"
        )
    return float(numerator / denominator)


def write_curve_csv(path, curve: TrainingCurve) -> None:
    lines = ["epoch,score"]
    lines += [f"{e:.10g},{s:.10g}" for e, s in zip(curve.epochs, curve.scores)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve_csv(path, method_name: str | None = None) -> TrainingCurve:
    path = Path(path)
    rows = path.read_text().strip().splitlines()
    if not rows or rows[0].strip().lower() != "epoch,score":
        raise ValueError(f"{path} is not a curve CSV (expected 'epoch,score' header)")
    data = np.array(
        [[float(v) for v in row.split(",")] for row in rows[1:] if row.strip()]
    )
    return TrainingCurve(
        epochs=data[:, 0],
        scores=data[:, 1],
        method_name=method_name if method_name is not None else path.stem,
    )
