"""The relative area-under-curve convergence ratio.

Given two evaluation curves, the ratio integrates each curve's area
above the baseline's score at the window start; 1 means the target
matches the baseline, 2 means it accumulates improvement twice as fast.
The trapezoid rule over the merged sample epochs is exact for
piecewise-linear curves, so inserting redundant knots changes nothing.
"""

import numpy as np

from mimlab import TrainingCurve, interpolate, rauc

epochs = np.array([0.0, 100.0, 200.0, 300.0, 400.0])
baseline = TrainingCurve(epochs, np.array([70.0, 80.0, 82.0, 82.8, 83.0]), "baseline")
faster = TrainingCurve(epochs, np.array([70.0, 82.0, 83.2, 83.4, 83.5]), "faster")

print("baseline at 150 epochs:", interpolate(baseline, 150.0))
print("identity:", rauc(baseline, baseline, 100, 400))
print(f"faster vs baseline on (100, 400): {rauc(baseline, faster, 100, 400):.4f}")
print(f"faster vs baseline on (200, 400): {rauc(baseline, faster, 200, 400):.4f}")

# doubling the improvement over the window start doubles the ratio
doubled = TrainingCurve(
    epochs, baseline.scores[1] + 2 * (baseline.scores - baseline.scores[1]), "doubled"
)
print(f"doubled improvement: {rauc(baseline, doubled, 100, 400):.4f}")

# knot insertion is a no-op
dense_epochs = np.sort(np.concatenate([epochs, [125.0, 275.0]]))
dense = TrainingCurve(
    dense_epochs, np.interp(dense_epochs, faster.epochs, faster.scores), "dense"
)
print(
    "refinement drift:",
    abs(rauc(baseline, dense, 100, 400) - rauc(baseline, faster, 100, 400)),
)

# shifting both curves by a constant changes nothing
shift = 1000.0
print(
    "shift invariance drift:",
    abs(
        rauc(
            TrainingCurve(baseline.epochs, baseline.scores + shift, "b"),
            TrainingCurve(faster.epochs, faster.scores + shift, "f"),
            100,
            400,
        )
        - rauc(baseline, faster, 100, 400)
    ),
)
