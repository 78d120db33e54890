"""Patch tokenization and random masking.

Cuts an image into non-overlapping patches, shows the exact round-trip
back to pixels, and samples reproducible random masks at a few ratios.
"""

import numpy as np

from mimlab import make_synthetic_images, patchify, sample_mask, unpatchify

image = make_synthetic_images(1, 32, 32, seed=7)[0]
grid = patchify(image, patch_size=8)
print(f"image 32x32x3 -> {grid.n_patches} patches of {grid.patch_dim} values")

restored = unpatchify(grid, 32, 32)
print("round-trip exact:", np.array_equal(restored, image))

for ratio in (0.0, 0.5, 0.6, 0.75):
    mask = sample_mask(grid.n_patches, ratio, seed=3)
    print(
        f"ratio {ratio:4.2f}: {mask.n_masked:2d} masked "
        f"{np.array2string(mask.masked_indices)}"
    )

# same seed, same mask; different seed, (almost surely) different mask
a = sample_mask(16, 0.5, seed=11)
b = sample_mask(16, 0.5, seed=11)
c = sample_mask(16, 0.5, seed=12)
print("deterministic per seed:", np.array_equal(a.masked_indices, b.masked_indices))
print("varies across seeds:", not np.array_equal(a.masked_indices, c.masked_indices))

# over many seeds each position is masked about half the time
counts = np.zeros(16)
for seed in range(2000):
    counts[sample_mask(16, 0.5, seed).masked_indices] += 1
print("inclusion frequencies:", np.array2string(counts / 2000, precision=3))
