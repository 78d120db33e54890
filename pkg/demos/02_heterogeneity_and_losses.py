"""The heterogeneity measure and the three auxiliary objectives.

Heterogeneity is the mean row entropy of the masked-to-visible softmax
affinity map: high when masked tokens relate diffusely to every visible
token, near zero once they lock onto specific ones.  The auxiliary
objectives steer it: one sharpens visible rows of the full self-affinity
map, one pushes depth-0 heterogeneity up, one pushes it down across
depth.
"""

import numpy as np

from mimlab import (
    LossWeights,
    MaskSpec,
    heterogeneity,
    inverse_heterogeneity_loss,
    ranking_loss,
    reconstruction_loss,
    sparsity_loss,
    total_loss,
)

rng = np.random.default_rng(0)
n_tokens, width = 10, 16
mask = MaskSpec(masked_indices=np.arange(4), ratio=0.4, seed=0, n_patches=n_tokens)

# diffuse masked tokens: tiny masked rows give near-uniform affinities
states = rng.normal(size=(n_tokens, width))
states[mask.masked_indices] *= 0.01
h_diffuse = heterogeneity(states, mask)
print(f"diffuse masked rows: H = {h_diffuse:.4f} (max log 6 = {np.log(6):.4f})")

# assimilated masked tokens: each masked row copies one visible token
assimilated = states.copy()
visible = mask.visible_indices
for i, m in enumerate(mask.masked_indices):
    assimilated[m] = 8.0 * states[visible[i]]
print(f"assimilated masked rows: H = {heterogeneity(assimilated, mask):.4f}")

# the three auxiliary objectives on the diffuse configuration
print(f"sparsity loss (visible-row entropies): {sparsity_loss(states, mask):.4f}")
print(f"inverse-heterogeneity loss: {inverse_heterogeneity_loss(h_diffuse, 1e-6):.4f}")

falling = np.array([1.7, 1.2, 0.6, 0.2, 0.1])
rising = falling[::-1]
print(f"ranking loss on a falling profile: {ranking_loss(falling):.4f}")
print(f"ranking loss on a rising profile:  {ranking_loss(rising):.4f}")
print(f"mirrored form on the falling profile: "
      f"{ranking_loss(falling, 'penalize_decrease'):.4f}")

# combination
parts = {
    "recon": reconstruction_loss(rng.normal(size=(10, 12)), rng.normal(size=(10, 12)), mask),
    "sparsity": sparsity_loss(states, mask),
    "inv_h": inverse_heterogeneity_loss(h_diffuse, 1e-6),
    "ranking": ranking_loss(falling),
}
weights = LossWeights()
print(f"weighted total with defaults {weights}: {total_loss(parts, weights):.4f}")
