#!/usr/bin/env python3
"""Quantize latent motion features and price a reconstruction.

The codebook maps each latent row to its nearest entry; the five-term loss
then scores a reconstruction against the ground-truth motion tensor with
separate velocity, root-rotation, and root-translation supervision.
"""

import numpy as np

from wbtrack.tokenizer import Codebook, LossWeights, downsample_length, quantize, vqvae_loss

rng = np.random.default_rng(6)

# --- quantization --------------------------------------------------------
codebook = Codebook.random(size=32, dim=8, seed=0)
latents = codebook.entries[[3, 3, 17, 30]] + rng.normal(0, 0.05, (4, 8))
indices, quantized, commit = quantize(latents, codebook)
print(f"latent rows snap to entries:  {indices.tolist()}")
print(f"commitment (mean sq distance): {commit:.4f}")

# Token sequence length after the strided encoder stages.
print(f"64 input frames -> {downsample_length(64, 2)} tokens (2 halving stages)")

# --- reconstruction loss -------------------------------------------------
frames = 16
gt = np.cumsum(rng.normal(0, 0.05, (frames, 69)), axis=0)

print(f"\n{'perturbation':>14}  {'recons':>7}  {'vel':>7}  {'rot':>7}  {'trans':>7}  {'total':>7}")
for label, sigma in (("none", 0.0), ("slight", 0.01), ("moderate", 0.1), ("severe", 0.5)):
    recon = gt + rng.normal(0, sigma, gt.shape) if sigma else gt.copy()
    total, terms = vqvae_loss(gt, recon, commit_sq_dist=commit, fps=30.0)
    print(
        f"{label:>14}  {terms['recons']:>7.4f}  {terms['vel']:>7.4f}  "
        f"{terms['rot']:>7.4f}  {terms['trans']:>7.4f}  {total:>7.4f}"
    )

w = LossWeights()
print(f"\nterm weights: recons={w.recons} commit={w.commit} vel={w.vel} "
      f"rot={w.rot} trans={w.trans}")
print("(a perfect reconstruction still pays the commitment term)")
