"""Codebook quantization and motion reconstruction loss arithmetic.

A motion tensor is a (frames, 69) float array: 66 axis-angle pose values
(the first 3 of which are the global root orientation) followed by the 3-D
root translation.  Everything here is pure arithmetic: no networks, no
gradients, no training.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

MOTION_WIDTH = 69
ROOT_ROT = slice(0, 3)
TRANSLATION = slice(66, 69)
DEFAULT_CODEBOOK_SIZE = 2048
DEFAULT_LATENT_DIM = 512

_QUANTIZE_CHUNK = 16  # latent rows per distance block, bounds peak memory


@dataclass(frozen=True)
class LossWeights:
    """Per-term weights of the reconstruction objective."""

    recons: float = 1.0
    commit: float = 0.02
    vel: float = 0.10
    rot: float = 0.5
    trans: float = 0.8

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if not value >= 0.0:
                raise ValueError(f"loss weight {name} must be nonnegative, got {value}")

    def scaled(self, s: float) -> "LossWeights":
        return LossWeights(*(s * v for v in (self.recons, self.commit, self.vel, self.rot, self.trans)))


@dataclass(frozen=True)
class Codebook:
    """K x D matrix of latent codes.  Immutable after construction."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] < 1:
            raise ValueError(f"codebook must be a K x D matrix with K >= 1, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("codebook entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def random(
        cls, size: int = DEFAULT_CODEBOOK_SIZE, dim: int = DEFAULT_LATENT_DIM, seed: int = 0
    ) -> "Codebook":
        rng = np.random.default_rng(seed)
        return cls(entries=rng.normal(0.0, 1.0, size=(size, dim)))

    def save(self, path) -> None:
        """Flat numeric text file: a ``K D`` header line, then one row per line."""
        lines = [f"{self.size} {self.dim}"]
        lines.extend(" ".join(repr(float(v)) for v in row) for row in self.entries)
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "Codebook":
        lines = Path(path).read_text().splitlines()
        if not lines:
            raise ValueError(f"{path}: empty codebook file")
        try:
            k, d = (int(t) for t in lines[0].split())
        except ValueError:
            raise ValueError(f"{path}: codebook header must be two integers 'K D'")
        if len(lines) < 1 + k:
            raise ValueError(f"{path}: expected {k} codebook rows, found {len(lines) - 1}")
        entries = np.empty((k, d), dtype=np.float64)
        for i in range(k):
            vals = lines[1 + i].split()
            if len(vals) != d:
                raise ValueError(f"{path}: row {i} has {len(vals)} values, expected {d}")
            entries[i] = [float(v) for v in vals]
        return cls(entries=entries)


def check_motion_tensor(arr: np.ndarray, name: str = "motion") -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != MOTION_WIDTH:
        raise ValueError(f"{name} must have shape (frames, {MOTION_WIDTH}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def quantize(latents: np.ndarray, codebook: Codebook):
    """Map each latent row to its nearest codebook entry (Euclidean).

    Ties break to the lowest index.  Returns ``(indices, quantized,
    commit_sq_dist)`` where commit_sq_dist is the mean over rows of the
    squared distance to the selected entry.
    """
    latents = np.asarray(latents, dtype=np.float64)
    if latents.ndim != 2 or latents.shape[1] != codebook.dim:
        raise ValueError(
            f"latents must have shape (T, {codebook.dim}) to match the codebook, got {latents.shape}"
        )
    n = latents.shape[0]
    indices = np.empty(n, dtype=np.int64)
    sq_dists = np.empty(n, dtype=np.float64)
    for start in range(0, n, _QUANTIZE_CHUNK):
        chunk = latents[start : start + _QUANTIZE_CHUNK]
        diff = chunk[:, None, :] - codebook.entries[None, :, :]
        d2 = np.einsum("tkd,tkd->tk", diff, diff)
        idx = np.argmin(d2, axis=1)  # first minimum = lowest index on ties
        indices[start : start + _QUANTIZE_CHUNK] = idx
        sq_dists[start : start + _QUANTIZE_CHUNK] = d2[np.arange(len(idx)), idx]
    quantized = codebook.entries[indices]
    commit_sq_dist = float(np.mean(sq_dists)) if n else 0.0
    return indices, quantized, commit_sq_dist


def _reduce(arr: np.ndarray, reduction: str) -> float:
    if arr.size == 0:
        return 0.0
    if reduction == "mean":
        return float(np.mean(arr))
    if reduction == "sum":
        return float(np.sum(arr))
    raise ValueError(f"unknown reduction {reduction!r}")


def vqvae_loss(
    gt: np.ndarray,
    recon: np.ndarray,
    commit_sq_dist: float,
    fps: float,
    weights: LossWeights = LossWeights(),
    reduction: str = "mean",
):
    """Five-term weighted motion reconstruction loss.

    Terms (all L1, reduced by ``reduction`` over their own elements):
      recons  full-tensor reconstruction error
      commit  the commitment scalar, passed through from quantize
      vel     error of forward-difference velocities (scaled by fps)
      rot     error over the 3 global root-orientation dims
      trans   error over the 3 root-translation dims

    Returns ``(total, terms)`` with total the weighted sum.
    """
    gt = check_motion_tensor(gt, "gt")
    recon = check_motion_tensor(recon, "recon")
    if gt.shape != recon.shape:
        raise ValueError(f"shape mismatch: gt {gt.shape} vs recon {recon.shape}")
    diff = np.abs(gt - recon)
    dvel = np.abs((gt[1:] - gt[:-1]) - (recon[1:] - recon[:-1])) * fps
    terms = {
        "recons": _reduce(diff, reduction),
        "commit": float(commit_sq_dist),
        "vel": _reduce(dvel, reduction),
        "rot": _reduce(diff[:, ROOT_ROT], reduction),
        "trans": _reduce(diff[:, TRANSLATION], reduction),
    }
    total = (
        weights.recons * terms["recons"]
        + weights.commit * terms["commit"]
        + weights.vel * terms["vel"]
        + weights.rot * terms["rot"]
        + weights.trans * terms["trans"]
    )
    return total, terms


def downsample_length(n_frames: int, n_down: int) -> int:
    """Latent sequence length after ``n_down`` halving stages.

    Rejects lengths that are not divisible by 2**n_down; padding is the
    caller's responsibility.
    """
    if n_frames < 0 or n_down < 0:
        raise ValueError("n_frames and n_down must be nonnegative")
    factor = 2 ** n_down
    if n_frames % factor:
        raise ValueError(f"{n_frames} frames not divisible by 2^{n_down} = {factor}")
    return n_frames // factor
