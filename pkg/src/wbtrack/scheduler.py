"""Adaptive per-clip motion scheduling.

Each clip carries an EMA of its tracking error plus success/failure EMAs.
These combine into a difficulty score in [0, 1], and the sampling
distribution is a temperature-scaled softmax over log-scores mixed with a
uniform exploration floor, so hard clips are prioritized while every clip
keeps at least explore_ratio / N probability.

State updates follow a single-writer contract: one ordered batch of updates
per training iteration (``SchedulerState.apply_batch``); reads between
batches are safe from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class SchedulerConfig:
    error_ema_rate: float = 0.1    # update rate of the per-clip error EMA
    outcome_ema_rate: float = 0.05 # update rate of the success/failure EMAs
    failure_weight: float = 0.5    # failure share of the difficulty score, in [0, 1]
    error_scale: float = 0.5       # error magnitude mapped to score 1.0 (m, MPJPE scale)
    log_gain: float = 1.0          # gain applied to log-scores before the softmax
    temperature: float = 1.0       # softmax temperature
    explore_ratio: float = 0.1     # uniform mixing ratio, in [0, 1]
    eps: float = 1e-6              # numerical floor inside log() and the success rate

    def __post_init__(self) -> None:
        if not 0.0 <= self.error_ema_rate <= 1.0:
            raise ValueError("error_ema_rate must be in [0, 1]")
        if not 0.0 <= self.outcome_ema_rate <= 1.0:
            raise ValueError("outcome_ema_rate must be in [0, 1]")
        if not 0.0 <= self.failure_weight <= 1.0:
            raise ValueError("failure_weight must be in [0, 1]")
        if not self.error_scale > 0.0:
            raise ValueError("error_scale must be positive")
        if not self.temperature > 0.0:
            raise ValueError("temperature must be positive")
        if not 0.0 <= self.explore_ratio <= 1.0:
            raise ValueError("explore_ratio must be in [0, 1]")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "SchedulerConfig":
        return cls(**d)


@dataclass(frozen=True)
class ClipStats:
    """Per-clip scheduler statistics.  Immutable; updates return new values."""

    error_ema: float = 0.0
    success_ema: float = 0.0
    failure_ema: float = 0.0
    initialized: bool = False  # set by the first error observation


def update_error(stats: ClipStats, error: float, rate: float) -> ClipStats:
    """Fold one tracking-error observation into the clip's error EMA.

    The first observation seeds the EMA directly instead of decaying from
    zero, so fresh clips do not look spuriously easy.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    if not (math.isfinite(error) and error >= 0.0):
        raise ValueError(f"tracking error must be finite and nonnegative, got {error}")
    if not stats.initialized:
        return replace(stats, error_ema=float(error), initialized=True)
    return replace(stats, error_ema=(1.0 - rate) * stats.error_ema + rate * error)


def update_outcome(stats: ClipStats, success: bool, rate: float) -> ClipStats:
    """Fold one success/failure event into the outcome EMAs."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    s = 1.0 if success else 0.0
    return replace(
        stats,
        success_ema=(1.0 - rate) * stats.success_ema + rate * s,
        failure_ema=(1.0 - rate) * stats.failure_ema + rate * (1.0 - s),
    )


def success_prob(stats: ClipStats, eps: float) -> float:
    """Estimated success probability, in [0, 1)."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    return stats.success_ema / (stats.success_ema + stats.failure_ema + eps)


def difficulty_score(stats: ClipStats, cfg: SchedulerConfig) -> float:
    """Blend of normalized persistent error and failure rate, in [0, 1]."""
    err = min(max(stats.error_ema / cfg.error_scale, 0.0), 1.0)
    fail = 1.0 - success_prob(stats, cfg.eps)
    return (1.0 - cfg.failure_weight) * err + cfg.failure_weight * fail


def distribution_from_scores(scores: np.ndarray, cfg: SchedulerConfig) -> np.ndarray:
    """Sampling probabilities from difficulty scores.

    (1 - explore) * softmax(log_gain * log(score + eps) / temperature)
    + explore / N.  Softmax uses max-subtraction for stability; the result
    sums to 1 and every entry is at least explore_ratio / N.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.size < 1:
        raise ValueError("scores must be a non-empty vector")
    logits = cfg.log_gain * np.log(scores + cfg.eps) / cfg.temperature
    stable = np.exp(logits - np.max(logits))
    soft = stable / np.sum(stable)
    return (1.0 - cfg.explore_ratio) * soft + cfg.explore_ratio / scores.size


@dataclass
class SchedulerState:
    """Ordered per-clip statistics for one motion library."""

    names: list
    stats: list

    def __post_init__(self) -> None:
        if len(self.names) != len(self.stats):
            raise ValueError("names and stats must have equal length")
        if len(self.names) < 1:
            raise ValueError("scheduler state needs at least one clip")

    @classmethod
    def for_clips(cls, names) -> "SchedulerState":
        names = list(names)
        return cls(names=names, stats=[ClipStats() for _ in names])

    @classmethod
    def from_library(cls, library) -> "SchedulerState":
        return cls.for_clips(library.names)

    def __len__(self) -> int:
        return len(self.names)

    def errors(self) -> np.ndarray:
        return np.array([s.error_ema for s in self.stats], dtype=np.float64)

    def scores(self, cfg: SchedulerConfig) -> np.ndarray:
        return np.array([difficulty_score(s, cfg) for s in self.stats], dtype=np.float64)

    def apply_batch(self, indices, errors, successes, cfg: SchedulerConfig) -> None:
        """One ordered batch of per-clip updates (single writer per iteration)."""
        indices = list(indices)
        errors = list(errors)
        successes = list(successes)
        if not len(indices) == len(errors) == len(successes):
            raise ValueError(
                f"batch arrays must have equal lengths, got "
                f"{len(indices)}/{len(errors)}/{len(successes)}"
            )
        for idx, err, succ in zip(indices, errors, successes):
            idx = int(idx)
            st = update_error(self.stats[idx], float(err), cfg.error_ema_rate)
            self.stats[idx] = update_outcome(st, bool(succ), cfg.outcome_ema_rate)

    def save(self, path) -> None:
        """Checkpoint: one ``name error_ema success_ema failure_ema init`` line per clip."""
        lines = [
            f"{name} {s.error_ema!r} {s.success_ema!r} {s.failure_ema!r} {int(s.initialized)}"
            for name, s in zip(self.names, self.stats)
        ]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "SchedulerState":
        names, stats = [], []
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            name, e, s, f, init = line.split()
            names.append(name)
            stats.append(ClipStats(float(e), float(s), float(f), bool(int(init))))
        return cls(names=names, stats=stats)


def sampling_distribution(state: SchedulerState, cfg: SchedulerConfig) -> np.ndarray:
    """Probability vector over the state's clips (sums to 1)."""
    return distribution_from_scores(state.scores(cfg), cfg)


def sample_from_weights(weights: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` i.i.d. clip indices drawn from an explicit probability vector."""
    weights = np.asarray(weights, dtype=np.float64)
    if count < 1:
        raise ValueError("count must be at least 1")
    return rng.choice(weights.size, size=count, replace=True, p=weights / weights.sum())


def sample_clips(
    state: SchedulerState,
    cfg: SchedulerConfig,
    count: int,
    rng_seed: int,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Seeded i.i.d. draws from the sampling distribution.

    Pass ``weights`` to draw from externally adjusted probabilities (e.g.
    after curriculum masking) instead of the raw distribution.
    """
    if weights is None:
        weights = sampling_distribution(state, cfg)
    return sample_from_weights(weights, count, np.random.default_rng(rng_seed))
