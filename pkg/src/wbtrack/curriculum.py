"""Progressive difficulty exposure over the 1-10 clip rating scale.

Training starts with level 1 unlocked.  The frontier advances when position
and angle tracking errors at the current top level both drop below their
thresholds, or automatically after a fixed number of iterations, never past
level 10.  Sampling weights from the scheduler are reshaped in three steps:
clips above the frontier are masked out, clips at the newest level are
boosted (scaled by the ramp-in fraction while the level is being
introduced), and per-level mass floors are enforced before renormalizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

MAX_LEVEL = 10
ADVANCE_THRESHOLDS = "thresholds"
ADVANCE_AUTO = "auto"
ADVANCE_NONE = "none"


@dataclass(frozen=True)
class CurriculumConfig:
    pos_threshold: float = 0.12     # position-error advance threshold (m)
    ang_threshold: float = 0.30     # angle-error advance threshold (rad)
    auto_advance_iters: int = 2000  # advance regardless of metrics after this many iterations
    new_level_bias: float = 2.0     # sampling multiplier for the newest unlocked level, >= 1
    min_level_ratio: float = 0.05   # sampling-mass floor per unlocked level, in [0, 1)
    ramp_iters: int = 50            # iterations over which a fresh level is introduced

    def __post_init__(self) -> None:
        if not (self.pos_threshold > 0.0 and self.ang_threshold > 0.0):
            raise ValueError("advance thresholds must be positive")
        if self.auto_advance_iters < 1:
            raise ValueError("auto_advance_iters must be at least 1")
        if not self.new_level_bias >= 1.0:
            raise ValueError("new_level_bias must be at least 1")
        if not 0.0 <= self.min_level_ratio < 1.0:
            raise ValueError("min_level_ratio must be in [0, 1)")
        if self.ramp_iters < 1:
            raise ValueError("ramp_iters must be at least 1")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "CurriculumConfig":
        return cls(**d)


@dataclass(frozen=True)
class CurriculumState:
    """Unlocked-level frontier plus ramp-in and metric bookkeeping.

    ramp_progress starts at 1: the initial level is fully available, and
    ramping applies only to levels unlocked mid-run.  level_metrics holds
    the most recent (pos_error, ang_error) observed per level.
    """

    max_unlocked: int = 1
    iters_at_level: int = 0
    ramp_progress: float = 1.0
    level_metrics: Mapping = field(default_factory=dict)


def advance_check(
    state: CurriculumState,
    cfg: CurriculumConfig,
    pos_error_at_top: float,
    ang_error_at_top: float,
):
    """Decide whether the frontier advances.

    Returns ``(advance, reason)`` with reason one of "thresholds", "auto",
    "none".  The iteration cap fires regardless of metrics; metrics may be
    None or NaN when no clip at the top level was evaluated, which never
    satisfies the thresholds.  The frontier never passes level 10.
    """
    if state.max_unlocked >= MAX_LEVEL:
        return False, ADVANCE_NONE
    if state.iters_at_level >= cfg.auto_advance_iters:
        return True, ADVANCE_AUTO
    pos = math.inf if pos_error_at_top is None else pos_error_at_top
    ang = math.inf if ang_error_at_top is None else ang_error_at_top
    if pos < cfg.pos_threshold and ang < cfg.ang_threshold:
        return True, ADVANCE_THRESHOLDS
    return False, ADVANCE_NONE


def _apply_level_floors(weights: np.ndarray, levels: np.ndarray, floor: float) -> np.ndarray:
    """Raise each unlocked level's total mass to >= floor, renormalized.

    ``levels`` must carry a negative label for locked clips, which keep zero
    mass.  Deficient levels are pinned at exactly the floor (distributed
    within the level proportionally to the incoming weights, or uniformly if
    the level carries no mass); the remaining levels share the leftover mass
    in proportion to their incoming masses.
    """
    present = sorted(int(l) for l in np.unique(levels) if l >= 0)
    if floor <= 0.0 or len(present) <= 1:
        return weights / weights.sum()
    if floor * len(present) > 1.0 + 1e-12:
        raise ValueError(
            f"min_level_ratio {floor} infeasible for {len(present)} unlocked levels"
        )
    w = weights / weights.sum()
    mass = {l: float(w[levels == l].sum()) for l in present}
    pinned: set = set()
    while True:
        free = [l for l in present if l not in pinned]
        remaining = 1.0 - floor * len(pinned)
        free_mass = sum(mass[l] for l in free)
        deficient = [
            l for l in free
            if (mass[l] / free_mass * remaining if free_mass > 0.0 else 0.0) < floor - 1e-15
        ]
        if not deficient:
            break
        pinned.update(deficient)
    out = np.zeros_like(w)
    for l in pinned:
        sel = levels == l
        total = w[sel].sum()
        if total > 0.0:
            out[sel] = w[sel] * (floor / total)
        else:
            out[sel] = floor / sel.sum()
    free = [l for l in present if l not in pinned]
    if free:
        free_mass = sum(mass[l] for l in free)
        scale = (1.0 - floor * len(pinned)) / free_mass
        for l in free:
            sel = levels == l
            out[sel] = w[sel] * scale
    return out / out.sum()


def effective_weights(
    base: np.ndarray,
    levels,
    state: CurriculumState,
    cfg: CurriculumConfig,
) -> np.ndarray:
    """Curriculum-adjusted sampling probabilities over all clips.

    Locked clips (level above the frontier) get exactly zero.  Clips at the
    frontier level are scaled by ramp_progress * new_level_bias; per-level
    floors are then enforced and the vector renormalized to sum 1.
    """
    base = np.asarray(base, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.int64)
    if base.shape != levels.shape:
        raise ValueError(f"base {base.shape} and levels {levels.shape} must align")
    if abs(base.sum() - 1.0) > 1e-6:
        raise ValueError("base must be a probability vector summing to 1")
    unlocked = levels <= state.max_unlocked
    if not unlocked.any():
        raise ValueError(
            f"all clips are locked: no clip at or below level {state.max_unlocked}"
        )
    w = np.where(unlocked, base, 0.0)
    newest = levels == state.max_unlocked
    w[newest] *= state.ramp_progress * cfg.new_level_bias
    if w.sum() <= 0.0:
        # Ramp at zero with only the newest level unlocked: start it uniformly.
        w = unlocked.astype(np.float64)
    return _apply_level_floors(w, np.where(unlocked, levels, -1), cfg.min_level_ratio)


def tick(state: CurriculumState, cfg: CurriculumConfig, level_metrics: Mapping | None = None):
    """One training-iteration transition.

    ``level_metrics`` maps level -> (pos_error, ang_error) for levels
    evaluated this iteration; entries are merged into the state's latest
    known metrics.  Returns ``(new_state, reason)`` where reason reports the
    advance decision ("thresholds" / "auto" / "none").
    """
    merged = dict(state.level_metrics)
    if level_metrics:
        merged.update({int(k): (float(v[0]), float(v[1])) for k, v in level_metrics.items()})
    bumped = replace(
        state,
        iters_at_level=state.iters_at_level + 1,
        ramp_progress=min(1.0, state.ramp_progress + 1.0 / cfg.ramp_iters),
        level_metrics=merged,
    )
    pos, ang = merged.get(bumped.max_unlocked, (math.inf, math.inf))
    advance, reason = advance_check(bumped, cfg, pos, ang)
    if advance:
        return (
            replace(bumped, max_unlocked=bumped.max_unlocked + 1, iters_at_level=0, ramp_progress=0.0),
            reason,
        )
    return bumped, reason


def level_masses(weights: np.ndarray, levels) -> dict:
    """Total sampling mass per difficulty level present in ``levels``."""
    weights = np.asarray(weights, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.int64)
    return {int(l): float(weights[levels == l].sum()) for l in np.unique(levels)}


def rating_to_band(rating: int) -> int:
    """Coarse 3-band grouping of the 1-10 difficulty scale (for reporting)."""
    if not 1 <= rating <= 10:
        raise ValueError(f"difficulty rating must be in 1..10, got {rating}")
    if rating <= 4:
        return 1
    if rating <= 7:
        return 2
    return 3
