#!/usr/bin/env python3
"""Step a curriculum by hand and watch levels unlock, ramp in, and floor.

A 6-clip library spans levels 1-3.  Feeding improving metrics to tick()
unlocks level after level; right after an unlock the fresh level's clips
are only partially introduced (ramp) but the per-level floor still
guarantees them a minimum share.
"""

import numpy as np

from wbtrack.curriculum import (
    CurriculumConfig,
    CurriculumState,
    effective_weights,
    level_masses,
    tick,
)

levels = np.array([1, 1, 2, 2, 3, 3])
base = np.full(6, 1 / 6)  # pretend the scheduler is uniform
cfg = CurriculumConfig(
    pos_threshold=0.12, ang_threshold=0.3, auto_advance_iters=50,
    new_level_bias=2.0, min_level_ratio=0.10, ramp_iters=5,
)
state = CurriculumState()

# Tracking error at the frontier improves each iteration.
error_schedule = np.linspace(0.4, 0.05, 16)

print(f"{'iter':>4} {'frontier':>8} {'ramp':>6} {'reason':>10}   level masses")
for it, err in enumerate(error_schedule):
    weights = effective_weights(base, levels, state, cfg)
    masses = level_masses(weights, levels)
    shown = {l: round(m, 3) for l, m in masses.items()}
    print(f"{it:>4} {state.max_unlocked:>8} {state.ramp_progress:>6.2f} ", end="")
    state, reason = tick(state, cfg, {state.max_unlocked: (float(err), float(err) * 0.2)})
    print(f"{reason:>10}   {shown}")

print("\nlocked levels hold exactly zero mass; unlocked levels never drop")
print("below min_level_ratio =", cfg.min_level_ratio)
