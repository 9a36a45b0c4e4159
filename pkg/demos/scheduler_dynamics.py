#!/usr/bin/env python3
"""Watch the sampling distribution chase the hardest clips.

Three clips report very different tracking errors; after a few batches of
EMA updates the difficulty scores separate and the temperature-scaled
softmax concentrates on the struggling clip, while the exploration floor
keeps the easy clips alive.
"""

import numpy as np

from wbtrack.scheduler import (
    SchedulerConfig,
    SchedulerState,
    sampling_distribution,
)

cfg = SchedulerConfig(error_ema_rate=0.3, explore_ratio=0.1)
state = SchedulerState.for_clips(["easy", "medium", "hard"])

# Per-clip "true" tracking errors and success rates the environment reports.
true_error = {"easy": 0.02, "medium": 0.20, "hard": 0.45}
success_rate = {"easy": 0.99, "medium": 0.9, "hard": 0.5}

rng = np.random.default_rng(0)
print(f"{'batch':>5}  {'p(easy)':>8}  {'p(medium)':>9}  {'p(hard)':>8}")
for batch in range(10):
    errors = [true_error[n] + rng.normal(0, 0.01) for n in state.names]
    outcomes = [rng.uniform() < success_rate[n] for n in state.names]
    state.apply_batch([0, 1, 2], np.abs(errors), outcomes, cfg)
    p = sampling_distribution(state, cfg)
    print(f"{batch:>5}  {p[0]:>8.4f}  {p[1]:>9.4f}  {p[2]:>8.4f}")

p = sampling_distribution(state, cfg)
print(f"\nfloor check: min p = {p.min():.4f} >= explore/N = {cfg.explore_ratio / 3:.4f}")
print(f"sum check:  {p.sum():.12f}")
