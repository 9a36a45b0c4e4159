#!/usr/bin/env python3
"""Assemble a full actor observation and take it apart again.

The 616 values are a pure concatenation: a 520-dim multi-scale motion
command (current + 2 near-future + 5 far-future target frames) followed by
96 proprioceptive values.  Slicing by the offset table recovers every input
bit-exactly.
"""

import numpy as np

from wbtrack.motion import JOINT_COUNT, synthetic_clip
from wbtrack.observation import (
    SEGMENTS,
    Proprioception,
    build_observation,
    command_frame_indices,
    long_horizon_block,
    offsets_manifest,
    slice_segment,
)

clip = synthetic_clip("demo", n_frames=40, fps=30.0, seed=4)
rng = np.random.default_rng(0)
proprio = Proprioception(
    anchor_ori_6d=np.array([1.0, 0, 0, 0, 1.0, 0]),
    base_ang_vel=rng.normal(size=3),
    joint_pos=rng.normal(size=JOINT_COUNT),
    joint_vel=rng.normal(size=JOINT_COUNT),
    prev_actions=rng.normal(size=JOINT_COUNT),
)

t = 10
obs = build_observation(clip, t, proprio)
print(f"observation length: {obs.shape[0]}")
print("\nsegment offset table:")
print(offsets_manifest())

print(f"command slots at t={t} pull reference frames "
      f"{command_frame_indices(t, clip.n_frames)}")
print(f"(past-end indices clamp: at t={clip.n_frames - 1} -> "
      f"{command_frame_indices(clip.n_frames - 1, clip.n_frames)})")

block = long_horizon_block(obs)
print(f"\nlong-horizon block for a downstream temporal encoder: {block.shape}")

recovered = slice_segment(obs, "joint_vel")
print(f"slice round trip exact: {bool(np.array_equal(recovered, proprio.joint_vel))}")
widths = {name: stop - start for name, start, stop in SEGMENTS}
print(f"segment widths: {widths}")
