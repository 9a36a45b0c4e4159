"""Assembly of the 616-dimensional actor observation.

Layout (names, offsets, widths):

    command_current   [0, 65)     target frame at time t
    command_short     [65, 195)   2 near-future target frames (t+1, t+2)
    command_long      [195, 520)  5 far-future target frames (stride apart)
    anchor_ori_6d     [520, 526)  root orientation, 6D encoding
    base_ang_vel      [526, 529)
    joint_pos         [529, 558)
    joint_vel         [558, 587)
    prev_actions      [587, 616)

A 65-value target frame is: 29 joint positions, anchor position (3), anchor
orientation as 6D (6), anchor linear velocity (3), anchor angular velocity
(3), and 7 key-body positions expressed in the anchor frame (21).  Future
indices past the end of a clip clamp to the final frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .motion import JOINT_COUNT, MotionClip, RobotFrame
from .rotations import quat_conjugate, quat_rotate, quat_to_6d

TARGET_FRAME_DIM = 65
SHORT_HORIZON_FRAMES = 2
LONG_HORIZON_FRAMES = 5
COMMAND_DIM = TARGET_FRAME_DIM * (1 + SHORT_HORIZON_FRAMES + LONG_HORIZON_FRAMES)  # 520
OBSERVATION_DIM = 616
KEY_BODY_COUNT = 7

# (name, start, stop) in observation order; a partition of [0, 616).
SEGMENTS = (
    ("command_current", 0, TARGET_FRAME_DIM),
    ("command_short", TARGET_FRAME_DIM, TARGET_FRAME_DIM * 3),
    ("command_long", TARGET_FRAME_DIM * 3, COMMAND_DIM),
    ("anchor_ori_6d", COMMAND_DIM, COMMAND_DIM + 6),
    ("base_ang_vel", COMMAND_DIM + 6, COMMAND_DIM + 9),
    ("joint_pos", COMMAND_DIM + 9, COMMAND_DIM + 38),
    ("joint_vel", COMMAND_DIM + 38, COMMAND_DIM + 67),
    ("prev_actions", COMMAND_DIM + 67, OBSERVATION_DIM),
)
SEGMENT_SLICES = {name: slice(start, stop) for name, start, stop in SEGMENTS}

_PROPRIO_WIDTHS = {
    "anchor_ori_6d": 6,
    "base_ang_vel": 3,
    "joint_pos": JOINT_COUNT,
    "joint_vel": JOINT_COUNT,
    "prev_actions": JOINT_COUNT,
}


@dataclass(frozen=True)
class CommandLayout:
    """Configurable pieces of the motion-command construction."""

    long_stride: int = 5                          # frames between far-future targets
    key_body_indices: tuple = (1, 2, 3, 4, 5, 6, 7)

    def __post_init__(self) -> None:
        if self.long_stride < 1:
            raise ValueError("long_stride must be at least 1")
        if len(self.key_body_indices) != KEY_BODY_COUNT:
            raise ValueError(f"exactly {KEY_BODY_COUNT} key bodies are required")


DEFAULT_LAYOUT = CommandLayout()


@dataclass
class Proprioception:
    """Actor proprioceptive inputs (96 values across five segments)."""

    anchor_ori_6d: np.ndarray  # (6,)
    base_ang_vel: np.ndarray   # (3,)
    joint_pos: np.ndarray      # (29,)
    joint_vel: np.ndarray      # (29,)
    prev_actions: np.ndarray   # (29,)

    def segments(self) -> dict:
        return {name: np.asarray(getattr(self, name), dtype=np.float64) for name in _PROPRIO_WIDTHS}


def target_frame(frame: RobotFrame, layout: CommandLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """The 65-value tracking target for one reference frame."""
    a = frame.anchor_index
    keys = list(layout.key_body_indices)
    if max(keys) >= frame.n_bodies:
        raise ValueError(
            f"key body index {max(keys)} out of range for {frame.n_bodies} bodies"
        )
    pos = np.asarray(frame.body_pos, dtype=np.float64)
    inv = quat_conjugate(np.asarray(frame.body_quat, dtype=np.float64)[a])
    key_rel = quat_rotate(inv, pos[keys] - pos[a])
    return np.concatenate(
        [
            np.asarray(frame.joint_pos, dtype=np.float64),
            pos[a],
            quat_to_6d(frame.body_quat[a]),
            np.asarray(frame.body_lin_vel, dtype=np.float64)[a],
            np.asarray(frame.body_ang_vel, dtype=np.float64)[a],
            key_rel.ravel(),
        ]
    )


def command_frame_indices(t: int, n_frames: int, layout: CommandLayout = DEFAULT_LAYOUT) -> list:
    """Reference frame indices for the 8 command slots, clamped to the clip end."""
    if not 0 <= t < n_frames:
        raise ValueError(f"frame index {t} out of range for {n_frames} frames")
    idx = [t]
    idx += [t + k for k in range(1, SHORT_HORIZON_FRAMES + 1)]
    idx += [t + k * layout.long_stride for k in range(1, LONG_HORIZON_FRAMES + 1)]
    return [min(i, n_frames - 1) for i in idx]


def build_command(clip: MotionClip, t: int, layout: CommandLayout = DEFAULT_LAYOUT) -> np.ndarray:
    """Multi-scale motion command: current, short-, and long-horizon targets."""
    if clip.n_frames == 0:
        raise ValueError("cannot build a command from an empty clip")
    indices = command_frame_indices(t, clip.n_frames, layout)
    return np.concatenate([target_frame(clip.frames[i], layout) for i in indices])


def assemble_observation(command: np.ndarray, proprio: Proprioception) -> np.ndarray:
    """Concatenate command and proprioceptive segments into the 616-vector.

    Raises on any width mismatch, naming the offending segment.
    """
    command = np.asarray(command, dtype=np.float64)
    if command.shape != (COMMAND_DIM,):
        raise ValueError(f"segment 'command' must have {COMMAND_DIM} values, got {command.shape}")
    parts = [command]
    for name, width in _PROPRIO_WIDTHS.items():
        seg = np.asarray(getattr(proprio, name), dtype=np.float64)
        if seg.shape != (width,):
            raise ValueError(f"segment '{name}' must have {width} values, got {seg.shape}")
        parts.append(seg)
    obs = np.concatenate(parts)
    assert obs.shape == (OBSERVATION_DIM,)
    return obs


def build_observation(
    clip: MotionClip,
    t: int,
    proprio: Proprioception,
    layout: CommandLayout = DEFAULT_LAYOUT,
) -> np.ndarray:
    """Full 616-dimensional actor observation for clip time t."""
    return assemble_observation(build_command(clip, t, layout), proprio)


def slice_segment(observation: np.ndarray, name: str) -> np.ndarray:
    """View of one named segment of an observation vector."""
    observation = np.asarray(observation)
    if observation.shape[-1] != OBSERVATION_DIM:
        raise ValueError(f"observation must have {OBSERVATION_DIM} values")
    return observation[..., SEGMENT_SLICES[name]]


def long_horizon_block(observation: np.ndarray) -> np.ndarray:
    """The far-future command as a (5, 65) block (input contract for a
    downstream temporal encoder)."""
    return slice_segment(observation, "command_long").reshape(LONG_HORIZON_FRAMES, TARGET_FRAME_DIM)


def offsets_manifest() -> str:
    """Text manifest of the segment offset table (name start stop lines)."""
    lines = [f"{name} {start} {stop}" for name, start, stop in SEGMENTS]
    return "\n".join(lines) + "\n"


def export_offsets(path) -> None:
    Path(path).write_text(offsets_manifest())
