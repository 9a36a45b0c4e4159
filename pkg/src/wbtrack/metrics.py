"""Joint-level tracking error metrics over paired trajectories.

mpjpe: mean Euclidean distance between world body positions (m).
mpjae: mean absolute joint-angle difference over the 29 joints (rad).
mpjve: mean absolute joint-velocity difference (rad/s).

Report aggregation pools all (frame, joint) samples: the overall mean is
the flat mean over every sample, so longer clips weigh proportionally more.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .motion import MotionClip

METRIC_NAMES = ("mpjpe", "mpjae", "mpjve")


@dataclass
class TrajectoryPair:
    """Equal-length reference and actual robot-frame sequences."""

    reference: Sequence
    actual: Sequence

    def __post_init__(self) -> None:
        if len(self.reference) != len(self.actual):
            raise ValueError(
                f"trajectory length mismatch: {len(self.reference)} vs {len(self.actual)}"
            )
        if len(self.reference) < 1:
            raise ValueError("trajectories must contain at least one frame")
        if self.reference[0].n_bodies != self.actual[0].n_bodies:
            raise ValueError("reference and actual trajectories must share the body count")

    def __len__(self) -> int:
        return len(self.reference)


def pair_from_clips(reference: MotionClip, actual: MotionClip) -> TrajectoryPair:
    return TrajectoryPair(reference=list(reference.frames), actual=list(actual.frames))


def _stack(frames, attr: str) -> np.ndarray:
    return np.stack([np.asarray(getattr(f, attr), dtype=np.float64) for f in frames])


def _sums(pair: TrajectoryPair) -> dict:
    """Per-metric (sum of sample errors, sample count) for pooled means."""
    ref_p = _stack(pair.reference, "body_pos")
    act_p = _stack(pair.actual, "body_pos")
    dist = np.linalg.norm(ref_p - act_p, axis=-1)  # (F, N)
    dang = np.abs(_stack(pair.reference, "joint_pos") - _stack(pair.actual, "joint_pos"))
    dvel = np.abs(_stack(pair.reference, "joint_vel") - _stack(pair.actual, "joint_vel"))
    return {
        "mpjpe": (float(dist.sum()), dist.size),
        "mpjae": (float(dang.sum()), dang.size),
        "mpjve": (float(dvel.sum()), dvel.size),
    }


def mpjpe(pair: TrajectoryPair) -> float:
    s, n = _sums(pair)["mpjpe"]
    return s / n


def mpjae(pair: TrajectoryPair) -> float:
    s, n = _sums(pair)["mpjae"]
    return s / n


def mpjve(pair: TrajectoryPair) -> float:
    s, n = _sums(pair)["mpjve"]
    return s / n


@dataclass
class MetricReport:
    """Pooled overall metrics plus per-level and per-clip breakdowns."""

    mpjpe: float
    mpjae: float
    mpjve: float
    per_level: dict = field(default_factory=dict)  # level -> {metric: value}
    per_clip: dict = field(default_factory=dict)   # clip name -> {metric: value}

    def to_csv_text(self) -> str:
        lines = ["scope,key,mpjpe,mpjae,mpjve"]

        def row(scope, key, values):
            return f"{scope},{key}," + ",".join(f"{values[m]:.6f}" for m in METRIC_NAMES)

        lines.append(row("overall", "all", {m: getattr(self, m) for m in METRIC_NAMES}))
        for level in sorted(self.per_level):
            lines.append(row("level", level, self.per_level[level]))
        for name in self.per_clip:
            lines.append(row("clip", name, self.per_clip[name]))
        return "\n".join(lines) + "\n"

    def format_table(self) -> str:
        rows = [("scope", "mpjpe (m)", "mpjae (rad)", "mpjve (rad/s)")]
        rows.append(("overall", f"{self.mpjpe:.6f}", f"{self.mpjae:.6f}", f"{self.mpjve:.6f}"))
        for level in sorted(self.per_level):
            v = self.per_level[level]
            rows.append((f"level {level}", *(f"{v[m]:.6f}" for m in METRIC_NAMES)))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        return "\n".join(lines) + "\n"


def per_level_report(
    pairs: Sequence[TrajectoryPair],
    levels: Sequence[int],
    names: Sequence[str] | None = None,
) -> MetricReport:
    """Pooled metric report over labeled trajectory pairs.

    Per-level and overall values are flat means over every (frame, joint)
    sample at that level, not means of per-clip means.
    """
    if len(pairs) != len(levels):
        raise ValueError("pairs and levels must have equal length")
    if not pairs:
        raise ValueError("at least one trajectory pair is required")
    if names is not None and len(names) != len(pairs):
        raise ValueError("names must align with pairs")

    all_sums = [_sums(p) for p in pairs]

    def pooled(selected) -> dict:
        out = {}
        for m in METRIC_NAMES:
            total = sum(all_sums[i][m][0] for i in selected)
            count = sum(all_sums[i][m][1] for i in selected)
            out[m] = total / count
        return out

    overall = pooled(range(len(pairs)))
    per_level = {
        int(level): pooled([i for i, l in enumerate(levels) if l == level])
        for level in sorted(set(int(l) for l in levels))
    }
    per_clip = {}
    if names is not None:
        for i, name in enumerate(names):
            per_clip[name] = pooled([i])
    return MetricReport(
        mpjpe=overall["mpjpe"],
        mpjae=overall["mpjae"],
        mpjve=overall["mpjve"],
        per_level=per_level,
        per_clip=per_clip,
    )
