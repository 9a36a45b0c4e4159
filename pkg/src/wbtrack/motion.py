"""Motion clips, frames, and the on-disk clip library.

A library is a directory of ``*.clip`` files, one clip per file, loaded in
lexicographic filename order.  The clip file format is line-oriented text:

    wbtrack-clip v1
    name walk_01
    fps 30.0
    difficulty 3
    layout robot
    n_bodies 13
    anchor_index 0
    frames 120
    field joint_pos 120 29
    <120 lines of 29 numbers>
    field body_pos 120 39
    ...
    end

Robot-layout fields: ``joint_pos`` (F, 29), ``body_pos`` (F, N*3),
``body_quat`` (F, N*4, scalar-first unit quaternions), and optionally
``joint_vel``, ``body_lin_vel``, ``body_ang_vel``.  Missing velocity fields
are synthesized by forward differencing at load time.  Human-layout fields:
``pose`` (F, 66) and ``translation`` (F, 3).

Floats are written with ``repr`` so a save/load round trip is exact and a
second save is byte-identical.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .rotations import UNIT_NORM_TOL, quat_conjugate, quat_mul, so3_log

JOINT_COUNT = 29
HUMAN_POSE_DIM = 66
DEFAULT_N_BODIES = 13
CLIP_SUFFIX = ".clip"
_FORMAT_LINE = "wbtrack-clip v1"
_NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")

ROBOT_FIELDS = ("joint_pos", "joint_vel", "body_pos", "body_quat", "body_lin_vel", "body_ang_vel")
HUMAN_FIELDS = ("pose", "translation")
_VELOCITY_FIELDS = ("joint_vel", "body_lin_vel", "body_ang_vel")


class ClipFormatError(ValueError):
    """Malformed clip file; the message names the file and offending field."""


@dataclass
class HumanMotionFrame:
    """One frame of human motion: 66 axis-angle pose values + 3-D translation."""

    pose: np.ndarray         # (66,) rad, first 3 = global root orientation
    translation: np.ndarray  # (3,) m, world frame


@dataclass
class RobotFrame:
    """One frame of robot whole-body state, world frame throughout."""

    joint_pos: np.ndarray     # (29,) rad
    joint_vel: np.ndarray     # (29,) rad/s
    body_pos: np.ndarray      # (N, 3) m
    body_quat: np.ndarray     # (N, 4) unit quaternions (w, x, y, z)
    body_lin_vel: np.ndarray  # (N, 3) m/s
    body_ang_vel: np.ndarray  # (N, 3) rad/s
    anchor_index: int = 0

    @property
    def n_bodies(self) -> int:
        return self.body_pos.shape[0]


@dataclass
class MotionClip:
    """A named, timed sequence of frames with a difficulty rating (1-10)."""

    name: str
    fps: float
    difficulty: int
    frames: list  # list[RobotFrame] or list[HumanMotionFrame], one layout per clip
    layout: str = "robot"  # "robot" | "human"

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def duration(self) -> float:
        return self.n_frames / self.fps

    @property
    def n_bodies(self) -> int:
        if self.layout != "robot" or not self.frames:
            return 0
        return self.frames[0].n_bodies

    @property
    def anchor_index(self) -> int:
        return self.frames[0].anchor_index if self.layout == "robot" and self.frames else 0

    def field_array(self, name: str) -> np.ndarray:
        """Stack one frame field over time, e.g. joint_pos -> (F, 29)."""
        return np.stack([np.asarray(getattr(f, name), dtype=np.float64) for f in self.frames])


@dataclass
class MotionLibrary:
    """Ordered, name-indexed clip collection.  Immutable after load."""

    clips: list = field(default_factory=list)

    def __post_init__(self) -> None:
        self._by_name = {c.name: c for c in self.clips}
        if len(self._by_name) != len(self.clips):
            raise ValueError("duplicate clip names in library")

    def __len__(self) -> int:
        return len(self.clips)

    def __iter__(self) -> Iterator[MotionClip]:
        return iter(self.clips)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self._by_name[key]
        return self.clips[key]

    @property
    def names(self) -> list:
        return [c.name for c in self.clips]

    def levels(self) -> np.ndarray:
        """Per-clip difficulty ratings, in library order."""
        return np.array([c.difficulty for c in self.clips], dtype=np.int64)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _finite(arr: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(arr)))


def validate_clip(clip: MotionClip) -> list:
    """Check every clip invariant; returns a list of violation strings.

    Empty list iff the clip would be accepted by load_library.  Nothing is
    raised: callers decide whether violations are fatal.
    """
    out: list = []
    if not isinstance(clip.name, str) or not _NAME_RE.match(clip.name):
        out.append(f"name {clip.name!r} is not a plain token")
    if not (math.isfinite(clip.fps) and clip.fps > 0):
        out.append(f"fps {clip.fps} is not a positive finite number")
    if not (isinstance(clip.difficulty, int) and 1 <= clip.difficulty <= 10):
        out.append(f"difficulty {clip.difficulty} outside the 1-10 rating scale")
    if clip.layout not in ("robot", "human"):
        out.append(f"unknown layout {clip.layout!r}")
        return out
    if not clip.frames:
        out.append("clip has no frames")
        return out

    frame_type = RobotFrame if clip.layout == "robot" else HumanMotionFrame
    if any(not isinstance(f, frame_type) for f in clip.frames):
        out.append(f"frames do not all match layout {clip.layout!r}")
        return out

    if clip.layout == "human":
        for t, f in enumerate(clip.frames):
            if np.asarray(f.pose).shape != (HUMAN_POSE_DIM,):
                out.append(f"frame {t}: pose must have {HUMAN_POSE_DIM} values")
            elif not _finite(f.pose):
                out.append(f"frame {t}: pose contains non-finite values")
            if np.asarray(f.translation).shape != (3,):
                out.append(f"frame {t}: translation must have 3 values")
            elif not _finite(f.translation):
                out.append(f"frame {t}: translation contains non-finite values")
        return out

    n_bodies = clip.frames[0].n_bodies
    anchor = clip.frames[0].anchor_index
    if not 0 <= anchor < n_bodies:
        out.append(f"anchor_index {anchor} out of range for {n_bodies} bodies")
    for t, f in enumerate(clip.frames):
        if f.n_bodies != n_bodies or f.anchor_index != anchor:
            out.append(f"frame {t}: body count or anchor differs from frame 0")
            continue
        for fname, width in (("joint_pos", JOINT_COUNT), ("joint_vel", JOINT_COUNT)):
            arr = np.asarray(getattr(f, fname))
            if arr.shape != (width,):
                out.append(f"frame {t}: {fname} must have {width} values, got shape {arr.shape}")
            elif not _finite(arr):
                out.append(f"frame {t}: {fname} contains non-finite values")
        for fname in ("body_pos", "body_lin_vel", "body_ang_vel"):
            arr = np.asarray(getattr(f, fname))
            if arr.shape != (n_bodies, 3):
                out.append(f"frame {t}: {fname} must have shape ({n_bodies}, 3)")
            elif not _finite(arr):
                out.append(f"frame {t}: {fname} contains non-finite values")
        quat = np.asarray(f.body_quat)
        if quat.shape != (n_bodies, 4):
            out.append(f"frame {t}: body_quat must have shape ({n_bodies}, 4)")
        elif not _finite(quat):
            out.append(f"frame {t}: body_quat contains non-finite values")
        else:
            norms = np.linalg.norm(quat, axis=-1)
            for b in np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)[0]:
                out.append(f"frame {t} body {b}: quaternion norm {norms[b]:.6f} is not unit")
    return out


# ---------------------------------------------------------------------------
# Finite-difference velocities
# ---------------------------------------------------------------------------

def _forward_diff(values: np.ndarray, fps: float) -> np.ndarray:
    """Forward differences scaled by fps; the last row repeats the previous one."""
    vel = np.empty_like(values, dtype=np.float64)
    vel[:-1] = (values[1:] - values[:-1]) * fps
    vel[-1] = vel[-2]
    return vel


def _quat_diff_ang_vel(quats: np.ndarray, fps: float) -> np.ndarray:
    """World-frame angular velocities from successive quaternions, (F, N, 3)."""
    rel = quat_mul(quats[1:], quat_conjugate(quats[:-1]))
    omega = np.empty(quats.shape[:-1] + (3,), dtype=np.float64)
    omega[:-1] = so3_log(rel) * fps
    omega[-1] = omega[-2]
    return omega


def finite_difference_velocities(clip: MotionClip) -> MotionClip:
    """Recompute all velocity fields of a robot clip by forward differencing.

    joint_vel and body_lin_vel come from position differences * fps; angular
    velocities from the rotation vector of successive body quaternions * fps.
    The last frame repeats the second-to-last velocity.
    """
    if clip.layout != "robot":
        raise ValueError("finite_difference_velocities requires a robot-layout clip")
    if clip.n_frames < 2:
        raise ValueError("finite_difference_velocities requires at least 2 frames")
    joint_vel = _forward_diff(clip.field_array("joint_pos"), clip.fps)
    lin_vel = _forward_diff(clip.field_array("body_pos"), clip.fps)
    ang_vel = _quat_diff_ang_vel(clip.field_array("body_quat"), clip.fps)
    frames = [
        replace(f, joint_vel=joint_vel[t], body_lin_vel=lin_vel[t], body_ang_vel=ang_vel[t])
        for t, f in enumerate(clip.frames)
    ]
    return replace(clip, frames=frames)


# ---------------------------------------------------------------------------
# Clip file I/O
# ---------------------------------------------------------------------------

def _fmt_row(row: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in row)


def clip_to_text(clip: MotionClip) -> str:
    """Serialize a clip to the canonical text format (exact float round trip)."""
    violations = validate_clip(clip)
    if violations:
        raise ValueError(f"cannot serialize invalid clip {clip.name!r}: " + "; ".join(violations))
    lines = [
        _FORMAT_LINE,
        f"name {clip.name}",
        f"fps {clip.fps!r}",
        f"difficulty {clip.difficulty}",
        f"layout {clip.layout}",
    ]
    if clip.layout == "robot":
        lines.append(f"n_bodies {clip.n_bodies}")
        lines.append(f"anchor_index {clip.anchor_index}")
    lines.append(f"frames {clip.n_frames}")
    names = ROBOT_FIELDS if clip.layout == "robot" else HUMAN_FIELDS
    for fname in names:
        arr = clip.field_array(fname).reshape(clip.n_frames, -1)
        lines.append(f"field {fname} {arr.shape[0]} {arr.shape[1]}")
        lines.extend(_fmt_row(row) for row in arr)
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_clip(clip: MotionClip, path) -> None:
    Path(path).write_text(clip_to_text(clip))


def _frames_from_arrays(layout: str, arrays: dict, n_bodies: int, anchor_index: int, n_frames: int):
    if layout == "human":
        return [
            HumanMotionFrame(pose=arrays["pose"][t], translation=arrays["translation"][t])
            for t in range(n_frames)
        ]
    return [
        RobotFrame(
            joint_pos=arrays["joint_pos"][t],
            joint_vel=arrays["joint_vel"][t],
            body_pos=arrays["body_pos"][t].reshape(n_bodies, 3),
            body_quat=arrays["body_quat"][t].reshape(n_bodies, 4),
            body_lin_vel=arrays["body_lin_vel"][t].reshape(n_bodies, 3),
            body_ang_vel=arrays["body_ang_vel"][t].reshape(n_bodies, 3),
            anchor_index=anchor_index,
        )
        for t in range(n_frames)
    ]


def load_clip(path) -> MotionClip:
    """Parse and validate one clip file; missing velocity fields are synthesized."""
    path = Path(path)
    fname = path.name

    def fail(fieldname: str, msg: str):
        raise ClipFormatError(f"{fname}: field '{fieldname}': {msg}")

    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != _FORMAT_LINE:
        raise ClipFormatError(f"{fname}: field 'header': missing '{_FORMAT_LINE}' marker")

    header: dict = {}
    arrays: dict = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line == "end":
            break
        tokens = line.split()
        key = tokens[0]
        if key == "field":
            if len(tokens) != 4:
                fail("field", f"bad field record {line!r}")
            fld, rows, cols = tokens[1], tokens[2], tokens[3]
            try:
                rows, cols = int(rows), int(cols)
            except ValueError:
                fail(fld, "non-integer field dimensions")
            if i + rows > len(lines):
                fail(fld, f"expected {rows} data rows, file truncated")
            block = np.empty((rows, cols), dtype=np.float64)
            for r in range(rows):
                vals = lines[i + r].split()
                if len(vals) != cols:
                    fail(fld, f"row {r} has {len(vals)} values, expected {cols}")
                try:
                    block[r] = [float(v) for v in vals]
                except ValueError:
                    fail(fld, f"row {r} contains a non-numeric value")
            arrays[fld] = block
            i += rows
        else:
            if len(tokens) != 2:
                fail(key, f"bad header record {line!r}")
            header[key] = tokens[1]
    else:
        raise ClipFormatError(f"{fname}: field 'end': missing end marker")

    for required in ("name", "fps", "difficulty", "layout", "frames"):
        if required not in header:
            raise ClipFormatError(f"{fname}: field '{required}': missing header record")
    layout = header["layout"]
    try:
        fps = float(header["fps"])
        difficulty = int(header["difficulty"])
        n_frames = int(header["frames"])
    except ValueError:
        raise ClipFormatError(f"{fname}: field 'fps/difficulty/frames': non-numeric header value")

    if layout == "robot":
        for required in ("n_bodies", "anchor_index"):
            if required not in header:
                raise ClipFormatError(f"{fname}: field '{required}': missing header record")
        n_bodies = int(header["n_bodies"])
        anchor_index = int(header["anchor_index"])
        widths = {
            "joint_pos": JOINT_COUNT, "joint_vel": JOINT_COUNT,
            "body_pos": n_bodies * 3, "body_quat": n_bodies * 4,
            "body_lin_vel": n_bodies * 3, "body_ang_vel": n_bodies * 3,
        }
        required_fields = ("joint_pos", "body_pos", "body_quat")
    elif layout == "human":
        n_bodies, anchor_index = 0, 0
        widths = {"pose": HUMAN_POSE_DIM, "translation": 3}
        required_fields = HUMAN_FIELDS
    else:
        raise ClipFormatError(f"{fname}: field 'layout': unknown layout {layout!r}")

    for fld in arrays:
        if fld not in widths:
            fail(fld, f"unknown field for layout {layout!r}")
        if arrays[fld].shape != (n_frames, widths[fld]):
            fail(fld, f"shape {arrays[fld].shape} does not match ({n_frames}, {widths[fld]})")
    for fld in required_fields:
        if fld not in arrays:
            raise ClipFormatError(f"{fname}: field '{fld}': required field missing")

    synthesize = layout == "robot" and any(f not in arrays for f in _VELOCITY_FIELDS)
    if synthesize:
        for fld in _VELOCITY_FIELDS:
            arrays.setdefault(fld, np.zeros((n_frames, widths[fld])))

    clip = MotionClip(
        name=header["name"], fps=fps, difficulty=difficulty, layout=layout,
        frames=_frames_from_arrays(layout, arrays, n_bodies, anchor_index, n_frames),
    )
    violations = validate_clip(clip)
    if violations:
        raise ClipFormatError(f"{fname}: field 'body': " + "; ".join(violations))
    if synthesize:
        if n_frames < 2:
            raise ClipFormatError(
                f"{fname}: field 'joint_vel': cannot synthesize velocities for a 1-frame clip"
            )
        fd = finite_difference_velocities(clip)
        merged = dict(arrays)
        for fld in _VELOCITY_FIELDS:
            if fld not in _present_fields_of(lines):
                merged[fld] = fd.field_array(fld).reshape(n_frames, -1)
        clip = MotionClip(
            name=clip.name, fps=fps, difficulty=difficulty, layout=layout,
            frames=_frames_from_arrays(layout, merged, n_bodies, anchor_index, n_frames),
        )
    return clip


def _present_fields_of(lines) -> set:
    present = set()
    for line in lines:
        tokens = line.split()
        if tokens and tokens[0] == "field" and len(tokens) == 4:
            present.add(tokens[1])
    return present


# ---------------------------------------------------------------------------
# Library I/O
# ---------------------------------------------------------------------------

def load_library(path) -> MotionLibrary:
    """Load every ``*.clip`` file under ``path``, in lexicographic name order."""
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"library directory not found: {root}")
    clips = []
    seen: dict = {}
    for clip_path in sorted(root.glob("*" + CLIP_SUFFIX), key=lambda p: p.name):
        clip = load_clip(clip_path)
        if clip.name in seen:
            raise ValueError(
                f"duplicate clip name {clip.name!r} in {clip_path.name} and {seen[clip.name]}"
            )
        seen[clip.name] = clip_path.name
        clips.append(clip)
    return MotionLibrary(clips=clips)


def save_library(library: MotionLibrary, path) -> None:
    """Write one ``<name>.clip`` file per clip plus a ``manifest.txt``."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for clip in library:
        save_clip(clip, root / (clip.name + CLIP_SUFFIX))
    write_manifest(library, root / "manifest.txt")


def write_manifest(library: MotionLibrary, path) -> None:
    """Manifest: one ``<file> <difficulty>`` line per clip, library order."""
    lines = [f"{clip.name}{CLIP_SUFFIX} {clip.difficulty}" for clip in library]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


# ---------------------------------------------------------------------------
# Synthetic clips (fixtures for demos, sims, and tests)
# ---------------------------------------------------------------------------

def synthetic_clip(
    name: str,
    n_frames: int = 8,
    fps: float = 30.0,
    difficulty: int = 1,
    n_bodies: int = DEFAULT_N_BODIES,
    seed: int = 0,
) -> MotionClip:
    """A smooth random robot clip; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    joint_pos = np.cumsum(rng.normal(0.0, 0.02, size=(n_frames, JOINT_COUNT)), axis=0)
    body_pos = np.cumsum(rng.normal(0.0, 0.01, size=(n_frames, n_bodies, 3)), axis=0)
    body_pos[..., 2] += 0.8  # keep bodies above ground
    quat = rng.normal(size=(n_frames, n_bodies, 4))
    quat /= np.linalg.norm(quat, axis=-1, keepdims=True)
    frames = [
        RobotFrame(
            joint_pos=joint_pos[t],
            joint_vel=np.zeros(JOINT_COUNT),
            body_pos=body_pos[t],
            body_quat=quat[t],
            body_lin_vel=np.zeros((n_bodies, 3)),
            body_ang_vel=np.zeros((n_bodies, 3)),
        )
        for t in range(n_frames)
    ]
    clip = MotionClip(name=name, fps=fps, difficulty=difficulty, frames=frames)
    if n_frames >= 2:
        clip = finite_difference_velocities(clip)
    return clip
