"""Quaternion and rotation helpers shared by the reward and observation code.

Conventions
-----------
- Quaternions are scalar-first ``(w, x, y, z)``, unit norm, world-to-body.
- All functions accept batches: a quaternion argument has shape ``[..., 4]``
  and vector arguments ``[..., 3]``; outputs broadcast accordingly.
- Angles are radians.
"""

from __future__ import annotations

import numpy as np

UNIT_NORM_TOL = 1e-6


def check_unit(q: np.ndarray, name: str = "quaternion") -> np.ndarray:
    """Validate unit norm within 1e-6 and return the input as float64."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape[-1] != 4:
        raise ValueError(f"{name} must have 4 components, got shape {q.shape}")
    norms = np.linalg.norm(q, axis=-1)
    if not np.all(np.abs(norms - 1.0) <= UNIT_NORM_TOL):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise ValueError(f"{name} is not unit norm (max deviation {worst:.3e})")
    return q


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    """Conjugate (= inverse for unit quaternions)."""
    out = np.array(q, dtype=np.float64, copy=True)
    out[..., 1:] = -out[..., 1:]
    return out


def quat_mul(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Hamilton product q1 * q2, both (w, x, y, z)."""
    w1, x1, y1, z1 = (np.asarray(q1, dtype=np.float64)[..., i] for i in range(4))
    w2, x2, y2, z2 = (np.asarray(q2, dtype=np.float64)[..., i] for i in range(4))
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vectors v [..., 3] by unit quaternions q [..., 4]."""
    q = np.asarray(q, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    vx, vy, vz = v[..., 0], v[..., 1], v[..., 2]
    px = (1 - 2 * (y * y + z * z)) * vx + 2 * (x * y - w * z) * vy + 2 * (x * z + w * y) * vz
    py = 2 * (x * y + w * z) * vx + (1 - 2 * (x * x + z * z)) * vy + 2 * (y * z - w * x) * vz
    pz = 2 * (x * z - w * y) * vx + 2 * (y * z + w * x) * vy + (1 - 2 * (x * x + y * y)) * vz
    return np.stack([px, py, pz], axis=-1)


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    """Unit quaternion for a rotation of `angle` radians about `axis`."""
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    return np.concatenate([[np.cos(half)], np.sin(half) * axis])


def quat_error(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Geodesic angle between two unit quaternions, in [0, pi].

    Sign-insensitive: q and -q encode the same rotation, so the absolute
    dot product is used.  Inputs must be unit norm within 1e-6.
    """
    q1 = check_unit(q1, "q1")
    q2 = check_unit(q2, "q2")
    dot = np.clip(np.abs(np.sum(q1 * q2, axis=-1)), 0.0, 1.0)
    angle = 2.0 * np.arccos(dot)
    return angle if angle.ndim else float(angle)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Rotation matrix [..., 3, 3] from unit quaternion."""
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    row0 = np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1)
    row1 = np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1)
    row2 = np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def quat_to_6d(q: np.ndarray) -> np.ndarray:
    """First two columns of the rotation matrix, column-major, shape [..., 6].

    A continuous orientation encoding; identical for q and -q.  Input must
    be unit norm within 1e-6.
    """
    q = check_unit(q)
    mat = quat_to_matrix(q)
    return np.concatenate([mat[..., :, 0], mat[..., :, 1]], axis=-1)


def so3_log(q: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle) of a unit quaternion, shape [..., 3].

    Uses the shortest representation (angle in [0, pi]) and the small-angle
    expansion near identity.
    """
    q = np.asarray(q, dtype=np.float64)
    # Flip to the w >= 0 hemisphere so the angle is shortest.
    q = np.where(q[..., :1] < 0.0, -q, q)
    vec = q[..., 1:]
    sin_half = np.linalg.norm(vec, axis=-1)
    cos_half = np.clip(q[..., 0], -1.0, 1.0)
    angle = 2.0 * np.arctan2(sin_half, cos_half)
    scale = np.where(sin_half > 1e-12, angle / np.where(sin_half > 1e-12, sin_half, 1.0), 2.0)
    return vec * scale[..., None]
