"""Tracking rewards and regularization penalties for paired robot states.

Task terms compare a reference frame against the robot's actual frame
through an exponential kernel exp(-d^2 / sigma^2): anchor position and
orientation are compared globally, the remaining bodies are compared after
expressing them in each side's anchor frame, and body velocities are
compared in the world frame.  Penalty terms (action rate, joint limits,
undesired contacts) are always nonpositive.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .motion import JOINT_COUNT, RobotFrame
from .rotations import quat_conjugate, quat_error, quat_mul, quat_rotate

TASK_TERMS = ("anchor_pos", "anchor_ori", "rel_body_pos", "rel_body_ori", "body_lin_vel", "body_ang_vel")
PENALTY_TERMS = ("action_rate", "joint_limit", "contacts")

# Body parts allowed to touch the environment: feet and hands.
DEFAULT_ALLOWED_CONTACTS = frozenset({"left_ankle", "right_ankle", "left_wrist", "right_wrist"})


@dataclass(frozen=True)
class RewardTerm:
    weight: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")
        if not self.weight >= 0.0:
            raise ValueError("task term weights must be nonnegative")


@dataclass(frozen=True)
class RewardConfig:
    anchor_pos: RewardTerm = RewardTerm(0.8, 0.2)
    anchor_ori: RewardTerm = RewardTerm(0.5, 0.4)
    rel_body_pos: RewardTerm = RewardTerm(1.0, 0.3)
    rel_body_ori: RewardTerm = RewardTerm(1.0, 0.4)
    body_lin_vel: RewardTerm = RewardTerm(1.0, 1.0)
    body_ang_vel: RewardTerm = RewardTerm(1.0, 3.14)
    action_rate_weight: float = -0.1
    joint_limit_weight: float = -10.0
    contact_weight: float = -0.1
    contact_force_threshold: float = 1.0  # N
    allowed_contact_bodies: frozenset = DEFAULT_ALLOWED_CONTACTS

    def __post_init__(self) -> None:
        for name in ("action_rate_weight", "joint_limit_weight", "contact_weight"):
            if getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be nonpositive")
        object.__setattr__(self, "allowed_contact_bodies", frozenset(self.allowed_contact_bodies))

    def term(self, name: str) -> RewardTerm:
        return getattr(self, name)

    def to_dict(self) -> dict:
        d = {}
        for name in TASK_TERMS:
            t = self.term(name)
            d[name] = {"weight": t.weight, "sigma": t.sigma}
        d["action_rate_weight"] = self.action_rate_weight
        d["joint_limit_weight"] = self.joint_limit_weight
        d["contact_weight"] = self.contact_weight
        d["contact_force_threshold"] = self.contact_force_threshold
        d["allowed_contact_bodies"] = sorted(self.allowed_contact_bodies)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping) -> "RewardConfig":
        kwargs = dict(d)
        for name in TASK_TERMS:
            if name in kwargs:
                kwargs[name] = RewardTerm(**kwargs[name])
        if "allowed_contact_bodies" in kwargs:
            kwargs["allowed_contact_bodies"] = frozenset(kwargs["allowed_contact_bodies"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "RewardConfig":
        return cls.from_dict(json.loads(text))


@dataclass
class BodyStatePair:
    """Reference and actual robot frames sharing one body set and anchor."""

    reference: RobotFrame
    actual: RobotFrame

    def __post_init__(self) -> None:
        if self.reference.n_bodies != self.actual.n_bodies:
            raise ValueError(
                f"body count mismatch: reference {self.reference.n_bodies} "
                f"vs actual {self.actual.n_bodies}"
            )
        if self.reference.anchor_index != self.actual.anchor_index:
            raise ValueError("reference and actual frames must share the anchor body")


@dataclass
class ControlStep:
    """One control step: commanded joints, their limits, and contact forces."""

    action: np.ndarray        # (29,) commanded joint positions (rad)
    prev_action: np.ndarray   # (29,)
    joint_limits: np.ndarray  # (29, 2) lo < hi per joint (rad)
    contact_forces: Mapping   # body name -> contact force magnitude (N)

    def __post_init__(self) -> None:
        self.action = np.asarray(self.action, dtype=np.float64)
        self.prev_action = np.asarray(self.prev_action, dtype=np.float64)
        self.joint_limits = np.asarray(self.joint_limits, dtype=np.float64)
        if self.action.shape != (JOINT_COUNT,) or self.prev_action.shape != (JOINT_COUNT,):
            raise ValueError(f"actions must have {JOINT_COUNT} entries")
        if self.joint_limits.shape != (JOINT_COUNT, 2):
            raise ValueError(f"joint_limits must have shape ({JOINT_COUNT}, 2)")
        if not np.all(self.joint_limits[:, 0] < self.joint_limits[:, 1]):
            raise ValueError("each joint limit pair must satisfy lo < hi")


def neutral_step() -> ControlStep:
    """A step that incurs no penalties (for reward-only evaluations)."""
    limits = np.tile([-2.0 * math.pi, 2.0 * math.pi], (JOINT_COUNT, 1))
    return ControlStep(
        action=np.zeros(JOINT_COUNT),
        prev_action=np.zeros(JOINT_COUNT),
        joint_limits=limits,
        contact_forces={},
    )


def kernel(d: float, sigma: float) -> float:
    """Exponential error kernel exp(-d^2 / sigma^2), in (0, 1]."""
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    with np.errstate(over="ignore"):
        return float(np.exp(-np.float64(d) ** 2 / sigma ** 2))


def _anchor_relative(frame: RobotFrame):
    """Non-anchor body positions and orientations in the anchor body frame."""
    a = frame.anchor_index
    others = [i for i in range(frame.n_bodies) if i != a]
    inv = quat_conjugate(np.asarray(frame.body_quat, dtype=np.float64)[a])
    pos = np.asarray(frame.body_pos, dtype=np.float64)
    rel_pos = quat_rotate(inv, pos[others] - pos[a])
    rel_quat = quat_mul(inv, np.asarray(frame.body_quat, dtype=np.float64)[others])
    return rel_pos, rel_quat


def task_rewards(pair: BodyStatePair, cfg: RewardConfig = RewardConfig()) -> dict:
    """The six task terms plus their sum under key "total".

    Each term is weight * exp(-d^2 / sigma^2) where d is the Euclidean anchor
    error, the anchor geodesic orientation error, or the root-mean-square
    error over bodies for the relative and velocity terms.
    """
    ref, act = pair.reference, pair.actual
    a = ref.anchor_index

    def rms(errors_sq: np.ndarray) -> float:
        return math.sqrt(float(np.mean(errors_sq))) if errors_sq.size else 0.0

    d_anchor = float(np.linalg.norm(np.asarray(ref.body_pos[a]) - np.asarray(act.body_pos[a])))
    ang_anchor = float(quat_error(ref.body_quat[a], act.body_quat[a]))

    ref_pos, ref_quat = _anchor_relative(ref)
    act_pos, act_quat = _anchor_relative(act)
    d_rel = rms(np.sum((ref_pos - act_pos) ** 2, axis=-1))
    ang_rel = rms(np.atleast_1d(quat_error(ref_quat, act_quat)) ** 2) if len(ref_pos) else 0.0

    lin_err = np.asarray(ref.body_lin_vel, dtype=np.float64) - np.asarray(act.body_lin_vel, dtype=np.float64)
    ang_err = np.asarray(ref.body_ang_vel, dtype=np.float64) - np.asarray(act.body_ang_vel, dtype=np.float64)
    d_lin = rms(np.sum(lin_err ** 2, axis=-1))
    d_angv = rms(np.sum(ang_err ** 2, axis=-1))

    errors = {
        "anchor_pos": d_anchor,
        "anchor_ori": ang_anchor,
        "rel_body_pos": d_rel,
        "rel_body_ori": ang_rel,
        "body_lin_vel": d_lin,
        "body_ang_vel": d_angv,
    }
    out = {}
    for name in TASK_TERMS:
        term = cfg.term(name)
        out[name] = term.weight * kernel(errors[name], term.sigma)
    out["total"] = sum(out[name] for name in TASK_TERMS)
    return out


def regularization(step: ControlStep, cfg: RewardConfig = RewardConfig()) -> dict:
    """Action-rate, joint-limit, and contact penalties plus their sum."""
    rate = float(np.sum((step.action - step.prev_action) ** 2))
    out_of_range = int(
        np.count_nonzero(
            (step.action < step.joint_limits[:, 0]) | (step.action > step.joint_limits[:, 1])
        )
    )
    bad_contacts = sum(
        1
        for body, force in step.contact_forces.items()
        if body not in cfg.allowed_contact_bodies and force > cfg.contact_force_threshold
    )
    out = {
        "action_rate": cfg.action_rate_weight * rate,
        "joint_limit": cfg.joint_limit_weight * out_of_range,
        "contacts": cfg.contact_weight * bad_contacts,
    }
    out["total"] = sum(out[name] for name in PENALTY_TERMS)
    return out


def total_reward(pair: BodyStatePair, step: ControlStep, cfg: RewardConfig = RewardConfig()) -> float:
    """Weighted task rewards plus regularization penalties."""
    return task_rewards(pair, cfg)["total"] + regularization(step, cfg)["total"]
