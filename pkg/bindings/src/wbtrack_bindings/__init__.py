"""Flat-array boundary over the wbtrack training infrastructure.

Everything crossing this boundary is a flat numeric array or a scalar: no
object graphs, no nested structures.  Clips and bodies are identified
positionally; contact allowed-ness travels as a 0/1 mask aligned with the
force array.  Stateful pieces (scheduler, curriculum) live behind integer
handles; a handle stays valid until released, and mutation through it is
guarded against reentrancy.  No algorithm is reimplemented here — every
call marshals into the primary package and back.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager

import numpy as np

import wbtrack
from wbtrack.curriculum import CurriculumConfig, CurriculumState, effective_weights, tick
from wbtrack.metrics import TrajectoryPair, mpjae, mpjpe, mpjve
from wbtrack.motion import JOINT_COUNT, RobotFrame
from wbtrack.observation import (
    SEGMENTS,
    TARGET_FRAME_DIM,
    CommandLayout,
    Proprioception,
    assemble_observation,
    command_frame_indices,
)
from wbtrack.rewards import (
    PENALTY_TERMS,
    TASK_TERMS,
    BodyStatePair,
    ControlStep,
    RewardConfig,
    RewardTerm,
    regularization,
    task_rewards,
)
from wbtrack.scheduler import (
    SchedulerConfig,
    SchedulerState,
    sample_from_weights,
    sampling_distribution,
)

__version__ = wbtrack.__version__  # the boundary tracks the primary library

__all__ = [
    "create_scheduler",
    "release_scheduler",
    "scheduler_update_batch",
    "scheduler_distribution",
    "scheduler_scores",
    "scheduler_stats",
    "scheduler_sample",
    "create_curriculum",
    "release_curriculum",
    "curriculum_tick",
    "curriculum_weights",
    "curriculum_state",
    "reward_task_terms",
    "reward_penalty_terms",
    "observation_command",
    "observation_assemble",
    "observation_segments",
    "tracking_errors",
]


# ---------------------------------------------------------------------------
# Handle registry
# ---------------------------------------------------------------------------

class _Slot:
    __slots__ = ("kind", "state", "config", "levels", "busy")

    def __init__(self, kind, state, config, levels=None):
        self.kind = kind
        self.state = state
        self.config = config
        self.levels = levels
        self.busy = False


_slots: dict = {}
_ids = itertools.count(1)


def _get(handle: int, kind: str) -> _Slot:
    slot = _slots.get(handle)
    if slot is None or slot.kind != kind:
        raise ValueError(f"unknown or released {kind} handle {handle}")
    return slot


@contextmanager
def _mutating(slot: _Slot):
    if slot.busy:
        raise RuntimeError("reentrant mutation on a bound handle")
    slot.busy = True
    try:
        yield
    finally:
        slot.busy = False


def _flat(values, name: str, dtype=np.float64) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a flat 1-D array, got shape {arr.shape}")
    return arr


# ---------------------------------------------------------------------------
# Scheduler
# ---------------------------------------------------------------------------

def create_scheduler(
    n_clips: int,
    *,
    error_ema_rate: float = 0.1,
    outcome_ema_rate: float = 0.05,
    failure_weight: float = 0.5,
    error_scale: float = 0.5,
    log_gain: float = 1.0,
    temperature: float = 1.0,
    explore_ratio: float = 0.1,
    eps: float = 1e-6,
) -> int:
    """New scheduler handle over ``n_clips`` positionally identified clips."""
    config = SchedulerConfig(
        error_ema_rate=error_ema_rate,
        outcome_ema_rate=outcome_ema_rate,
        failure_weight=failure_weight,
        error_scale=error_scale,
        log_gain=log_gain,
        temperature=temperature,
        explore_ratio=explore_ratio,
        eps=eps,
    )
    state = SchedulerState.for_clips([f"clip_{i}" for i in range(int(n_clips))])
    handle = next(_ids)
    _slots[handle] = _Slot("scheduler", state, config)
    return handle


def release_scheduler(handle: int) -> None:
    _get(handle, "scheduler")
    del _slots[handle]


def scheduler_update_batch(handle: int, clip_indices, errors, successes) -> None:
    """One ordered batch of per-clip updates; arrays must share a length."""
    slot = _get(handle, "scheduler")
    idx = _flat(clip_indices, "clip_indices", dtype=np.int64)
    err = _flat(errors, "errors")
    succ = _flat(successes, "successes")
    if not idx.size == err.size == succ.size:
        raise ValueError(
            f"batch arrays must have equal lengths, got {idx.size}/{err.size}/{succ.size}"
        )
    with _mutating(slot):
        slot.state.apply_batch(idx, err, succ != 0, slot.config)


def scheduler_distribution(handle: int) -> np.ndarray:
    """Current sampling probabilities, one per clip."""
    slot = _get(handle, "scheduler")
    return sampling_distribution(slot.state, slot.config)


def scheduler_scores(handle: int) -> np.ndarray:
    slot = _get(handle, "scheduler")
    return slot.state.scores(slot.config)


def scheduler_stats(handle: int) -> np.ndarray:
    """(N, 4) columns: error EMA, success EMA, failure EMA, initialized flag."""
    slot = _get(handle, "scheduler")
    return np.array(
        [[s.error_ema, s.success_ema, s.failure_ema, float(s.initialized)]
         for s in slot.state.stats],
        dtype=np.float64,
    )


def scheduler_sample(handle: int, count: int, seed: int, weights=None) -> np.ndarray:
    """Seeded i.i.d. clip-index draws from the current (or given) weights."""
    slot = _get(handle, "scheduler")
    if weights is None:
        weights = sampling_distribution(slot.state, slot.config)
    return sample_from_weights(_flat(weights, "weights"), int(count), np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# Curriculum
# ---------------------------------------------------------------------------

def create_curriculum(
    clip_levels,
    *,
    pos_threshold: float = 0.12,
    ang_threshold: float = 0.30,
    auto_advance_iters: int = 2000,
    new_level_bias: float = 2.0,
    min_level_ratio: float = 0.05,
    ramp_iters: int = 50,
) -> int:
    """New curriculum handle over per-clip difficulty ratings (flat int array)."""
    config = CurriculumConfig(
        pos_threshold=pos_threshold,
        ang_threshold=ang_threshold,
        auto_advance_iters=auto_advance_iters,
        new_level_bias=new_level_bias,
        min_level_ratio=min_level_ratio,
        ramp_iters=ramp_iters,
    )
    levels = _flat(clip_levels, "clip_levels", dtype=np.int64)
    handle = next(_ids)
    _slots[handle] = _Slot("curriculum", CurriculumState(), config, levels=levels)
    return handle


def release_curriculum(handle: int) -> None:
    _get(handle, "curriculum")
    del _slots[handle]


def curriculum_tick(handle: int, metric_levels, pos_errors, ang_errors) -> int:
    """One iteration transition; parallel flat arrays of per-level metrics.

    Returns the frontier level after the transition.
    """
    slot = _get(handle, "curriculum")
    levels = _flat(metric_levels, "metric_levels", dtype=np.int64)
    pos = _flat(pos_errors, "pos_errors")
    ang = _flat(ang_errors, "ang_errors")
    if not levels.size == pos.size == ang.size:
        raise ValueError(
            f"metric arrays must have equal lengths, got {levels.size}/{pos.size}/{ang.size}"
        )
    metrics = {int(l): (float(p), float(a)) for l, p, a in zip(levels, pos, ang)}
    with _mutating(slot):
        slot.state, _ = tick(slot.state, slot.config, metrics)
    return slot.state.max_unlocked


def curriculum_weights(handle: int, base_probs) -> np.ndarray:
    """Curriculum-adjusted probabilities for a base distribution."""
    slot = _get(handle, "curriculum")
    base = _flat(base_probs, "base_probs")
    return effective_weights(base, slot.levels, slot.state, slot.config)


def curriculum_state(handle: int):
    """(max_unlocked, iters_at_level, ramp_progress) scalars."""
    slot = _get(handle, "curriculum")
    return slot.state.max_unlocked, slot.state.iters_at_level, slot.state.ramp_progress


# ---------------------------------------------------------------------------
# Rewards (stateless)
# ---------------------------------------------------------------------------

def _frame_from_flat(body_pos, body_quat, body_lin_vel, body_ang_vel, anchor_index, name):
    pos = _flat(body_pos, f"{name}_body_pos")
    if pos.size % 3:
        raise ValueError(f"{name}_body_pos length {pos.size} is not a multiple of 3")
    n = pos.size // 3
    quat = _flat(body_quat, f"{name}_body_quat")
    lin = _flat(body_lin_vel, f"{name}_body_lin_vel")
    ang = _flat(body_ang_vel, f"{name}_body_ang_vel")
    if quat.size != 4 * n or lin.size != 3 * n or ang.size != 3 * n:
        raise ValueError(f"{name} arrays disagree on the body count {n}")
    return RobotFrame(
        joint_pos=np.zeros(JOINT_COUNT),
        joint_vel=np.zeros(JOINT_COUNT),
        body_pos=pos.reshape(n, 3),
        body_quat=quat.reshape(n, 4),
        body_lin_vel=lin.reshape(n, 3),
        body_ang_vel=ang.reshape(n, 3),
        anchor_index=int(anchor_index),
    )


def _reward_config(task_weights, task_sigmas) -> RewardConfig:
    if task_weights is None and task_sigmas is None:
        return RewardConfig()
    default = RewardConfig()
    weights = _flat(
        task_weights if task_weights is not None
        else [default.term(n).weight for n in TASK_TERMS],
        "task_weights",
    )
    sigmas = _flat(
        task_sigmas if task_sigmas is not None
        else [default.term(n).sigma for n in TASK_TERMS],
        "task_sigmas",
    )
    if weights.size != len(TASK_TERMS) or sigmas.size != len(TASK_TERMS):
        raise ValueError(f"task_weights and task_sigmas must each have {len(TASK_TERMS)} entries")
    terms = {
        name: RewardTerm(float(w), float(s))
        for name, w, s in zip(TASK_TERMS, weights, sigmas)
    }
    return RewardConfig(**terms)


def reward_task_terms(
    anchor_index: int,
    ref_body_pos, ref_body_quat, ref_body_lin_vel, ref_body_ang_vel,
    act_body_pos, act_body_quat, act_body_lin_vel, act_body_ang_vel,
    task_weights=None,
    task_sigmas=None,
) -> np.ndarray:
    """The six task rewards plus total, as a 7-array in declaration order."""
    ref = _frame_from_flat(ref_body_pos, ref_body_quat, ref_body_lin_vel, ref_body_ang_vel,
                           anchor_index, "ref")
    act = _frame_from_flat(act_body_pos, act_body_quat, act_body_lin_vel, act_body_ang_vel,
                           anchor_index, "act")
    terms = task_rewards(BodyStatePair(reference=ref, actual=act),
                         _reward_config(task_weights, task_sigmas))
    return np.array([terms[name] for name in TASK_TERMS] + [terms["total"]])


def reward_penalty_terms(
    action, prev_action, limits_lo, limits_hi, contact_forces, contact_allowed,
    *,
    action_rate_weight: float = -0.1,
    joint_limit_weight: float = -10.0,
    contact_weight: float = -0.1,
    contact_force_threshold: float = 1.0,
) -> np.ndarray:
    """The three penalties plus total, as a 4-array.

    ``contact_allowed`` is a 0/1 mask aligned with ``contact_forces``; bodies
    are positional on this side of the boundary.
    """
    lo = _flat(limits_lo, "limits_lo")
    hi = _flat(limits_hi, "limits_hi")
    if lo.size != JOINT_COUNT or hi.size != JOINT_COUNT:
        raise ValueError(f"joint limits must have {JOINT_COUNT} entries per side")
    forces = _flat(contact_forces, "contact_forces")
    allowed = _flat(contact_allowed, "contact_allowed")
    if forces.size != allowed.size:
        raise ValueError(
            f"contact arrays must have equal lengths, got {forces.size}/{allowed.size}"
        )
    step = ControlStep(
        action=_flat(action, "action"),
        prev_action=_flat(prev_action, "prev_action"),
        joint_limits=np.stack([lo, hi], axis=1),
        contact_forces={f"body_{i}": float(f) for i, f in enumerate(forces)},
    )
    config = RewardConfig(
        action_rate_weight=action_rate_weight,
        joint_limit_weight=joint_limit_weight,
        contact_weight=contact_weight,
        contact_force_threshold=contact_force_threshold,
        allowed_contact_bodies=frozenset(
            f"body_{i}" for i, a in enumerate(allowed) if a != 0
        ),
    )
    terms = regularization(step, config)
    return np.array([terms[name] for name in PENALTY_TERMS] + [terms["total"]])


# ---------------------------------------------------------------------------
# Observation (stateless)
# ---------------------------------------------------------------------------

def observation_command(target_frames, t: int, long_stride: int = 5) -> np.ndarray:
    """Multi-scale command from a flat buffer of precomputed target frames.

    ``target_frames`` has length frames*65 (one 65-value target per frame);
    slot indices clamp at the clip end exactly as in the primary builder.
    """
    flat = _flat(target_frames, "target_frames")
    if flat.size == 0 or flat.size % TARGET_FRAME_DIM:
        raise ValueError(
            f"target_frames length {flat.size} is not a positive multiple of {TARGET_FRAME_DIM}"
        )
    frames = flat.reshape(-1, TARGET_FRAME_DIM)
    layout = CommandLayout(long_stride=int(long_stride))
    indices = command_frame_indices(int(t), frames.shape[0], layout)
    return frames[indices].ravel()


def observation_assemble(
    command, anchor_ori_6d, base_ang_vel, joint_pos, joint_vel, prev_actions
) -> np.ndarray:
    """Concatenate command and proprioceptive segments into the 616-vector."""
    proprio = Proprioception(
        anchor_ori_6d=_flat(anchor_ori_6d, "anchor_ori_6d"),
        base_ang_vel=_flat(base_ang_vel, "base_ang_vel"),
        joint_pos=_flat(joint_pos, "joint_pos"),
        joint_vel=_flat(joint_vel, "joint_vel"),
        prev_actions=_flat(prev_actions, "prev_actions"),
    )
    return assemble_observation(_flat(command, "command"), proprio)


def observation_segments():
    """Static offset table: tuple of (name, start, stop)."""
    return tuple(SEGMENTS)


# ---------------------------------------------------------------------------
# Metrics (stateless)
# ---------------------------------------------------------------------------

def tracking_errors(
    n_bodies: int,
    ref_body_pos, act_body_pos,
    ref_joint_pos, act_joint_pos,
    ref_joint_vel, act_joint_vel,
) -> np.ndarray:
    """(mpjpe, mpjae, mpjve) over flat per-frame arrays.

    ``*_body_pos`` have length frames*n_bodies*3; joint arrays frames*29.
    """
    n_bodies = int(n_bodies)
    rp = _flat(ref_body_pos, "ref_body_pos")
    ap = _flat(act_body_pos, "act_body_pos")
    rj = _flat(ref_joint_pos, "ref_joint_pos")
    aj = _flat(act_joint_pos, "act_joint_pos")
    rv = _flat(ref_joint_vel, "ref_joint_vel")
    av = _flat(act_joint_vel, "act_joint_vel")
    if rp.size != ap.size or rp.size % (3 * n_bodies):
        raise ValueError("body position arrays must align on frames * n_bodies * 3")
    frames = rp.size // (3 * n_bodies)
    for arr, name in ((rj, "ref_joint_pos"), (aj, "act_joint_pos"),
                      (rv, "ref_joint_vel"), (av, "act_joint_vel")):
        if arr.size != frames * JOINT_COUNT:
            raise ValueError(f"{name} must have frames * {JOINT_COUNT} entries")

    def frames_of(pos, jpos, jvel):
        quat = np.zeros((n_bodies, 4))
        quat[:, 0] = 1.0
        return [
            RobotFrame(
                joint_pos=jpos[t * JOINT_COUNT:(t + 1) * JOINT_COUNT],
                joint_vel=jvel[t * JOINT_COUNT:(t + 1) * JOINT_COUNT],
                body_pos=pos[t * n_bodies * 3:(t + 1) * n_bodies * 3].reshape(n_bodies, 3),
                body_quat=quat,
                body_lin_vel=np.zeros((n_bodies, 3)),
                body_ang_vel=np.zeros((n_bodies, 3)),
            )
            for t in range(frames)
        ]

    pair = TrajectoryPair(
        reference=frames_of(rp, rj, rv),
        actual=frames_of(ap, aj, av),
    )
    return np.array([mpjpe(pair), mpjae(pair), mpjve(pair)])
