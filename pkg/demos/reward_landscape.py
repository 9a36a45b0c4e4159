#!/usr/bin/env python3
"""Sweep tracking errors and print how each reward term falls off.

The exponential kernel exp(-d^2/sigma^2) maps zero error to the full term
weight and decays smoothly; sigma sets how forgiving each term is.
"""

import numpy as np

from wbtrack.motion import JOINT_COUNT, RobotFrame
from wbtrack.rewards import BodyStatePair, RewardConfig, neutral_step, regularization, task_rewards


def base_frame(n_bodies=13):
    quat = np.zeros((n_bodies, 4))
    quat[:, 0] = 1.0
    return RobotFrame(
        joint_pos=np.zeros(JOINT_COUNT), joint_vel=np.zeros(JOINT_COUNT),
        body_pos=np.zeros((n_bodies, 3)), body_quat=quat,
        body_lin_vel=np.zeros((n_bodies, 3)), body_ang_vel=np.zeros((n_bodies, 3)),
    )


cfg = RewardConfig()
ref = base_frame()

print("anchor position offset sweep (weight 0.8, sigma 0.2):")
print(f"{'offset (m)':>10}  {'anchor_pos':>10}  {'total':>8}")
for offset in (0.0, 0.05, 0.1, 0.2, 0.4, 0.8):
    act = base_frame()
    act.body_pos = act.body_pos + np.array([offset, 0.0, 0.0])
    terms = task_rewards(BodyStatePair(reference=ref, actual=act), cfg)
    print(f"{offset:>10.2f}  {terms['anchor_pos']:>10.4f}  {terms['total']:>8.4f}")

print("\nbody linear velocity error sweep (weight 1.0, sigma 1.0):")
print(f"{'vel err':>10}  {'body_lin_vel':>12}")
for verr in (0.0, 0.5, 1.0, 2.0, 4.0):
    act = base_frame()
    act.body_lin_vel = act.body_lin_vel + np.array([verr, 0.0, 0.0])
    terms = task_rewards(BodyStatePair(reference=ref, actual=act), cfg)
    print(f"{verr:>10.2f}  {terms['body_lin_vel']:>12.4f}")

print("\npenalties are flat per violation:")
step = neutral_step()
step.action = step.action.copy()
step.action[:3] = 100.0  # three joints far outside their limits
step.prev_action = step.action.copy()
step.contact_forces = {"torso": 3.0, "left_ankle": 200.0}
reg = regularization(step, cfg)
for name in ("action_rate", "joint_limit", "contacts", "total"):
    print(f"  {name:<12} {reg[name]:>8.2f}")
print("(the ankle contact is allowed; the torso contact is not)")
