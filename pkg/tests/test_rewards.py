import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from conftest import identity_frame, random_frame
from wbtrack.motion import JOINT_COUNT
from wbtrack.rewards import (
    BodyStatePair,
    ControlStep,
    RewardConfig,
    kernel,
    neutral_step,
    regularization,
    task_rewards,
    total_reward,
)

TABLE_TOTAL = 0.8 + 0.5 + 1.0 + 1.0 + 1.0 + 1.0  # 5.3


def rot(q_wxyz) -> Rotation:
    w, x, y, z = q_wxyz
    return Rotation.from_quat([x, y, z, w])


def oracle_task_terms(ref, act, cfg: RewardConfig) -> dict:
    """Independent per-term evaluation through scipy rotations."""
    a = ref.anchor_index
    others = [i for i in range(ref.n_bodies) if i != a]
    out = {}

    d = float(np.linalg.norm(ref.body_pos[a] - act.body_pos[a]))
    out["anchor_pos"] = cfg.anchor_pos.weight * math.exp(-d**2 / cfg.anchor_pos.sigma**2)

    ang = (rot(ref.body_quat[a]).inv() * rot(act.body_quat[a])).magnitude()
    out["anchor_ori"] = cfg.anchor_ori.weight * math.exp(-ang**2 / cfg.anchor_ori.sigma**2)

    ref_anchor, act_anchor = rot(ref.body_quat[a]), rot(act.body_quat[a])
    sq_pos, sq_ori = [], []
    for i in others:
        pr = ref_anchor.inv().apply(ref.body_pos[i] - ref.body_pos[a])
        pa = act_anchor.inv().apply(act.body_pos[i] - act.body_pos[a])
        sq_pos.append(float(np.sum((pr - pa) ** 2)))
        qr = ref_anchor.inv() * rot(ref.body_quat[i])
        qa = act_anchor.inv() * rot(act.body_quat[i])
        sq_ori.append((qr.inv() * qa).magnitude() ** 2)
    out["rel_body_pos"] = cfg.rel_body_pos.weight * math.exp(
        -np.mean(sq_pos) / cfg.rel_body_pos.sigma**2
    )
    out["rel_body_ori"] = cfg.rel_body_ori.weight * math.exp(
        -np.mean(sq_ori) / cfg.rel_body_ori.sigma**2
    )

    msq_lin = np.mean(np.sum((ref.body_lin_vel - act.body_lin_vel) ** 2, axis=1))
    msq_ang = np.mean(np.sum((ref.body_ang_vel - act.body_ang_vel) ** 2, axis=1))
    out["body_lin_vel"] = cfg.body_lin_vel.weight * math.exp(-msq_lin / cfg.body_lin_vel.sigma**2)
    out["body_ang_vel"] = cfg.body_ang_vel.weight * math.exp(-msq_ang / cfg.body_ang_vel.sigma**2)
    return out


def perturbed_pair(rng, scale=0.05) -> BodyStatePair:
    ref = random_frame(rng, n_bodies=5)
    act = random_frame(rng, n_bodies=5)
    act.joint_pos = ref.joint_pos + rng.normal(0, scale, JOINT_COUNT)
    act.body_pos = ref.body_pos + rng.normal(0, scale, ref.body_pos.shape)
    act.body_lin_vel = ref.body_lin_vel + rng.normal(0, scale, ref.body_lin_vel.shape)
    act.body_ang_vel = ref.body_ang_vel + rng.normal(0, scale, ref.body_ang_vel.shape)
    quat = ref.body_quat + rng.normal(0, scale, ref.body_quat.shape)
    act.body_quat = quat / np.linalg.norm(quat, axis=-1, keepdims=True)
    return BodyStatePair(reference=ref, actual=act)


class TestKernel:
    def test_zero_distance(self):
        assert kernel(0.0, 0.3) == 1.0

    def test_at_sigma(self):
        assert kernel(0.7, 0.7) == pytest.approx(math.exp(-1), abs=1e-12)

    def test_large_distance_underflows_cleanly(self):
        value = kernel(1e6, 0.2)
        assert 0.0 <= value <= 1e-12
        assert math.isfinite(value)
        assert math.isfinite(kernel(1e300, 1.0))

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            kernel(1.0, 0.0)


class TestTaskRewards:
    def test_perfect_tracking_totals_weights(self, rng):
        frame = random_frame(rng)
        pair = BodyStatePair(reference=frame, actual=frame)
        terms = task_rewards(pair)
        cfg = RewardConfig()
        for name in ("anchor_pos", "anchor_ori", "rel_body_pos", "rel_body_ori",
                     "body_lin_vel", "body_ang_vel"):
            assert terms[name] == pytest.approx(cfg.term(name).weight, abs=1e-9)
        assert terms["total"] == pytest.approx(TABLE_TOTAL, abs=1e-9)

    def test_anchor_offset_worked_example(self, rng):
        # 0.2 m anchor offset with sigma 0.2 gives 0.8 * e^-1; a pure anchor
        # translation also shifts relative positions, so move every body by
        # the same vector to keep the other terms at their weights.
        ref = random_frame(rng)
        act = random_frame(rng)
        for attr in ("joint_pos", "joint_vel", "body_quat", "body_lin_vel", "body_ang_vel"):
            setattr(act, attr, getattr(ref, attr).copy())
        act.body_pos = ref.body_pos + np.array([0.2, 0.0, 0.0])
        terms = task_rewards(BodyStatePair(reference=ref, actual=act))
        assert terms["anchor_pos"] == pytest.approx(0.8 * math.exp(-1), abs=1e-9)
        assert terms["anchor_ori"] == pytest.approx(0.5, abs=1e-9)
        assert terms["rel_body_pos"] == pytest.approx(1.0, abs=1e-9)
        assert terms["total"] == pytest.approx(TABLE_TOTAL - 0.8 + 0.8 * math.exp(-1), abs=1e-9)

    def test_matches_independent_oracle(self, rng):
        for _ in range(50):
            pair = perturbed_pair(rng)
            terms = task_rewards(pair)
            oracle = oracle_task_terms(pair.reference, pair.actual, RewardConfig())
            for name, value in oracle.items():
                assert terms[name] == pytest.approx(value, abs=1e-9), name

    def test_terms_bounded_and_positive(self, rng):
        cfg = RewardConfig()
        for _ in range(20):
            pair = perturbed_pair(rng, scale=0.5)
            terms = task_rewards(pair)
            for name in ("anchor_pos", "anchor_ori", "rel_body_pos", "rel_body_ori",
                         "body_lin_vel", "body_ang_vel"):
                assert 0.0 < terms[name] <= cfg.term(name).weight + 1e-15

    def test_translation_invariance(self, rng):
        pair = perturbed_pair(rng)
        before = task_rewards(pair)
        shift = rng.normal(size=3)
        pair.reference.body_pos = pair.reference.body_pos + shift
        pair.actual.body_pos = pair.actual.body_pos + shift
        after = task_rewards(pair)
        for name, value in before.items():
            assert after[name] == pytest.approx(value, abs=1e-9)

    def test_decreasing_in_anchor_error(self, rng):
        ref = identity_frame()
        values = []
        for d in (0.0, 0.1, 0.2, 0.4):
            act = identity_frame()
            act.body_pos = act.body_pos.copy()
            act.body_pos[0, 0] = d
            values.append(task_rewards(BodyStatePair(ref, act))["anchor_pos"])
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_body_count_mismatch(self, rng):
        with pytest.raises(ValueError, match="body count"):
            BodyStatePair(reference=random_frame(rng, n_bodies=5),
                          actual=random_frame(rng, n_bodies=6))


class TestRegularization:
    def test_clean_step_is_zero(self):
        reg = regularization(neutral_step())
        assert reg["total"] == 0.0

    def test_two_joints_out_of_range(self):
        step = neutral_step()
        step.action = step.action.copy()
        step.action[0] = 10.0
        step.action[7] = -10.0
        reg = regularization(step)
        assert reg["joint_limit"] == -20.0

    def test_contacts_ignore_allowed_bodies(self):
        step = neutral_step()
        step.contact_forces = {"left_ankle": 100.0, "torso": 2.0}
        reg = regularization(step)
        assert reg["contacts"] == pytest.approx(-0.1)

    def test_contact_threshold_is_strict(self):
        step = neutral_step()
        step.contact_forces = {"torso": 1.0, "head": 1.0001}
        assert regularization(step)["contacts"] == pytest.approx(-0.1)

    def test_action_rate_squared_norm(self, rng):
        step = neutral_step()
        step.action = rng.normal(size=JOINT_COUNT)
        step.prev_action = rng.normal(size=JOINT_COUNT)
        expect = -0.1 * float(np.sum((step.action - step.prev_action) ** 2))
        assert regularization(step)["action_rate"] == pytest.approx(expect, abs=1e-12)

    def test_total_never_positive(self, rng):
        for _ in range(20):
            step = neutral_step()
            step.action = rng.normal(0, 3, JOINT_COUNT)
            step.prev_action = rng.normal(0, 3, JOINT_COUNT)
            step.contact_forces = {f"body{i}": float(rng.uniform(0, 3)) for i in range(4)}
            assert regularization(step)["total"] <= 0.0

    def test_limits_must_be_ordered(self):
        limits = np.tile([1.0, -1.0], (JOINT_COUNT, 1))
        with pytest.raises(ValueError, match="lo < hi"):
            ControlStep(
                action=np.zeros(JOINT_COUNT),
                prev_action=np.zeros(JOINT_COUNT),
                joint_limits=limits,
                contact_forces={},
            )


class TestTotalReward:
    def test_perfect_and_clean(self, rng):
        frame = random_frame(rng)
        pair = BodyStatePair(reference=frame, actual=frame)
        assert total_reward(pair, neutral_step()) == pytest.approx(TABLE_TOTAL, abs=1e-9)

    def test_one_joint_out(self, rng):
        frame = random_frame(rng)
        pair = BodyStatePair(reference=frame, actual=frame)
        step = neutral_step()
        step.action = step.action.copy()
        step.action[3] = 100.0  # far outside limits; rate penalty applies too
        step.prev_action = step.action.copy()  # cancel the rate penalty
        assert total_reward(pair, step) == pytest.approx(TABLE_TOTAL - 10.0, abs=1e-9)

    def test_lower_bounded_by_regularization(self, rng):
        pair = perturbed_pair(rng, scale=1.0)
        step = neutral_step()
        step.contact_forces = {"torso": 5.0}
        assert total_reward(pair, step) >= regularization(step)["total"]


class TestRewardConfigIO:
    def test_json_roundtrip(self):
        cfg = RewardConfig()
        again = RewardConfig.from_json(cfg.to_json())
        assert again == cfg

    def test_custom_values_roundtrip(self):
        cfg = RewardConfig.from_dict(
            {"anchor_pos": {"weight": 0.4, "sigma": 0.1},
             "contact_weight": -0.5,
             "allowed_contact_bodies": ["foot"]}
        )
        assert cfg.anchor_pos.weight == 0.4
        assert cfg.allowed_contact_bodies == frozenset({"foot"})
        assert RewardConfig.from_json(cfg.to_json()) == cfg

    def test_penalty_weights_must_be_nonpositive(self):
        with pytest.raises(ValueError, match="nonpositive"):
            RewardConfig.from_dict({"contact_weight": 0.3})
