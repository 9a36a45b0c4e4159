import numpy as np
import pytest

from wbtrack.motion import JOINT_COUNT, MotionClip, RobotFrame


def identity_frame(n_bodies: int = 13, anchor_index: int = 0) -> RobotFrame:
    """A frame with zero joints/velocities, identity orientations."""
    quat = np.zeros((n_bodies, 4))
    quat[:, 0] = 1.0
    return RobotFrame(
        joint_pos=np.zeros(JOINT_COUNT),
        joint_vel=np.zeros(JOINT_COUNT),
        body_pos=np.zeros((n_bodies, 3)),
        body_quat=quat,
        body_lin_vel=np.zeros((n_bodies, 3)),
        body_ang_vel=np.zeros((n_bodies, 3)),
        anchor_index=anchor_index,
    )


def random_frame(rng: np.random.Generator, n_bodies: int = 13, anchor_index: int = 0) -> RobotFrame:
    quat = rng.normal(size=(n_bodies, 4))
    quat /= np.linalg.norm(quat, axis=-1, keepdims=True)
    return RobotFrame(
        joint_pos=rng.normal(0.0, 0.5, JOINT_COUNT),
        joint_vel=rng.normal(0.0, 1.0, JOINT_COUNT),
        body_pos=rng.normal(0.0, 0.5, (n_bodies, 3)),
        body_quat=quat,
        body_lin_vel=rng.normal(0.0, 1.0, (n_bodies, 3)),
        body_ang_vel=rng.normal(0.0, 1.0, (n_bodies, 3)),
        anchor_index=anchor_index,
    )


def constant_clip(name: str = "hold", n_frames: int = 6, fps: float = 30.0,
                  difficulty: int = 1, n_bodies: int = 13) -> MotionClip:
    frames = [identity_frame(n_bodies) for _ in range(n_frames)]
    return MotionClip(name=name, fps=fps, difficulty=difficulty, frames=frames)


def random_unit_quat(rng: np.random.Generator, shape=()) -> np.ndarray:
    q = rng.normal(size=shape + (4,))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
