"""Training infrastructure for humanoid whole-body motion tracking.

Submodules:
    motion       clip/frame types and the on-disk clip library
    rotations    quaternion math (scalar-first convention)
    tokenizer    codebook quantization and reconstruction-loss arithmetic
    scheduler    adaptive per-clip sampling from error/outcome statistics
    curriculum   progressive difficulty unlocking and sampling reshaping
    rewards      tracking rewards and regularization penalties
    observation  616-dim actor observation assembly
    metrics      mpjpe / mpjae / mpjve tracking metrics
    harness      synthetic training-loop driver with a parametric learner
    cli          command-line interface (``wbtrack`` entry point)
"""

__version__ = "0.1.0"

from .curriculum import (
    CurriculumConfig,
    CurriculumState,
    advance_check,
    effective_weights,
    rating_to_band,
    tick,
)
from .harness import ComparisonReport, LearnerModel, RunLog, compare_uniform, run, step_learner
from .metrics import MetricReport, TrajectoryPair, mpjae, mpjpe, mpjve, per_level_report
from .motion import (
    HumanMotionFrame,
    MotionClip,
    MotionLibrary,
    RobotFrame,
    finite_difference_velocities,
    load_clip,
    load_library,
    save_clip,
    save_library,
    synthetic_clip,
    validate_clip,
)
from .observation import (
    CommandLayout,
    Proprioception,
    build_command,
    build_observation,
    slice_segment,
)
from .rewards import (
    BodyStatePair,
    ControlStep,
    RewardConfig,
    kernel,
    regularization,
    task_rewards,
    total_reward,
)
from .rotations import quat_error, quat_to_6d
from .scheduler import (
    ClipStats,
    SchedulerConfig,
    SchedulerState,
    difficulty_score,
    sample_clips,
    sampling_distribution,
    success_prob,
    update_error,
    update_outcome,
)
from .tokenizer import Codebook, LossWeights, downsample_length, quantize, vqvae_loss
