"""Synthetic training-loop driver for scheduler and curriculum dynamics.

A parametric learner stands in for the physics simulator and policy: its
tracking error on a clip starts at a level-dependent base value, decays
geometrically with the number of times the clip has been trained on, and
carries Gaussian observation noise.  An episode fails when the error
exceeds a threshold.  Each iteration samples a batch of clips from the
scheduler x curriculum weights, queries the learner, applies one ordered
batch of EMA updates, and ticks the curriculum.  Runs are pure functions of
(config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curriculum import CurriculumConfig, CurriculumState, effective_weights, level_masses, tick
from .motion import MotionClip, MotionLibrary
from .scheduler import SchedulerConfig, SchedulerState, distribution_from_scores


@dataclass(frozen=True)
class LearnerModel:
    """Stand-in learner: error decays with per-clip exposure.

    error = (base_error + error_per_level * level) * (1 - learn_rate)^exposure
            + N(0, noise_std), clamped at 0
    success = error < fail_threshold

    ang_error_ratio converts the scalar position-error proxy into the
    angle-error proxy fed to the curriculum thresholds.
    """

    base_error: float = 0.05       # error intercept (m)
    error_per_level: float = 0.05  # error added per difficulty level (m)
    learn_rate: float = 0.02       # per-exposure decay, in (0, 1)
    noise_std: float = 0.01
    fail_threshold: float = 0.5    # error above which an episode fails (m)
    ang_error_ratio: float = 0.2   # angle-error proxy per unit position error (rad/m)

    def __post_init__(self) -> None:
        if self.base_error < 0.0 or self.error_per_level < 0.0:
            raise ValueError("base_error and error_per_level must be nonnegative")
        if not 0.0 < self.learn_rate < 1.0:
            raise ValueError("learn_rate must be in (0, 1)")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be nonnegative")
        if not self.fail_threshold > 0.0:
            raise ValueError("fail_threshold must be positive")
        if self.ang_error_ratio < 0.0:
            raise ValueError("ang_error_ratio must be nonnegative")

    def level_error(self, level: int) -> float:
        return self.base_error + self.error_per_level * level

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "LearnerModel":
        return cls(**d)


def step_learner(
    model: LearnerModel, clip: MotionClip, exposure_count: int, rng: np.random.Generator
):
    """One synthetic episode on a clip; returns ``(error, success)``."""
    if exposure_count < 0:
        raise ValueError("exposure_count must be nonnegative")
    error = model.level_error(clip.difficulty) * (1.0 - model.learn_rate) ** exposure_count
    if model.noise_std > 0.0:
        error += rng.normal(0.0, model.noise_std)
    error = max(0.0, error)
    return error, error < model.fail_threshold


@dataclass
class IterationRecord:
    """Snapshot of one iteration: sampling-time state plus its outcome.

    error_ema/scores/probs are the values the batch was drawn from (before
    this iteration's updates); reason reports the curriculum decision taken
    after the updates.
    """

    iteration: int
    sampled: np.ndarray     # drawn clip indices, in draw order
    error_ema: np.ndarray   # (N,)
    scores: np.ndarray      # (N,)
    probs: np.ndarray       # (N,) weights the batch was drawn from
    max_unlocked: int
    ramp_progress: float
    reason: str
    level_masses: dict      # level -> sampling mass
    mean_error: float       # mean sampled tracking error (position proxy)


@dataclass
class RunLog:
    """Complete, replayable record of one synthetic run."""

    clip_names: list
    clip_levels: np.ndarray
    records: list = field(default_factory=list)
    final_scheduler: SchedulerState | None = None
    final_curriculum: CurriculumState | None = None

    def to_csv_text(self) -> str:
        """Long-format CSV: one row per (iteration, clip), fixed 6-decimal floats."""
        header = (
            "iteration,clip,level,error_ema,score,prob,draws,"
            "max_unlocked,reason,ramp_progress,level_mass,mean_error"
        )
        lines = [header]
        for rec in self.records:
            draws = np.bincount(rec.sampled, minlength=len(self.clip_names))
            for i, name in enumerate(self.clip_names):
                level = int(self.clip_levels[i])
                lines.append(
                    f"{rec.iteration},{name},{level},{rec.error_ema[i]:.6f},"
                    f"{rec.scores[i]:.6f},{rec.probs[i]:.6f},{int(draws[i])},"
                    f"{rec.max_unlocked},{rec.reason},{rec.ramp_progress:.6f},"
                    f"{rec.level_masses.get(level, 0.0):.6f},{rec.mean_error:.6f}"
                )
        return "\n".join(lines) + "\n"

    @property
    def final_max_unlocked(self) -> int:
        if self.final_curriculum is None:
            return 1
        return self.final_curriculum.max_unlocked


def run(
    library: MotionLibrary,
    scheduler_cfg: SchedulerConfig,
    curriculum_cfg: CurriculumConfig,
    learner: LearnerModel,
    iterations: int,
    batch_size: int,
    seed: int,
    baseline: str = "adaptive",
) -> RunLog:
    """Drive the scheduler and curriculum for ``iterations`` iterations.

    baseline="uniform" replaces the sampling weights with a uniform
    distribution over unlocked clips (curriculum locking still applies, the
    new-level bias and floors do not); everything else is unchanged.
    """
    if len(library) == 0:
        raise ValueError("library is empty")
    if iterations < 0 or batch_size < 1:
        raise ValueError("iterations must be >= 0 and batch_size >= 1")
    if baseline not in ("adaptive", "uniform"):
        raise ValueError(f"unknown baseline {baseline!r}")

    rng = np.random.default_rng(seed)
    clips = list(library)
    levels = library.levels()
    sched = SchedulerState.from_library(library)
    curr = CurriculumState()
    exposure = np.zeros(len(library), dtype=np.int64)
    log = RunLog(clip_names=list(library.names), clip_levels=levels)

    for it in range(iterations):
        errors_pre = sched.errors()
        scores = sched.scores(scheduler_cfg)
        if baseline == "uniform":
            unlocked = levels <= curr.max_unlocked
            weights = unlocked.astype(np.float64) / unlocked.sum()
        else:
            base = distribution_from_scores(scores, scheduler_cfg)
            weights = effective_weights(base, levels, curr, curriculum_cfg)
        sampled = rng.choice(len(clips), size=batch_size, replace=True, p=weights)

        # Evaluate every draw at this iteration's exposure counts (draws of
        # one clip are conceptually parallel environments).
        draw_errors: dict = {}
        draw_success: dict = {}
        for idx in sampled:
            idx = int(idx)
            e, s = step_learner(learner, clips[idx], int(exposure[idx]), rng)
            draw_errors.setdefault(idx, []).append(e)
            draw_success.setdefault(idx, []).append(s)

        # One ordered batch update per iteration: multiple draws of a clip
        # average into a single error observation and a majority outcome.
        batch_idx = sorted(draw_errors)
        batch_err = [float(np.mean(draw_errors[i])) for i in batch_idx]
        batch_succ = [float(np.mean(draw_success[i])) >= 0.5 for i in batch_idx]
        sched.apply_batch(batch_idx, batch_err, batch_succ, scheduler_cfg)
        for i in batch_idx:
            exposure[i] += len(draw_errors[i])

        metrics = {}
        for lvl in sorted(set(int(levels[i]) for i in batch_idx)):
            lvl_errors = [e for i in batch_idx if levels[i] == lvl for e in draw_errors[i]]
            pos = float(np.mean(lvl_errors))
            metrics[lvl] = (pos, pos * learner.ang_error_ratio)
        pre_ramp = curr.ramp_progress
        pre_max = curr.max_unlocked
        curr, reason = tick(curr, curriculum_cfg, metrics)

        all_errors = [e for errs in draw_errors.values() for e in errs]
        log.records.append(
            IterationRecord(
                iteration=it,
                sampled=sampled.astype(np.int64),
                error_ema=errors_pre,
                scores=scores,
                probs=weights,
                max_unlocked=pre_max,
                ramp_progress=pre_ramp,
                reason=reason,
                level_masses=level_masses(weights, levels),
                mean_error=float(np.mean(all_errors)),
            )
        )

    log.final_scheduler = sched
    log.final_curriculum = curr
    return log


@dataclass
class ComparisonRow:
    seed: int
    adaptive_max_error: float
    adaptive_mean_error: float
    uniform_max_error: float
    uniform_mean_error: float


@dataclass
class ComparisonReport:
    """Adaptive-vs-uniform final EMA errors, one row per seed."""

    rows: list

    @property
    def adaptive_win_fraction(self) -> float:
        wins = sum(1 for r in self.rows if r.adaptive_max_error < r.uniform_max_error)
        return wins / len(self.rows)

    def to_csv_text(self) -> str:
        lines = ["seed,adaptive_max_error,adaptive_mean_error,uniform_max_error,uniform_mean_error"]
        for r in self.rows:
            lines.append(
                f"{r.seed},{r.adaptive_max_error:.6f},{r.adaptive_mean_error:.6f},"
                f"{r.uniform_max_error:.6f},{r.uniform_mean_error:.6f}"
            )
        return "\n".join(lines) + "\n"

    def format_summary(self) -> str:
        return (
            f"adaptive wins on max per-clip EMA error in "
            f"{self.adaptive_win_fraction:.2%} of {len(self.rows)} seeds\n"
        )


def compare_uniform(
    library: MotionLibrary,
    scheduler_cfg: SchedulerConfig,
    curriculum_cfg: CurriculumConfig,
    learner: LearnerModel,
    iterations: int,
    batch_size: int,
    seeds: Sequence[int],
) -> ComparisonReport:
    """Run adaptive and uniform scheduling on the same seeds and compare."""
    seeds = [int(s) for s in seeds]
    if len(seeds) < 2:
        raise ValueError("at least 2 seeds are required for a comparison")
    rows = []
    for seed in seeds:
        adaptive = run(library, scheduler_cfg, curriculum_cfg, learner, iterations, batch_size, seed)
        uniform = run(
            library, scheduler_cfg, curriculum_cfg, learner, iterations, batch_size, seed,
            baseline="uniform",
        )
        ea = adaptive.final_scheduler.errors()
        eu = uniform.final_scheduler.errors()
        rows.append(
            ComparisonRow(
                seed=seed,
                adaptive_max_error=float(ea.max()),
                adaptive_mean_error=float(ea.mean()),
                uniform_max_error=float(eu.max()),
                uniform_mean_error=float(eu.mean()),
            )
        )
    return ComparisonReport(rows=rows)


# ---------------------------------------------------------------------------
# Run configuration (for the CLI and reproducible experiments)
# ---------------------------------------------------------------------------

@dataclass
class RunSpec:
    """Everything a run needs except the seed: parsed from a JSON config."""

    library_path: str
    iterations: int
    batch_size: int
    scheduler: SchedulerConfig
    curriculum: CurriculumConfig
    learner: LearnerModel
    comparison_seeds: list = field(default_factory=list)


def run_spec_from_dict(d: dict) -> RunSpec:
    for key in ("library", "iterations", "batch_size"):
        if key not in d:
            raise ValueError(f"missing config key: '{key}'")
    return RunSpec(
        library_path=str(d["library"]),
        iterations=int(d["iterations"]),
        batch_size=int(d["batch_size"]),
        scheduler=SchedulerConfig.from_dict(d.get("scheduler", {})),
        curriculum=CurriculumConfig.from_dict(d.get("curriculum", {})),
        learner=LearnerModel.from_dict(d.get("learner", {})),
        comparison_seeds=[int(s) for s in d.get("comparison_seeds", [])],
    )


def default_run_config() -> dict:
    """Template run configuration with all defaults spelled out."""
    return {
        "library": "path/to/clip/library",
        "iterations": 500,
        "batch_size": 8,
        "scheduler": SchedulerConfig().to_dict(),
        "curriculum": CurriculumConfig().to_dict(),
        "learner": LearnerModel().to_dict(),
        "comparison_seeds": [0, 1, 2, 3, 4],
    }
