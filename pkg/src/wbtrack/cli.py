"""Command-line entry point.

Subcommands: inspect, run-sim, metrics, reward, loss, quantize,
export-config.  All numeric output uses fixed 6-decimal formatting so
output files are stable for golden-file comparison.  Configuration
precedence: command-line flag > config file > built-in default.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import curriculum, harness, metrics, motion, rewards, tokenizer
from .observation import offsets_manifest
from .scheduler import SchedulerConfig


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _load_matrix(path, width: int | None = None, what: str = "matrix") -> np.ndarray:
    arr = np.loadtxt(path, dtype=np.float64, ndmin=2)
    if width is not None and arr.shape[1] != width:
        raise ValueError(f"{path}: {what} must have {width} columns, got {arr.shape[1]}")
    return arr


def _write_or_print(text: str, out: str | None, label: str) -> None:
    if out:
        Path(out).write_text(text)
        print(f"{label} written to {out}")
    else:
        print(text, end="")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_inspect(args) -> int:
    library = motion.load_library(args.library)
    bands = {1: 0, 2: 0, 3: 0}
    for clip in library:
        bands[curriculum.rating_to_band(clip.difficulty)] += 1
    duration = sum(clip.duration for clip in library)
    print(f"clips: {len(library)}")
    print(f"band 1 (ratings 1-4): {bands[1]}")
    print(f"band 2 (ratings 5-7): {bands[2]}")
    print(f"band 3 (ratings 8-10): {bands[3]}")
    print(f"total duration: {_fmt(duration)} s")
    manifest_path = args.out or str(Path(args.library) / "manifest.txt")
    motion.write_manifest(library, manifest_path)
    print(f"manifest written to {manifest_path}")
    return 0


def cmd_run_sim(args) -> int:
    config = json.loads(Path(args.config).read_text())
    spec = harness.run_spec_from_dict(config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    out = args.out if args.out is not None else config.get("out")
    library = motion.load_library(spec.library_path)

    if args.baseline == "uniform":
        seeds = spec.comparison_seeds or [seed + i for i in range(5)]
        report = harness.compare_uniform(
            library, spec.scheduler, spec.curriculum, spec.learner,
            spec.iterations, spec.batch_size, seeds,
        )
        _write_or_print(report.to_csv_text(), out, "comparison report")
        print(report.format_summary(), end="")
        return 0

    log = harness.run(
        library, spec.scheduler, spec.curriculum, spec.learner,
        spec.iterations, spec.batch_size, seed,
    )
    if out:
        Path(out).write_text(log.to_csv_text())
        print(f"log written to {out}")
    errors = log.final_scheduler.errors()
    print(f"final max_unlocked {log.final_max_unlocked}")
    print(f"mean_error_ema {_fmt(float(errors.mean()))}")
    print(f"max_error_ema {_fmt(float(errors.max()))}")
    return 0


def cmd_metrics(args) -> int:
    ref = motion.load_clip(args.ref)
    act = motion.load_clip(args.actual)
    pair = metrics.pair_from_clips(ref, act)
    report = metrics.per_level_report([pair], [ref.difficulty], names=[ref.name])
    print(f"mpjpe {_fmt(report.mpjpe)}")
    print(f"mpjae {_fmt(report.mpjae)}")
    print(f"mpjve {_fmt(report.mpjve)}")
    if args.out:
        Path(args.out).write_text(report.to_csv_text())
        print(f"report written to {args.out}")
    return 0


def _step_from_json(path) -> rewards.ControlStep:
    data = json.loads(Path(path).read_text())
    base = rewards.neutral_step()
    return rewards.ControlStep(
        action=np.asarray(data.get("action", base.action), dtype=np.float64),
        prev_action=np.asarray(data.get("prev_action", base.prev_action), dtype=np.float64),
        joint_limits=np.asarray(data.get("joint_limits", base.joint_limits), dtype=np.float64),
        contact_forces=data.get("contact_forces", {}),
    )


def cmd_reward(args) -> int:
    cfg = rewards.RewardConfig()
    if args.config:
        cfg = rewards.RewardConfig.from_json(Path(args.config).read_text())
    ref = motion.load_clip(args.ref)
    act = motion.load_clip(args.actual)
    if ref.n_frames != act.n_frames:
        raise ValueError(f"frame count mismatch: {ref.n_frames} vs {act.n_frames}")
    frames = [args.frame] if args.frame is not None else list(range(ref.n_frames))
    acc = {name: 0.0 for name in rewards.TASK_TERMS + ("total",)}
    for t in frames:
        pair = rewards.BodyStatePair(reference=ref.frames[t], actual=act.frames[t])
        terms = rewards.task_rewards(pair, cfg)
        for name in acc:
            acc[name] += terms[name]
    n = len(frames)
    for name in rewards.TASK_TERMS:
        print(f"{name} {_fmt(acc[name] / n)}")
    task_total = acc["total"] / n
    print(f"task_total {_fmt(task_total)}")
    reg_total = 0.0
    if args.step:
        step = _step_from_json(args.step)
        reg = rewards.regularization(step, cfg)
        for name in rewards.PENALTY_TERMS:
            print(f"{name} {_fmt(reg[name])}")
        print(f"regularization_total {_fmt(reg['total'])}")
        reg_total = reg["total"]
    print(f"total {_fmt(task_total + reg_total)}")
    return 0


def cmd_loss(args) -> int:
    weights = tokenizer.LossWeights()
    if args.config:
        weights = tokenizer.LossWeights(**json.loads(Path(args.config).read_text()))
    gt = _load_matrix(args.gt, tokenizer.MOTION_WIDTH, "motion tensor")
    recon = _load_matrix(args.recon, tokenizer.MOTION_WIDTH, "motion tensor")
    total, terms = tokenizer.vqvae_loss(gt, recon, args.commit, args.fps, weights)
    for name in ("recons", "commit", "vel", "rot", "trans"):
        print(f"{name} {_fmt(terms[name])}")
    print(f"total {_fmt(total)}")
    return 0


def cmd_quantize(args) -> int:
    codebook = tokenizer.Codebook.load(args.codebook)
    latents = _load_matrix(args.latents, codebook.dim, "latents")
    indices, _, commit = tokenizer.quantize(latents, codebook)
    print("indices " + " ".join(str(int(i)) for i in indices))
    print(f"commit_sq_dist {_fmt(commit)}")
    if args.out:
        Path(args.out).write_text("\n".join(str(int(i)) for i in indices) + "\n")
        print(f"indices written to {args.out}")
    return 0


def cmd_export_config(args) -> int:
    config = {
        "scheduler": SchedulerConfig().to_dict(),
        "curriculum": curriculum.CurriculumConfig().to_dict(),
        "learner": harness.LearnerModel().to_dict(),
        "reward": rewards.RewardConfig().to_dict(),
        "run": harness.default_run_config(),
        "observation_offsets": offsets_manifest().strip().split("\n"),
    }
    text = json.dumps(config, indent=2, sort_keys=True) + "\n"
    _write_or_print(text, args.out, "config")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wbtrack",
        description="Motion-tracking training infrastructure: library inspection, "
        "reward/metric/loss computation, quantization, and simulation runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize a clip library and write its manifest")
    p.add_argument("--library", required=True, help="clip library directory")
    p.add_argument("--out", help="manifest path (default: <library>/manifest.txt)")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("run-sim", help="run a synthetic scheduler/curriculum simulation")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
    p.add_argument("--out", default=None, help="output CSV path (overrides config)")
    p.add_argument("--baseline", choices=["uniform"], default=None,
                   help="also run the uniform-sampling baseline and emit a comparison")
    p.set_defaults(func=cmd_run_sim)

    p = sub.add_parser("metrics", help="tracking metrics between two clip files")
    p.add_argument("--ref", required=True, help="reference clip file")
    p.add_argument("--actual", required=True, help="actual (tracked) clip file")
    p.add_argument("--out", help="CSV report path")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("reward", help="tracking rewards between two clip files")
    p.add_argument("--ref", required=True)
    p.add_argument("--actual", required=True)
    p.add_argument("--frame", type=int, default=None, help="single frame index (default: mean over all)")
    p.add_argument("--step", help="JSON control step for regularization terms")
    p.add_argument("--config", help="JSON reward configuration")
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("loss", help="reconstruction loss between two motion tensors")
    p.add_argument("--gt", required=True, help="ground-truth motion tensor (text matrix)")
    p.add_argument("--recon", required=True, help="reconstructed motion tensor")
    p.add_argument("--commit", type=float, default=0.0, help="commitment term value")
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--config", help="JSON loss weights")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("quantize", help="nearest-code quantization of latent rows")
    p.add_argument("--codebook", required=True, help="codebook file (K D header + rows)")
    p.add_argument("--latents", required=True, help="latent rows (text matrix)")
    p.add_argument("--out", help="write indices to this file")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("export-config", help="print all built-in defaults as JSON")
    p.add_argument("--out", help="write the JSON here instead of stdout")
    p.set_defaults(func=cmd_export_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point for CLI errors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
