import json

import numpy as np
import pytest

from wbtrack.cli import main
from wbtrack.motion import save_clip, synthetic_clip
from wbtrack.tokenizer import Codebook


def make_library(path, levels):
    path.mkdir(exist_ok=True)
    for i, lvl in enumerate(levels):
        save_clip(
            synthetic_clip(f"clip_{i:02d}", n_frames=3, difficulty=int(lvl), n_bodies=2, seed=i),
            path / f"clip_{i:02d}.clip",
        )
    return path


def write_run_config(path, library, **overrides):
    config = {
        "library": str(library),
        "iterations": 20,
        "batch_size": 4,
        "curriculum": {"auto_advance_iters": 5, "ramp_iters": 3},
        "learner": {"noise_std": 0.0},
    }
    config.update(overrides)
    path.write_text(json.dumps(config))
    return path


class TestInspect:
    def test_empty_library(self, tmp_path, capsys):
        lib = tmp_path / "lib"
        lib.mkdir()
        assert main(["inspect", "--library", str(lib)]) == 0
        out = capsys.readouterr().out
        assert "clips: 0" in out

    def test_band_counts(self, tmp_path, capsys):
        lib = make_library(tmp_path / "lib", [1, 5, 9])
        assert main(["inspect", "--library", str(lib)]) == 0
        out = capsys.readouterr().out
        assert "band 1 (ratings 1-4): 1" in out
        assert "band 2 (ratings 5-7): 1" in out
        assert "band 3 (ratings 8-10): 1" in out
        assert (lib / "manifest.txt").exists()

    def test_corrupt_file_nonzero_exit_names_file(self, tmp_path, capsys):
        lib = tmp_path / "lib"
        lib.mkdir()
        (lib / "broken.clip").write_text("not a clip at all\n")
        assert main(["inspect", "--library", str(lib)]) == 1
        assert "broken.clip" in capsys.readouterr().err

    def test_missing_path(self, tmp_path, capsys):
        assert main(["inspect", "--library", str(tmp_path / "nope")]) == 1
        assert "error:" in capsys.readouterr().err


class TestRunSim:
    def test_seed_repeat_identical_csv(self, tmp_path, capsys):
        lib = make_library(tmp_path / "lib", [1, 2, 3])
        cfg = write_run_config(tmp_path / "run.json", lib)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["run-sim", "--config", str(cfg), "--seed", "5", "--out", str(out1)]) == 0
        assert main(["run-sim", "--config", str(cfg), "--seed", "5", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert "final max_unlocked" in capsys.readouterr().out

    def test_baseline_flag_emits_comparison(self, tmp_path, capsys):
        lib = make_library(tmp_path / "lib", [1, 2])
        cfg = write_run_config(tmp_path / "run.json", lib, comparison_seeds=[0, 1])
        out = tmp_path / "cmp.csv"
        rc = main(["run-sim", "--config", str(cfg), "--baseline", "uniform", "--out", str(out)])
        assert rc == 0
        assert out.read_text().startswith("seed,adaptive_max_error")
        assert "seeds" in capsys.readouterr().out

    def test_missing_config_key_named(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"library": "x", "iterations": 5}))
        assert main(["run-sim", "--config", str(cfg)]) == 1
        assert "batch_size" in capsys.readouterr().err


class TestMetrics:
    def test_identical_files_zero(self, tmp_path, capsys):
        clip = synthetic_clip("m", n_frames=4, n_bodies=3, seed=1)
        path = tmp_path / "m.clip"
        save_clip(clip, path)
        assert main(["metrics", "--ref", str(path), "--actual", str(path)]) == 0
        out = capsys.readouterr().out
        assert "mpjpe 0.000000" in out
        assert "mpjae 0.000000" in out
        assert "mpjve 0.000000" in out

    def test_shifted_copy(self, tmp_path, capsys):
        ref = synthetic_clip("m", n_frames=4, n_bodies=3, seed=1)
        act = synthetic_clip("m", n_frames=4, n_bodies=3, seed=1)
        for f in act.frames:
            f.body_pos = f.body_pos + np.array([0.25, 0.0, 0.0])
        save_clip(ref, tmp_path / "ref.clip")
        save_clip(act, tmp_path / "act.clip")
        rc = main(["metrics", "--ref", str(tmp_path / "ref.clip"),
                   "--actual", str(tmp_path / "act.clip")])
        assert rc == 0
        assert "mpjpe 0.250000" in capsys.readouterr().out

    def test_fixture_pair_matches_precomputed_oracle(self, tmp_path, capsys):
        # Deterministic fixture pair; expected values from flat loops.
        ref = synthetic_clip("fx", n_frames=3, n_bodies=2, seed=21)
        act = synthetic_clip("fx", n_frames=3, n_bodies=2, seed=22)
        pos, ang, vel = [], [], []
        for rf, af in zip(ref.frames, act.frames):
            for b in range(2):
                pos.append(float(np.linalg.norm(rf.body_pos[b] - af.body_pos[b])))
            ang.extend(abs(float(x)) for x in rf.joint_pos - af.joint_pos)
            vel.extend(abs(float(x)) for x in rf.joint_vel - af.joint_vel)
        save_clip(ref, tmp_path / "r.clip")
        save_clip(act, tmp_path / "a.clip")
        out_csv = tmp_path / "report.csv"
        rc = main(["metrics", "--ref", str(tmp_path / "r.clip"),
                   "--actual", str(tmp_path / "a.clip"), "--out", str(out_csv)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert f"mpjpe {np.mean(pos):.6f}" in printed
        assert f"mpjae {np.mean(ang):.6f}" in printed
        assert f"mpjve {np.mean(vel):.6f}" in printed
        assert out_csv.exists()

    def test_length_mismatch(self, tmp_path, capsys):
        save_clip(synthetic_clip("a", n_frames=3, n_bodies=2, seed=0), tmp_path / "a.clip")
        save_clip(synthetic_clip("b", n_frames=4, n_bodies=2, seed=0), tmp_path / "b.clip")
        rc = main(["metrics", "--ref", str(tmp_path / "a.clip"),
                   "--actual", str(tmp_path / "b.clip")])
        assert rc == 1
        assert "mismatch" in capsys.readouterr().err


class TestReward:
    def test_perfect_pair_prints_weight_total(self, tmp_path, capsys):
        path = tmp_path / "p.clip"
        save_clip(synthetic_clip("p", n_frames=3, seed=5), path)
        assert main(["reward", "--ref", str(path), "--actual", str(path)]) == 0
        out = capsys.readouterr().out
        assert "task_total 5.300000" in out
        assert out.strip().endswith("total 5.300000")

    def test_step_penalties_included(self, tmp_path, capsys):
        path = tmp_path / "p.clip"
        save_clip(synthetic_clip("p", n_frames=2, seed=5), path)
        step = {"contact_forces": {"torso": 2.0}}
        step_path = tmp_path / "step.json"
        step_path.write_text(json.dumps(step))
        rc = main(["reward", "--ref", str(path), "--actual", str(path),
                   "--step", str(step_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "contacts -0.100000" in out
        assert "total 5.200000" in out


class TestLossAndQuantize:
    def test_identical_tensors_zero_loss(self, tmp_path, capsys):
        tensor = np.random.default_rng(0).normal(size=(4, 69))
        gt, recon = tmp_path / "gt.txt", tmp_path / "rc.txt"
        np.savetxt(gt, tensor)
        np.savetxt(recon, tensor)
        rc = main(["loss", "--gt", str(gt), "--recon", str(recon), "--commit", "0"])
        assert rc == 0
        assert "total 0.000000" in capsys.readouterr().out

    def test_quantize_codebook_row(self, tmp_path, capsys):
        cb = Codebook.random(size=6, dim=3, seed=2)
        cb_path = tmp_path / "cb.txt"
        cb.save(cb_path)
        lat = tmp_path / "lat.txt"
        np.savetxt(lat, cb.entries[4].reshape(1, -1))
        rc = main(["quantize", "--codebook", str(cb_path), "--latents", str(lat)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "indices 4" in out
        assert "commit_sq_dist 0.000000" in out


class TestExportConfig:
    def test_writes_parseable_defaults(self, tmp_path, capsys):
        out = tmp_path / "defaults.json"
        assert main(["export-config", "--out", str(out)]) == 0
        config = json.loads(out.read_text())
        assert config["scheduler"]["explore_ratio"] == 0.1
        assert config["reward"]["anchor_pos"] == {"weight": 0.8, "sigma": 0.2}
        assert config["curriculum"]["min_level_ratio"] == 0.05

    def test_prints_to_stdout(self, capsys):
        assert main(["export-config"]) == 0
        assert '"scheduler"' in capsys.readouterr().out
