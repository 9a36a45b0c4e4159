import numpy as np
import pytest

from conftest import identity_frame, random_frame
from wbtrack.metrics import TrajectoryPair, mpjae, mpjpe, mpjve, per_level_report
from wbtrack.motion import JOINT_COUNT


def offset_pair(n_frames=4, n_bodies=6, pos_offset=0.0, ang_offset=0.0, vel_offset=0.0):
    ref = [identity_frame(n_bodies) for _ in range(n_frames)]
    act = []
    for f in ref:
        g = identity_frame(n_bodies)
        g.body_pos = f.body_pos + np.array([pos_offset, 0.0, 0.0])
        g.joint_pos = f.joint_pos + ang_offset
        g.joint_vel = f.joint_vel + vel_offset
        act.append(g)
    return TrajectoryPair(reference=ref, actual=act)


def random_pair(rng, n_frames=3, n_bodies=2):
    return TrajectoryPair(
        reference=[random_frame(rng, n_bodies) for _ in range(n_frames)],
        actual=[random_frame(rng, n_bodies) for _ in range(n_frames)],
    )


def brute_force_metrics(pair):
    """Flat loops over every frame/body/joint sample."""
    pos, ang, vel = [], [], []
    for rf, af in zip(pair.reference, pair.actual):
        for b in range(rf.n_bodies):
            pos.append(float(np.linalg.norm(rf.body_pos[b] - af.body_pos[b])))
        for j in range(JOINT_COUNT):
            ang.append(abs(float(rf.joint_pos[j] - af.joint_pos[j])))
            vel.append(abs(float(rf.joint_vel[j] - af.joint_vel[j])))
    return np.mean(pos), np.mean(ang), np.mean(vel)


class TestPointMetrics:
    def test_identical_trajectories_are_zero(self, rng):
        frames = [random_frame(rng) for _ in range(3)]
        pair = TrajectoryPair(reference=frames, actual=list(frames))
        assert mpjpe(pair) == 0.0
        assert mpjae(pair) == 0.0
        assert mpjve(pair) == 0.0

    def test_uniform_offsets_are_exact(self):
        assert mpjpe(offset_pair(pos_offset=0.1)) == pytest.approx(0.1, abs=1e-12)
        assert mpjae(offset_pair(ang_offset=0.2)) == pytest.approx(0.2, abs=1e-12)
        assert mpjve(offset_pair(vel_offset=0.5)) == pytest.approx(0.5, abs=1e-12)

    def test_matches_brute_force(self, rng):
        pair = random_pair(rng)
        p, a, v = brute_force_metrics(pair)
        assert mpjpe(pair) == pytest.approx(p, abs=1e-9)
        assert mpjae(pair) == pytest.approx(a, abs=1e-9)
        assert mpjve(pair) == pytest.approx(v, abs=1e-9)

    def test_symmetry(self, rng):
        pair = random_pair(rng)
        swapped = TrajectoryPair(reference=pair.actual, actual=pair.reference)
        assert mpjpe(swapped) == pytest.approx(mpjpe(pair), abs=1e-12)
        assert mpjae(swapped) == pytest.approx(mpjae(pair), abs=1e-12)

    def test_position_error_scales_linearly(self, rng):
        ref = [random_frame(rng) for _ in range(3)]
        act = [random_frame(rng) for _ in range(3)]
        pair = TrajectoryPair(reference=ref, actual=act)
        base = mpjpe(pair)
        scaled_act = []
        for rf, af in zip(ref, act):
            g = random_frame(rng)
            g.body_pos = rf.body_pos + 3.0 * (af.body_pos - rf.body_pos)
            scaled_act.append(g)
        assert mpjpe(TrajectoryPair(reference=ref, actual=scaled_act)) == pytest.approx(
            3.0 * base, rel=1e-12
        )

    def test_rigid_translation_of_both_sides(self, rng):
        pair = random_pair(rng)
        base = mpjpe(pair)
        shift = rng.normal(size=3)
        for f in pair.reference + pair.actual:
            f.body_pos = f.body_pos + shift
        assert mpjpe(pair) == pytest.approx(base, abs=1e-9)
        for f in pair.actual:
            f.body_pos = f.body_pos + shift
        assert mpjpe(pair) != pytest.approx(base, abs=1e-6)

    def test_length_mismatch(self, rng):
        with pytest.raises(ValueError, match="length mismatch"):
            TrajectoryPair(
                reference=[random_frame(rng)], actual=[random_frame(rng), random_frame(rng)]
            )


class TestPerLevelReport:
    def test_single_pair_level_mean(self, rng):
        pair = random_pair(rng)
        report = per_level_report([pair], [3], names=["only"])
        assert report.per_level[3]["mpjpe"] == pytest.approx(mpjpe(pair), abs=1e-12)
        assert report.mpjpe == pytest.approx(mpjpe(pair), abs=1e-12)
        assert report.per_clip["only"]["mpjve"] == pytest.approx(mpjve(pair), abs=1e-12)

    def test_equal_counts_average(self):
        a = offset_pair(n_frames=4, pos_offset=0.1)
        b = offset_pair(n_frames=4, pos_offset=0.3)
        report = per_level_report([a, b], [1, 2])
        assert report.mpjpe == pytest.approx(0.2, abs=1e-12)

    def test_pooled_means_weight_by_sample_count(self):
        short = offset_pair(n_frames=1, pos_offset=0.1)
        long = offset_pair(n_frames=3, pos_offset=0.3)
        report = per_level_report([short, long], [1, 1])
        # Flat pooling: (1*0.1 + 3*0.3) / 4 frames of equal body count.
        assert report.per_level[1]["mpjpe"] == pytest.approx(0.25, abs=1e-12)

    def test_matches_flat_oracle(self, rng):
        pairs = [random_pair(rng, n_frames=int(rng.integers(1, 5))) for _ in range(4)]
        levels = [1, 1, 2, 2]
        report = per_level_report(pairs, levels)
        flat = [brute_force_metrics(p) for p in pairs]
        counts_p = [len(p) * p.reference[0].n_bodies for p in pairs]
        expect = sum(f[0] * c for f, c in zip(flat, counts_p)) / sum(counts_p)
        assert report.mpjpe == pytest.approx(expect, abs=1e-9)

    def test_csv_and_table_render(self, rng):
        report = per_level_report([random_pair(rng)], [2], names=["c"])
        csv = report.to_csv_text()
        assert csv.startswith("scope,key,mpjpe,mpjae,mpjve")
        assert "level,2," in csv
        assert "overall" in report.format_table()

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            per_level_report([], [])
