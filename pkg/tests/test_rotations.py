import math

import numpy as np
import pytest

from conftest import random_unit_quat
from wbtrack.rotations import (
    quat_conjugate,
    quat_error,
    quat_from_axis_angle,
    quat_mul,
    quat_rotate,
    quat_to_6d,
    quat_to_matrix,
    so3_log,
)

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


class TestQuatError:
    def test_identical_is_zero(self, rng):
        q = random_unit_quat(rng)
        assert quat_error(q, q) == pytest.approx(0.0, abs=1e-9)

    def test_sign_flip_invariance(self, rng):
        q = random_unit_quat(rng)
        assert quat_error(q, -q) == pytest.approx(0.0, abs=1e-9)

    def test_quarter_turn_about_z(self):
        # Analytic: 90 degrees about z is (cos 45, 0, 0, sin 45).
        q = np.array([math.cos(math.pi / 4), 0.0, 0.0, math.sin(math.pi / 4)])
        assert quat_error(IDENTITY, q) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            quat_error(np.array([1.1, 0.0, 0.0, 0.0]), IDENTITY)

    def test_symmetry_and_sign_flips(self, rng):
        for _ in range(50):
            q1, q2 = random_unit_quat(rng), random_unit_quat(rng)
            a = quat_error(q1, q2)
            assert quat_error(q2, q1) == pytest.approx(a, abs=1e-9)
            assert quat_error(-q1, q2) == pytest.approx(a, abs=1e-9)
            assert quat_error(q1, -q2) == pytest.approx(a, abs=1e-9)
            assert 0.0 <= a <= math.pi + 1e-12

    def test_triangle_inequality(self, rng):
        for _ in range(200):
            q1, q2, q3 = (random_unit_quat(rng) for _ in range(3))
            assert quat_error(q1, q3) <= quat_error(q1, q2) + quat_error(q2, q3) + 1e-6


class TestQuatTo6d:
    def test_identity(self):
        np.testing.assert_allclose(quat_to_6d(IDENTITY), [1, 0, 0, 0, 1, 0], atol=1e-15)

    def test_double_cover(self, rng):
        q = random_unit_quat(rng)
        np.testing.assert_array_equal(quat_to_6d(q), quat_to_6d(-q))

    def test_quarter_turn_about_z(self):
        q = quat_from_axis_angle([0, 0, 1], math.pi / 2)
        np.testing.assert_allclose(quat_to_6d(q), [0, 1, 0, -1, 0, 0], atol=1e-12)

    def test_columns_orthonormal(self, rng):
        for _ in range(100):
            v = quat_to_6d(random_unit_quat(rng))
            c0, c1 = v[:3], v[3:]
            assert np.linalg.norm(c0) == pytest.approx(1.0, abs=1e-9)
            assert np.linalg.norm(c1) == pytest.approx(1.0, abs=1e-9)
            assert np.dot(c0, c1) == pytest.approx(0.0, abs=1e-9)

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            quat_to_6d(np.array([0.5, 0.5, 0.0, 0.0]))


class TestAlgebra:
    def test_mul_conjugate_is_identity(self, rng):
        q = random_unit_quat(rng)
        np.testing.assert_allclose(quat_mul(q, quat_conjugate(q)), IDENTITY, atol=1e-12)

    def test_rotate_matches_matrix(self, rng):
        q = random_unit_quat(rng)
        v = rng.normal(size=3)
        np.testing.assert_allclose(quat_rotate(q, v), quat_to_matrix(q) @ v, atol=1e-12)

    def test_rotate_preserves_norm(self, rng):
        q = random_unit_quat(rng)
        v = rng.normal(size=3)
        assert np.linalg.norm(quat_rotate(q, v)) == pytest.approx(np.linalg.norm(v), abs=1e-12)

    def test_so3_log_roundtrip(self, rng):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = float(rng.uniform(0.01, math.pi - 0.01))
        rotvec = so3_log(quat_from_axis_angle(axis, angle))
        np.testing.assert_allclose(rotvec, axis * angle, atol=1e-9)

    def test_so3_log_identity(self):
        np.testing.assert_allclose(so3_log(IDENTITY), np.zeros(3), atol=1e-15)
