"""Canonical form, rotations, closed-form exponentials, line coordinates."""

import math

import numpy as np
import pytest

from planarcontrol.errors import NotComplexSpectrum, OffLine, ZeroVector
from planarcontrol.planar import (
    canonicalize,
    discriminant,
    line_coordinate,
    matrix_exp,
    perp,
    rotation,
)

from conftest import random_complex_matrix, series_expm


def test_discriminant_examples():
    assert discriminant([[0, -1], [1, 0]]) == -4.0
    assert discriminant([[-1, -1], [1, -1]]) == -4.0
    assert discriminant(np.eye(2)) == 0.0


def test_canonicalize_already_canonical():
    cf = canonicalize([[-1.0, -1.0], [1.0, -1.0]])
    assert cf.eig_real == -1.0
    assert cf.eig_imag == 1.0
    assert not cf.flipped
    np.testing.assert_allclose(cf.basis, np.eye(2), atol=0)


def test_canonicalize_conjugation_identity():
    a = np.array([[-1.0, 4.0], [-1.0, -1.0]])
    cf = canonicalize(a)
    assert cf.eig_real == pytest.approx(-1.0, abs=1e-14)
    assert cf.eig_imag == pytest.approx(2.0, abs=1e-14)
    target = np.array([[-1.0, -2.0], [2.0, -1.0]])
    np.testing.assert_allclose(cf.basis_inv @ a @ cf.basis, target, atol=1e-12)


def test_canonicalize_clockwise_uses_axis_flip():
    lam, mu = -0.7, 1.3
    a = np.array([[lam, mu], [-mu, lam]])  # clockwise rotation-scaling
    cf = canonicalize(a)
    assert cf.flipped
    np.testing.assert_allclose(cf.basis, np.diag([1.0, -1.0]), atol=1e-15)
    np.testing.assert_allclose(
        cf.basis_inv @ a @ cf.basis, [[lam, -mu], [mu, lam]], atol=1e-15
    )


def test_canonicalize_rejects_real_spectrum():
    with pytest.raises(NotComplexSpectrum):
        canonicalize(np.eye(2))
    with pytest.raises(NotComplexSpectrum):
        canonicalize([[1.0, 2.0], [3.0, 4.0]])


def test_reconstruction_roundtrip_random():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        a = random_complex_matrix(rng)
        cf = canonicalize(a)
        recon = cf.basis @ cf.matrix() @ cf.basis_inv
        assert np.abs(recon - a).max() < 1e-9
        assert cf.eig_imag > 0.0
        assert cf.flipped == (np.linalg.det(cf.basis) < 0.0)


def test_rotation_and_perp_examples():
    np.testing.assert_allclose(perp([1.0, 0.0]), [0.0, 1.0], atol=0)
    np.testing.assert_allclose(rotation(math.pi) @ [1.0, 0.0], [-1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(
        rotation(math.pi / 2) @ rotation(math.pi / 2), rotation(math.pi), atol=1e-15
    )


def test_perp_is_isometric_quarter_turn():
    rng = np.random.default_rng(3)
    for _ in range(100):
        v = rng.normal(0, 2, 2)
        w = perp(v)
        # Scalar products cancel exactly; numpy's dot may use FMA and not.
        assert float(v[0]) * float(w[0]) + float(v[1]) * float(w[1]) == 0.0
        assert math.hypot(w[0], w[1]) == pytest.approx(
            math.hypot(v[0], v[1]), rel=1e-15
        )


def test_matrix_exp_at_zero_is_identity():
    a = [[-1.0, -1.0], [1.0, -1.0]]
    np.testing.assert_allclose(matrix_exp(a, 0.0), np.eye(2), atol=0)


def test_matrix_exp_half_turn_against_series():
    a = np.array([[-1.0, -1.0], [1.0, -1.0]])
    got = matrix_exp(a, math.pi)
    expect = -math.exp(-math.pi) * np.eye(2)
    assert np.abs(got - expect).max() < 1e-12
    assert np.abs(got - series_expm(a, math.pi)).max() < 1e-12


def test_matrix_exp_matches_series_random():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = random_complex_matrix(rng)
        t = rng.uniform(-2.0, 2.0)
        got = matrix_exp(a, t)
        ref = series_expm(a, t)
        assert np.abs(got - ref).max() < 1e-9 * max(1.0, np.abs(ref).max())


def test_matrix_exp_isometry_on_canonical():
    lam, mu = -0.4, 1.7
    a = np.array([[lam, -mu], [mu, lam]])
    rng = np.random.default_rng(9)
    for _ in range(50):
        v = rng.normal(0, 3, 2)
        t = rng.uniform(-3, 3)
        assert np.linalg.norm(matrix_exp(a, t) @ v) == pytest.approx(
            math.exp(t * lam) * np.linalg.norm(v), rel=1e-12
        )


def test_matrix_exp_semigroup_and_determinant():
    rng = np.random.default_rng(13)
    for _ in range(200):
        a = random_complex_matrix(rng)
        s, t = rng.uniform(-5.0, 5.0, 2)
        left = matrix_exp(a, s + t)
        right = matrix_exp(a, s) @ matrix_exp(a, t)
        scale = max(1.0, np.abs(left).max())
        assert np.abs(left - right).max() < 1e-9 * scale
        tr = a[0, 0] + a[1, 1]
        det = np.linalg.det(matrix_exp(a, t))
        assert det == pytest.approx(math.exp(t * tr), rel=1e-9)


def test_line_coordinate_examples():
    d = np.array([3.0, 4.0])
    assert line_coordinate(d, d) == pytest.approx(5.0, rel=1e-15)
    assert line_coordinate([0.0, 0.0], d) == 0.0
    unit = d / 5.0
    assert line_coordinate(-2.0 * unit, unit) == pytest.approx(-2.0, rel=1e-14)


def test_line_coordinate_rejects_off_line_and_zero():
    with pytest.raises(OffLine):
        line_coordinate([1.0, 1.0], [1.0, 0.0])
    with pytest.raises(ZeroVector):
        line_coordinate([1.0, 1.0], [0.0, 0.0])
