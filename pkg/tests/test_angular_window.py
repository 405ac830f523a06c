"""Tests for 2D and 3D orientation windows."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarslice.angular_window import (
    AngularWindow3D,
    default_orientation_count,
    gamma_eval_2d,
    make_directional_2d,
    make_isotropic_2d,
    make_isotropic_3d,
    make_zonal_cap_3d,
    rotate_kappa,
    rotate_kappa_inverse,
    rotate_window_euler,
    window_eval_3d,
)
from polarslice.special_functions import SphericalDirection


def rotation_matrix(nu: SphericalDirection) -> np.ndarray:
    """R_nu = Rz(phi) Ry(theta), mapping the pole to nu."""
    ct, stn = math.cos(nu.theta), math.sin(nu.theta)
    cp, sp = math.cos(nu.phi), math.sin(nu.phi)
    ry = np.array([[ct, 0.0, stn], [0.0, 1.0, 0.0], [-stn, 0.0, ct]])
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry


# --- 2D ---------------------------------------------------------------------


def test_isotropic_2d_is_one_everywhere():
    w = make_isotropic_2d()
    for theta in (0.0, 1.3, 4.0):
        assert gamma_eval_2d(w, theta) == pytest.approx(1.0, abs=1e-15)


def test_directional_tiling_exact():
    rng = np.random.default_rng(3)
    for n_orient in (1, 4, 8, 12, 16):
        windows = make_directional_2d(2, n_orient)
        assert len(windows) == n_orient
        theta = rng.uniform(0.0, 2.0 * math.pi, size=100)
        total = np.zeros_like(theta)
        for w in windows:
            total += np.abs(gamma_eval_2d(w, theta)) ** 2
        np.testing.assert_allclose(total, 1.0, atol=1e-10)


def test_directional_windows_are_rotations():
    n_orient = 8
    windows = make_directional_2d(1, n_orient)
    step = math.pi / n_orient
    theta = np.linspace(0.0, 2.0 * math.pi, 37)
    for t in range(n_orient - 1):
        a = gamma_eval_2d(windows[t + 1], theta)
        b = gamma_eval_2d(windows[t], theta - step)
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_directional_windows_real_nonnegative():
    rng = np.random.default_rng(5)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=100)
    for w in make_directional_2d(3, 12):
        vals = gamma_eval_2d(w, theta)
        assert np.max(np.abs(vals.imag)) < 1e-12
        assert np.all(vals.real >= -1e-12)


def test_directional_window_peaks_at_center():
    n_orient = 8
    windows = make_directional_2d(2, n_orient)
    theta = np.linspace(0.0, 2.0 * math.pi, 1441, endpoint=False)
    for t, w in enumerate(windows):
        vals = gamma_eval_2d(w, theta).real
        center = math.pi * t / n_orient
        # A sampled maximum can only undershoot the true peak value.
        assert w.eval_real(center) >= float(vals.max()) - 1e-12


def test_directional_window_vanishes_perpendicular():
    windows = make_directional_2d(2, 8)
    w0 = windows[0]
    assert abs(w0.eval_real(math.pi / 2.0)) < 1e-12


def test_gamma_eval_matches_term_sum():
    w = make_directional_2d(2, 8)[3]
    rng = np.random.default_rng(9)
    for theta in rng.uniform(0.0, 2.0 * math.pi, size=10):
        direct = sum(
            w.beta[i] * np.exp(1j * n * theta) for i, n in enumerate(w.n_values)
        )
        assert gamma_eval_2d(w, theta) == pytest.approx(direct, abs=1e-14)


def test_rejects_nonpositive_orientations():
    with pytest.raises(ValueError):
        make_directional_2d(1, 0)


def test_default_orientation_counts():
    assert [default_orientation_count(j) for j in (-1, 0, 1, 2, 3, 4, 7)] == [
        1,
        1,
        4,
        8,
        12,
        16,
        16,
    ]


@settings(max_examples=20, deadline=None)
@given(
    n_orient=st.sampled_from([4, 8, 12, 16]),
    theta=st.floats(min_value=0.0, max_value=6.28),
)
def test_tiling_property(n_orient, theta):
    total = sum(
        abs(gamma_eval_2d(w, theta)) ** 2 for w in make_directional_2d(2, n_orient)
    )
    assert total == pytest.approx(1.0, abs=1e-10)


# --- 3D ---------------------------------------------------------------------


def test_isotropic_3d_is_one():
    w = make_isotropic_3d()
    rng = np.random.default_rng(2)
    theta = rng.uniform(0.0, math.pi, size=20)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=20)
    vals = window_eval_3d(w, theta, phi)
    np.testing.assert_allclose(vals.real, 1.0, atol=1e-14)
    np.testing.assert_allclose(vals.imag, 0.0, atol=1e-14)


def test_isotropic_3d_rotation_invariant():
    w = make_isotropic_3d()
    out = rotate_kappa(w, SphericalDirection(1.1, 2.2))
    np.testing.assert_allclose(out.kappa, w.kappa, atol=1e-14)


def test_zonal_cap_profile():
    q = 4
    w = make_zonal_cap_3d(exponent=q, band_limit=8)
    theta = np.linspace(0.0, math.pi, 41)
    vals = window_eval_3d(w, theta, np.zeros_like(theta))
    expected = ((1.0 + np.cos(theta)) / 2.0) ** q + ((1.0 - np.cos(theta)) / 2.0) ** q
    np.testing.assert_allclose(vals.real, expected, atol=1e-12)
    np.testing.assert_allclose(vals.imag, 0.0, atol=1e-12)


def test_rotate_kappa_pole_is_identity():
    w = make_zonal_cap_3d(exponent=4, band_limit=8)
    out = rotate_kappa(w, SphericalDirection(0.0, 0.0))
    np.testing.assert_allclose(out.kappa, w.kappa, atol=1e-12)


def test_rotate_kappa_roundtrip():
    w = make_zonal_cap_3d(exponent=6, band_limit=8)
    nu = SphericalDirection(0.8, 2.5)
    back = rotate_kappa_inverse(rotate_kappa(w, nu), nu)
    np.testing.assert_allclose(back.kappa, w.kappa, atol=1e-10)


def test_rotate_kappa_matches_pointwise_evaluation():
    # w'(omega) must equal w(R_nu omega) for the rotated coefficients.
    w = make_zonal_cap_3d(exponent=4, band_limit=4)
    nu = SphericalDirection(0.7, 1.9)
    rot = rotation_matrix(nu)
    wp = rotate_kappa(w, nu)
    rng = np.random.default_rng(12)
    for _ in range(10):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        d = SphericalDirection.from_vector(v)
        lhs = window_eval_3d(wp, d.theta, d.phi)
        dr = SphericalDirection.from_vector(rot @ v)
        rhs = window_eval_3d(w, dr.theta, dr.phi)
        assert lhs == pytest.approx(rhs, abs=1e-8)
    # Pole value equals the window evaluated at nu itself.
    pole = window_eval_3d(wp, 0.0, 0.0)
    at_nu = window_eval_3d(w, nu.theta, nu.phi)
    assert pole == pytest.approx(at_nu, abs=1e-10)


def test_rotation_preserves_norm():
    w = make_zonal_cap_3d(exponent=6, band_limit=8)
    nu = SphericalDirection(2.1, 0.4)
    wp = rotate_kappa(w, nu)
    assert np.sum(np.abs(wp.kappa) ** 2) == pytest.approx(
        np.sum(np.abs(w.kappa) ** 2), abs=1e-10
    )


def test_rotated_window_stays_real():
    w = make_zonal_cap_3d(exponent=4, band_limit=8)
    wp = rotate_kappa(w, SphericalDirection(1.2, 0.9))
    rng = np.random.default_rng(4)
    theta = rng.uniform(0.0, math.pi, size=15)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=15)
    vals = window_eval_3d(wp, theta, phi)
    np.testing.assert_allclose(vals.imag, 0.0, atol=1e-10)


def test_rotate_rejects_band_limit_above_max():
    kappa = np.zeros((20, 39), dtype=complex)
    kappa[0, 19] = 1.0
    big = AngularWindow3D(level=0, orientation=0, kappa=kappa)
    with pytest.raises(ValueError):
        rotate_kappa(big, SphericalDirection(0.3, 0.3))


def test_zonal_cap_validation():
    with pytest.raises(ValueError):
        make_zonal_cap_3d(exponent=0)
    with pytest.raises(ValueError):
        make_zonal_cap_3d(exponent=10, band_limit=8)
    with pytest.raises(ValueError):
        make_zonal_cap_3d(exponent=17, band_limit=17)
