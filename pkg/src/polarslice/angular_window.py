"""Orientation windows: 2D Fourier-series windows and 3D spherical caps.

2D windows are real trigonometric polynomials

    gamma_t(theta) = alpha * cos^(2p)(theta - pi*t/N)

for ``N`` orientations per level.  Squaring gives harmonics up to ``4p``;
with ``4p <= 2N - 2`` the rotated family tiles *exactly*:

    sum_t |gamma_t(theta)|^2 = 1   for every theta,

because all theta-dependent harmonics cancel over the rotation set.  The
windows are pi-periodic (each covers an antipodal direction pair), which
keeps the spatial wavelets real-valued.

3D windows are spherical-harmonic coefficient sets ``kappa_lm``; zonal
caps are antipodally symmetrised so 3D wavelets stay real as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from polarslice.special_functions import (
    SphericalDirection,
    sph_harm_grid,
    sph_harm_norm,
    wigner_d_matrix,
)

MAX_BAND_LIMIT = 16

#: Orientation counts per level used by directional frames (level 0 stays
#: isotropic, finer levels gain angular resolution).
DEFAULT_ORIENTATIONS = (1, 4, 8, 12, 16)


def default_orientation_count(j: int) -> int:
    if j < 0:
        return 1
    if j < len(DEFAULT_ORIENTATIONS):
        return DEFAULT_ORIENTATIONS[j]
    return DEFAULT_ORIENTATIONS[-1]


@dataclass(frozen=True)
class AngularWindow2D:
    """One orientation window as a truncated Fourier series.

    ``beta[i]`` is the coefficient of ``exp(i n theta)`` for
    ``n = i - n_max``; the series is Hermitian so the window is real.
    """

    level: int
    orientation: int
    beta: np.ndarray

    @property
    def n_max(self) -> int:
        return (len(self.beta) - 1) // 2

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def eval(self, theta) -> np.ndarray | complex:
        return gamma_eval_2d(self, theta)

    def eval_real(self, theta):
        """Window value as a real number (the series is Hermitian)."""
        val = gamma_eval_2d(self, theta)
        return val.real if np.ndim(theta) else float(np.real(val))


def make_isotropic_2d(level: int = 0) -> AngularWindow2D:
    """The trivial window ``gamma == 1``."""
    return AngularWindow2D(level=level, orientation=0, beta=np.array([1.0 + 0.0j]))


def make_directional_2d(j: int, n_orient: int) -> list[AngularWindow2D]:
    """Rotated family of ``n_orient`` windows whose squares tile unity.

    Window ``t`` is centred at ``pi*t/n_orient`` and also covers the
    antipodal direction.  ``n_orient = 1`` degenerates to the isotropic
    window.
    """
    if n_orient <= 0:
        raise ValueError("orientation count must be positive")
    if n_orient == 1:
        return [make_isotropic_2d(level=j)]
    p = (n_orient - 1) // 2
    alpha = 1.0 / math.sqrt(n_orient * math.comb(4 * p, 2 * p) / 4.0 ** (2 * p))
    windows = []
    for t in range(n_orient):
        theta_t = math.pi * t / n_orient
        beta = np.zeros(4 * p + 1, dtype=complex)
        for q in range(-p, p + 1):
            beta[2 * q + 2 * p] = (
                alpha
                * math.comb(2 * p, p + q)
                / 4.0**p
                * np.exp(-2j * q * theta_t)
            )
        windows.append(AngularWindow2D(level=j, orientation=t, beta=beta))
    return windows


def gamma_eval_2d(w: AngularWindow2D, theta):
    """Evaluate the Fourier series ``sum_n beta_n e^{i n theta}``."""
    theta = np.asarray(theta, dtype=float)
    n = w.n_values.reshape((-1,) + (1,) * theta.ndim)
    vals = (w.beta.reshape(n.shape) * np.exp(1j * n * theta)).sum(axis=0)
    return vals if vals.ndim else complex(vals)


@dataclass(frozen=True)
class AngularWindow3D:
    """Spherical-harmonic window; ``kappa[l, m + band_limit]`` holds kappa_lm."""

    level: int
    orientation: int
    kappa: np.ndarray

    @property
    def band_limit(self) -> int:
        return self.kappa.shape[0] - 1

    def eval(self, theta, phi) -> np.ndarray | complex:
        return window_eval_3d(self, theta, phi)


def make_isotropic_3d(level: int = 0) -> AngularWindow3D:
    """Window identically 1 on the sphere (``kappa_00 = 2 sqrt(pi)``)."""
    kappa = np.zeros((1, 1), dtype=complex)
    kappa[0, 0] = 2.0 * math.sqrt(math.pi)
    return AngularWindow3D(level=level, orientation=0, kappa=kappa)


def make_zonal_cap_3d(
    exponent: int = 4, band_limit: int = 8, level: int = 0, orientation: int = 0
) -> AngularWindow3D:
    """Antipodally symmetric polar cap ``((1+cos)/2)^q + ((1-cos)/2)^q``.

    The window is a degree-``exponent`` polynomial in ``cos(theta)``, so
    the expansion is exact for ``band_limit >= exponent``; only even
    degrees appear, keeping spatial wavelets real.
    """
    if exponent < 1:
        raise ValueError("exponent must be >= 1")
    if band_limit < exponent:
        raise ValueError("band_limit must be at least the cap exponent")
    if band_limit > MAX_BAND_LIMIT:
        raise ValueError(f"band limit {band_limit} exceeds maximum {MAX_BAND_LIMIT}")
    L = band_limit
    x, wq = np.polynomial.legendre.leggauss(L + exponent + 2)
    profile = ((1.0 + x) / 2.0) ** exponent + ((1.0 - x) / 2.0) ** exponent
    kappa = np.zeros((L + 1, 2 * L + 1), dtype=complex)
    for l in range(0, L + 1):
        pl = np.polynomial.legendre.Legendre.basis(l)(x)
        kappa[l, L] = 2.0 * math.pi * sph_harm_norm(l, 0) * np.sum(wq * profile * pl)
    return AngularWindow3D(level=level, orientation=orientation, kappa=kappa)


def window_eval_3d(w: AngularWindow3D, theta, phi):
    """Evaluate ``sum_lm kappa_lm y_lm`` at geographic angles."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    out = np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
    L = w.band_limit
    for l in range(L + 1):
        for m in range(-l, l + 1):
            k = w.kappa[l, m + L]
            if k != 0:
                out = out + k * sph_harm_grid(l, m, theta, phi)
    return out if out.ndim else complex(out)


def rotate_window_euler(
    w: AngularWindow3D, alpha: float, beta: float, gamma: float
) -> AngularWindow3D:
    """Coefficients of ``omega -> w(R^-1 omega)`` for ``R = Rz(a)Ry(b)Rz(g)``."""
    L = w.band_limit
    if L > MAX_BAND_LIMIT:
        raise ValueError(f"band limit {L} exceeds maximum {MAX_BAND_LIMIT}")
    kappa = np.zeros_like(w.kappa)
    for l in range(L + 1):
        d = wigner_d_matrix(l, beta)
        m = np.arange(-l, l + 1)
        dmat = d * np.exp(-1j * m[:, None] * alpha) * np.exp(-1j * m[None, :] * gamma)
        kappa[l, L - l : L + l + 1] = dmat @ w.kappa[l, L - l : L + l + 1]
    return AngularWindow3D(level=w.level, orientation=w.orientation, kappa=kappa)


def rotate_kappa(w: AngularWindow3D, nu: SphericalDirection) -> AngularWindow3D:
    """Re-express the window in a frame whose pole points along ``nu``.

    The result ``w'`` satisfies ``w'(omega) = w(R_nu omega)`` with
    ``R_nu = Rz(phi) Ry(theta)`` mapping the pole to ``nu``; in particular
    ``w'(pole) = w(nu)``.
    """
    if w.band_limit > MAX_BAND_LIMIT:
        raise ValueError(f"band limit {w.band_limit} exceeds maximum {MAX_BAND_LIMIT}")
    return rotate_window_euler(w, 0.0, -nu.theta, -nu.phi)


def rotate_kappa_inverse(w: AngularWindow3D, nu: SphericalDirection) -> AngularWindow3D:
    """Inverse of :func:`rotate_kappa` (rotates the pole frame back)."""
    return rotate_window_euler(w, nu.phi, nu.theta, 0.0)
