"""Special-function kernels shared by all numerical layers.

Everything in this module is a pure, deterministic function and safe to
call concurrently.  Accuracy targets are stated per function; the test
suite checks them against independent oracles (power series, recurrences,
quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as _sp


@dataclass(frozen=True)
class SphericalDirection:
    """Direction on the unit sphere in geographic coordinates.

    ``theta`` is the polar angle in ``[0, pi]`` measured from the +z axis,
    ``phi`` the azimuth in ``[0, 2*pi)``.
    """

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))

    @classmethod
    def from_vector(cls, v) -> "SphericalDirection":
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(v))
        if r == 0.0:
            raise ValueError("zero vector has no direction")
        theta = math.acos(min(1.0, max(-1.0, v[2] / r)))
        phi = math.atan2(v[1], v[0]) % (2.0 * math.pi)
        return cls(theta, phi)

    def to_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind ``J_n(x)`` for integer order ``n >= 0``.

    Relative accuracy is 1e-12 or better for ``|x| <= 1e4``.
    """
    if n < 0:
        raise ValueError("negative orders are not supported")
    return float(_sp.jv(n, x))


def assoc_legendre(l: int, m: int, x: float) -> float:
    """Associated Legendre function ``P_l^m(x)`` with the Condon-Shortley phase.

    ``x`` must lie in ``[-1, 1]``; negative ``m`` follows the standard
    relation ``P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m``.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    if abs(m) > l:
        raise ValueError(f"|m| <= l required, got l={l}, m={m}")
    if not -1.0 <= x <= 1.0:
        raise ValueError("x must lie in [-1, 1]")
    return float(_sp.lpmv(m, l, x))


def sph_harm_norm(l: int, m: int) -> float:
    """Orthonormalisation constant ``sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!)``."""
    if abs(m) > l:
        raise ValueError(f"|m| <= l required, got l={l}, m={m}")
    return math.sqrt(
        (2 * l + 1)
        / (4.0 * math.pi)
        * math.exp(math.lgamma(l - m + 1) - math.lgamma(l + m + 1))
    )


def sph_harm(l: int, m: int, direction: SphericalDirection) -> complex:
    """Orthonormal complex spherical harmonic ``y_lm``.

    ``y_lm(theta, phi) = C_lm P_l^m(cos theta) e^{i m phi}`` where ``C_lm``
    makes the family orthonormal over the sphere.
    """
    if abs(m) > l:
        raise ValueError(f"|m| <= l required, got l={l}, m={m}")
    p = assoc_legendre(l, m, math.cos(direction.theta))
    return sph_harm_norm(l, m) * p * complex(math.cos(m * direction.phi), math.sin(m * direction.phi))


def sph_harm_grid(l: int, m: int, theta, phi) -> np.ndarray:
    """Vectorised ``y_lm`` over arrays of angles (broadcasting)."""
    if abs(m) > l:
        raise ValueError(f"|m| <= l required, got l={l}, m={m}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p = _sp.lpmv(m, l, np.cos(theta))
    return sph_harm_norm(l, m) * p * np.exp(1j * m * phi)


def wigner_d(l: int, m_p: int, m: int, beta: float) -> float:
    """Wigner small-d matrix element ``d^l_{m_p, m}(beta)``.

    The full rotation operator element is obtained from this by the phase
    factors ``exp(-i m_p alpha)`` and ``exp(-i m gamma)`` for z-y-z Euler
    angles ``(alpha, beta, gamma)``.
    """
    if abs(m_p) > l or abs(m) > l:
        raise ValueError(f"indices out of range: l={l}, m_p={m_p}, m={m}")
    pref = math.sqrt(
        math.factorial(l + m_p)
        * math.factorial(l - m_p)
        * math.factorial(l + m)
        * math.factorial(l - m)
    )
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    total = 0.0
    for k in range(max(0, m - m_p), min(l + m, l - m_p) + 1):
        denom = (
            math.factorial(l + m - k)
            * math.factorial(k)
            * math.factorial(m_p - m + k)
            * math.factorial(l - m_p - k)
        )
        total += (
            (-1.0) ** (m_p - m + k)
            * c ** (2 * l + m - m_p - 2 * k)
            * s ** (m_p - m + 2 * k)
            / denom
        )
    return pref * total


def wigner_d_matrix(l: int, beta: float) -> np.ndarray:
    """Full ``(2l+1) x (2l+1)`` small-d matrix, rows/cols ordered ``-l..l``."""
    size = 2 * l + 1
    d = np.empty((size, size))
    for i, mp in enumerate(range(-l, l + 1)):
        for j, m in enumerate(range(-l, l + 1)):
            d[i, j] = wigner_d(l, mp, m, beta)
    return d


def expint_complex_order(nu: complex, z: complex) -> complex:
    """Generalised exponential integral ``E_nu(z) = int_1^inf e^{-zt} t^{-nu} dt``.

    Supports complex order ``nu`` and arguments with ``Re(z) >= 0``,
    ``z != 0``.  The oscillatory defining integral is rotated onto the
    steepest-descent ray ``t = 1 + s * conj(z)/|z|`` where the integrand
    decays like ``e^{-|z| s}``, and integrated with adaptive
    Gauss-Kronrod quadrature.  Relative accuracy 1e-8 or better.
    """
    nu = complex(nu)
    z = complex(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    if z.real < 0:
        raise ValueError("Re(z) >= 0 required")
    if nu == 0:
        return np.exp(-z) / z

    d = z.conjugate() / abs(z)
    decay = abs(z)

    def integrand(s: float) -> complex:
        t = 1.0 + s * d
        return np.exp(-decay * s - nu * np.log(t)) * d

    # Split off the e^{-z} prefactor to keep the quadrature well scaled.
    upper = min(700.0 / decay, 1e8)
    re, re_err = integrate.quad(
        lambda s: integrand(s).real, 0.0, upper, epsabs=1e-13, epsrel=1e-12, limit=400
    )
    im, im_err = integrate.quad(
        lambda s: integrand(s).imag, 0.0, upper, epsabs=1e-13, epsrel=1e-12, limit=400
    )
    val = complex(re, im)
    err = abs(complex(re_err, im_err))
    if err > 1e-6 * max(1.0, abs(val)):
        raise ArithmeticError(
            f"quadrature for E_nu did not converge: nu={nu}, z={z}, err={err:g}"
        )
    return np.exp(-z) * val
