"""Shared analytic test signals and independent projection oracles.

The slice tests compare frame-based projections against direct numerical
line integrals of the analytic signal, so the oracle never touches the
wavelet machinery.  Box and annulus use smooth edges whose bandwidth is
matched to the frame's top level; hard discontinuities are outside what a
finite-level frame can represent pointwise.
"""

import math

import numpy as np
from scipy.special import erf

from polarslice.frame2d import (
    FrameConfig,
    GridSpec2D,
    SampledSignal2D,
    analyze,
    threshold,
)

# Wide apron: the Gaussian's frame coefficients decay only polynomially
# (the radial window has derivative corners), so slice accuracy at the
# 1e-5 level needs translates well beyond the signal support.  The small
# config mirrors the paper-scale basis box and is used where cost or
# qualitative behaviour is measured rather than tight accuracy.
GAUSS_CFG = FrameConfig(j_max=3, domain=((-5.0, 5.0), (-5.0, 5.0)), apron=40.0)
GAUSS_CFG_SMALL = FrameConfig(j_max=3, domain=((-5.0, 5.0), (-5.0, 5.0)), apron=5.0)
BOX_CFG = FrameConfig(j_max=4, domain=((-5.0, 5.0), (-5.0, 5.0)), apron=3.0)


def gaussian2d(x, y):
    return np.exp(-(x**2 + y**2) / 2.0)


def gaussian_projection(y):
    """Analytic projection of the unit Gaussian along any direction."""
    return math.sqrt(2.0 * math.pi) * np.exp(-np.asarray(y, dtype=float) ** 2 / 2.0)


def smooth_step(u, half, sigma):
    return 0.5 * (
        erf((u + half) / (sigma * math.sqrt(2.0)))
        - erf((u - half) / (sigma * math.sqrt(2.0)))
    )


def smooth_box(x, y, half=2.5, sigma=0.15):
    return smooth_step(x, half, sigma) * smooth_step(y, half, sigma)


def annulus(x, y, radius=2.5, sigma=0.2):
    r = np.hypot(x, y)
    return np.exp(-((r - radius) ** 2) / (2.0 * sigma**2))


def full_box_grid(cfg: FrameConfig, res: int | None = None) -> GridSpec2D:
    res = cfg.j_max if res is None else res
    n = int(round(cfg.box_extent)) * 2**res
    return GridSpec2D(cfg.box_origin, 2.0 ** (-res), (n, n))


def analyze_function(fn, cfg: FrameConfig, res: int | None = None, eps=None, pad=64.0):
    """Sample an analytic signal over the whole frame box and analyze it.

    ``pad`` zero-pads the transform so coefficients approximate open-plane
    inner products (required when they feed slicing).  ``eps`` (default
    ``1e-12 * max|coef|``) drops numerically negligible coefficients so
    projections stay proportional to true sparsity.
    """
    sig = SampledSignal2D.from_function(full_box_grid(cfg, res), fn)
    coeffs = analyze(sig, cfg, pad=pad)
    if eps is None:
        eps = 1e-10 * coeffs.max_abs()
    return threshold(coeffs, eps)


def line_integral_oracle(fn, theta_nu, offsets, step, half_length=12.0):
    """Composite-trapezoid line integrals of an analytic signal.

    Integrates ``fn`` along rays in direction ``theta_nu`` through the
    detector points ``offsets`` on the axis orthogonal to the ray.
    """
    nu = np.array([math.cos(theta_nu), math.sin(theta_nu)])
    d = np.array([math.sin(theta_nu), -math.cos(theta_nu)])
    tau = np.arange(-half_length, half_length + step / 2.0, step)
    offsets = np.asarray(offsets, dtype=float)
    x = offsets[:, None] * d[0] + tau[None, :] * nu[0]
    y = offsets[:, None] * d[1] + tau[None, :] * nu[1]
    vals = fn(x, y)
    return np.trapezoid(vals, dx=step, axis=1)


def relative_errors(rec, ref):
    """(L1, L2, Linf) of rec-ref, each relative to the matching norm of ref."""
    rec = np.asarray(rec, dtype=float)
    ref = np.asarray(ref, dtype=float)
    diff = rec - ref
    return (
        float(np.abs(diff).sum() / np.abs(ref).sum()),
        float(np.linalg.norm(diff) / np.linalg.norm(ref)),
        float(np.abs(diff).max() / np.abs(ref).max()),
    )
