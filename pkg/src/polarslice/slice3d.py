"""3D polar wavelets and their closed-form projections.

Frequency form of a 3D frame function (level ``j``, translate ``k`` on
the ``2^-j`` grid, orientation window ``w``):

    psi_hat(xi) = 2^(-3j/2) (2pi)^(-3/2) w(xi/|xi|) h_hat(2^-j |xi|)
                  * exp(-i <xi, 2^-j k>)

Two projections exist.  Projecting along one direction ``nu`` yields a
*2D* polar wavelet on the plane orthogonal to ``nu`` whose angular
Fourier coefficients are

    beta_m = 2^(-j/2) sum_l C_lm kappa^nu_lm P_l^m(0),

with ``kappa^nu`` the window re-expressed in a frame whose pole is
``nu`` -- angular localisation survives projection.  Projecting along
two directions (onto the axis ``nu``) yields the same 1D wavelet as in
2D slicing, with weight ``2^(-j/2)`` times the window value at ``nu``.
Scaling functions project to scaling functions with unit weight at every
step, so the family is closed under projection.

Dense 3D analysis/synthesis is provided for small grids only; it mirrors
the 2D frequency-domain construction with isotropic windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from polarslice import radial_window as rw
from polarslice.angular_window import (
    AngularWindow3D,
    make_isotropic_3d,
    make_zonal_cap_3d,
    rotate_kappa,
    window_eval_3d,
)
from polarslice.frame2d import CoefficientSet, GridSpec2D, SampledSignal2D, WaveletIndex
from polarslice.slice2d import GridSpec1D, SampledSignal1D, SlicedWavelet1D
from polarslice.special_functions import SphericalDirection, sph_harm_norm

MAX_GRID = 64


def fibonacci_directions(n: int) -> list[SphericalDirection]:
    """Deterministic, roughly uniform orientation set on the half-sphere."""
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    out = []
    for i in range(n):
        z = 1.0 - (i + 0.5) / n  # upper half sphere
        theta = math.acos(z)
        phi = (2.0 * math.pi * i / golden) % (2.0 * math.pi)
        out.append(SphericalDirection(theta, phi))
    return out


@dataclass(frozen=True)
class FrameConfig3D:
    """3D frame layout; analysis supports isotropic windows only."""

    j_max: int = 2
    domain: tuple[tuple[float, float], ...] = ((-4.0, 4.0),) * 3
    orientations: str | tuple[int, ...] = "isotropic"
    apron: float = 2.0
    cap_exponent: int = 4
    band_limit: int = 8

    def __post_init__(self) -> None:
        if self.j_max < 0:
            raise ValueError("j_max must be >= 0")
        if len(self.domain) != 3:
            raise ValueError("domain must have three axes")
        for lo, hi in self.domain:
            if not hi > lo:
                raise ValueError("domain box is degenerate")
        if isinstance(self.orientations, tuple):
            if len(self.orientations) != self.j_max + 1:
                raise ValueError("need one orientation count per level 0..j_max")
        elif self.orientations != "isotropic":
            raise ValueError(f"unknown orientation spec {self.orientations!r}")

    def orientation_count(self, j: int) -> int:
        if j == -1:
            return 1
        if self.orientations == "isotropic":
            return 1
        return self.orientations[j]

    def spacing(self, j: int) -> float:
        return 1.0 if j == -1 else 2.0 ** (-j)

    @property
    def levels(self) -> list[int]:
        return list(range(-1, self.j_max + 1))

    @property
    def box_origin(self) -> tuple[float, ...]:
        return tuple(float(math.floor(lo - self.apron)) for lo, _ in self.domain)

    @property
    def box_extent(self) -> float:
        sides = [
            math.ceil(hi + self.apron) - math.floor(lo - self.apron)
            for lo, hi in self.domain
        ]
        return float(max(sides))

    def level_shape(self, j: int) -> int:
        t = int(round(self.box_extent))
        return t if j == -1 else t * 2**j

    def level_k_origin(self, j: int) -> tuple[int, ...]:
        scale = 1 if j == -1 else 2**j
        return tuple(int(round(o * scale)) for o in self.box_origin)


@lru_cache(maxsize=64)
def level_windows_3d(cfg: FrameConfig3D, j: int) -> tuple[AngularWindow3D, ...]:
    n = cfg.orientation_count(j)
    if j == -1 or n == 1:
        return (make_isotropic_3d(level=j),)
    cap = make_zonal_cap_3d(
        exponent=cfg.cap_exponent, band_limit=cfg.band_limit, level=j
    )
    out = []
    for t, axis in enumerate(fibonacci_directions(n)):
        rotated = rotate_kappa(cap, axis)
        out.append(AngularWindow3D(level=j, orientation=t, kappa=rotated.kappa))
    return tuple(out)


def _amplitude_3d(j: int) -> float:
    scale = 1.0 if j == -1 else 2.0 ** (-1.5 * j)
    return scale / (2.0 * math.pi) ** 1.5


def rotation_to_pole(nu: SphericalDirection) -> np.ndarray:
    """Active rotation ``Rz(phi) Ry(theta)`` mapping the +z axis to ``nu``."""
    ct, st = math.cos(nu.theta), math.sin(nu.theta)
    cp, sp = math.cos(nu.phi), math.sin(nu.phi)
    ry = np.array([[ct, 0.0, st], [0.0, 1.0, 0.0], [-st, 0.0, ct]])
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry


# --- grids and dense transform -------------------------------------------------


@dataclass(frozen=True)
class GridSpec3D:
    origin: tuple[float, float, float]
    spacing: float
    shape: tuple[int, int, int]

    def axes(self):
        return tuple(
            self.origin[a] + self.spacing * np.arange(self.shape[a]) for a in range(3)
        )


@dataclass
class SampledSignal3D:
    origin: tuple[float, float, float]
    spacing: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3:
            raise ValueError("values must be a 3D array")

    @property
    def grid(self) -> GridSpec3D:
        return GridSpec3D(tuple(self.origin), self.spacing, self.values.shape)

    def l2_norm(self) -> float:
        return float(self.spacing**1.5 * math.sqrt(np.sum(self.values**2)))

    @classmethod
    def from_function(cls, grid: GridSpec3D, fn) -> "SampledSignal3D":
        ax = grid.axes()
        xx, yy, zz = np.meshgrid(*ax, indexing="ij")
        return cls(grid.origin, grid.spacing, fn(xx, yy, zz))


def _check_grid_size(n: int) -> None:
    if n > MAX_GRID:
        raise ValueError(
            f"dense 3D transform is limited to {MAX_GRID}^3 grids, got {n}^3"
        )


def _resolution_of(spacing: float) -> int:
    res = round(math.log2(1.0 / spacing))
    if abs(spacing - 2.0 ** (-res)) > 1e-9 * spacing:
        raise ValueError(f"grid spacing must be a power of two, got {spacing}")
    return int(res)


def analyze_3d(sig: SampledSignal3D, cfg: FrameConfig3D) -> CoefficientSet:
    """Dense frequency-domain analysis on small (<= 64^3) grids."""
    if cfg.orientations != "isotropic":
        raise ValueError("3D analysis supports isotropic frames only")
    res = _resolution_of(sig.spacing)
    if res < cfg.j_max:
        raise ValueError("grid does not resolve the top level")
    t = int(round(cfg.box_extent))
    n = t * 2**res
    _check_grid_size(n)
    vals = np.zeros((n, n, n))
    off = []
    for a in range(3):
        o = (sig.origin[a] - cfg.box_origin[a]) / sig.spacing
        if abs(o - round(o)) > 1e-6:
            raise ValueError("signal grid is not aligned with the frame grid")
        off.append(int(round(o)))
    sl = tuple(slice(o, o + s) for o, s in zip(off, sig.values.shape))
    vals[sl] = sig.values
    spectrum = np.fft.fftn(vals)
    freq = 2.0 * math.pi * np.fft.fftfreq(n, d=sig.spacing)
    mag = np.sqrt(
        freq[:, None, None] ** 2 + freq[None, :, None] ** 2 + freq[None, None, :] ** 2
    )
    out = CoefficientSet(cfg, dim=3)
    for j in cfg.levels:
        radial = rw.phi_hat(mag) if j == -1 else rw.h_hat(mag * 2.0 ** (-j))
        stride = 2 ** (res - max(j, 0))
        nj = cfg.level_shape(j)
        band = np.fft.ifftn(spectrum * radial)
        sub = band[::stride, ::stride, ::stride]
        coeff = (2.0 * math.pi) ** 1.5 * _amplitude_3d(j) * sub
        kk = np.indices((nj, nj, nj)).reshape(3, -1).T
        k = kk + np.asarray(cfg.level_k_origin(j))
        v = coeff.real.ravel()
        nz = v != 0.0
        out.set_group(j, 0, k[nz], v[nz])
    return out


def synthesize_3d(c: CoefficientSet, grid: GridSpec3D) -> SampledSignal3D:
    """Evaluate a 3D coefficient set on a grid (periodised accumulation)."""
    cfg = c.config
    res = _resolution_of(grid.spacing)
    t = int(round(cfg.box_extent))
    n = t * 2**res
    _check_grid_size(n)
    freq = 2.0 * math.pi * np.fft.fftfreq(n, d=grid.spacing)
    mag = np.sqrt(
        freq[:, None, None] ** 2 + freq[None, :, None] ** 2 + freq[None, None, :] ** 2
    )
    accum = np.zeros((n, n, n), dtype=complex)
    for j in cfg.levels:
        k, v = c.group(j, 0)
        if len(k) == 0:
            continue
        nj = cfg.level_shape(j)
        arr = np.zeros((nj, nj, nj))
        kk = k - np.asarray(cfg.level_k_origin(j))
        if np.any(kk < 0) or np.any(kk >= nj):
            raise ValueError("coefficient translate outside the frame box")
        arr[kk[:, 0], kk[:, 1], kk[:, 2]] = v
        s_small = np.fft.fftn(arr)
        reps = n // nj
        s_full = np.tile(s_small, (reps, reps, reps))
        radial = rw.phi_hat(mag) if j == -1 else rw.h_hat(mag * 2.0 ** (-j))
        accum += _amplitude_3d(j) * radial * s_full
    vals = (2.0 * math.pi) ** 1.5 / grid.spacing**3 * np.fft.ifftn(accum)
    off = []
    for a in range(3):
        o = (grid.origin[a] - cfg.box_origin[a]) / grid.spacing
        if abs(o - round(o)) > 1e-6:
            raise ValueError("output grid is not aligned with the frame grid")
        off.append(int(round(o)))
    sl = tuple(slice(o, o + s) for o, s in zip(off, grid.shape))
    return SampledSignal3D(grid.origin, grid.spacing, vals.real[sl])


# --- pointwise frequency evaluation --------------------------------------------


def eval_wavelet_freq_3d(s: WaveletIndex, xi, cfg: FrameConfig3D) -> complex:
    """Frequency-domain value of one 3D frame function."""
    if s.dim != 3:
        raise ValueError("expected a 3D index")
    xi = np.asarray(xi, dtype=float)
    mag = float(np.linalg.norm(xi))
    if s.j == -1:
        radial = rw.phi_hat(mag)
        angular = 1.0 + 0.0j
    else:
        radial = rw.h_hat(mag * 2.0 ** (-s.j))
        if radial == 0.0:
            return 0.0 + 0.0j
        w = level_windows_3d(cfg, s.j)[s.t]
        d = SphericalDirection.from_vector(xi)
        angular = complex(window_eval_3d(w, d.theta, d.phi))
    phase = np.exp(-1j * float(xi @ s.center))
    return complex(_amplitude_3d(s.j) * radial * angular * phase)


# --- slicing to 2D ---------------------------------------------------------------


@dataclass(frozen=True)
class SlicedWavelet2D:
    """2D polar wavelet obtained by projecting a 3D one along ``nu``.

    ``beta[i]`` is the angular coefficient of ``exp(i m theta)`` for
    ``m = i - m_max``, in the in-plane frame ``(R_nu e1, R_nu e2)``.
    """

    j: int
    center: tuple[float, float]
    beta: np.ndarray | None
    scaling: bool = False

    @property
    def m_max(self) -> int:
        return 0 if self.beta is None else (len(self.beta) - 1) // 2


def slice_to_2d(
    s: WaveletIndex, nu: SphericalDirection, cfg: FrameConfig3D
) -> SlicedWavelet2D:
    """Project one 3D frame function along ``nu``."""
    if s.dim != 3:
        raise ValueError("expected a 3D index")
    rot = rotation_to_pole(nu)
    center3 = s.center
    center2 = (float(center3 @ rot[:, 0]), float(center3 @ rot[:, 1]))
    if s.j == -1:
        return SlicedWavelet2D(j=-1, center=center2, beta=None, scaling=True)
    w = level_windows_3d(cfg, s.j)[s.t]
    rotated = rotate_kappa(w, nu)
    L = rotated.band_limit
    beta = np.zeros(2 * L + 1, dtype=complex)
    from scipy.special import lpmv

    for m in range(-L, L + 1):
        acc = 0.0 + 0.0j
        for l in range(abs(m), L + 1):
            k = rotated.kappa[l, m + L]
            if k != 0:
                acc += sph_harm_norm(l, m) * k * lpmv(m, l, 0.0)
        beta[m + L] = acc
    beta *= 2.0 ** (-0.5 * s.j)
    return SlicedWavelet2D(j=s.j, center=center2, beta=beta)


def eval_sliced_2d(w: SlicedWavelet2D, points) -> np.ndarray:
    """Evaluate the projected wavelet at 2D points (shape ``(n, 2)``)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    y = pts - np.asarray(w.center)
    r = np.hypot(y[:, 0], y[:, 1])
    if w.scaling:
        return rw.scaling_profile()(r) / (2.0 * math.pi)
    theta = np.arctan2(y[:, 1], y[:, 0])
    scale = 2.0**w.j
    acc = np.zeros(len(pts), dtype=complex)
    for i, m in enumerate(range(-w.m_max, w.m_max + 1)):
        b = w.beta[i]
        if b == 0:
            continue
        prof = rw.wavelet_profile(abs(m))(scale * r)
        if m < 0:
            prof = prof * (-1.0) ** (-m)
        acc += (1j**m) * b * np.exp(1j * m * theta) * prof
    return (scale / (2.0 * math.pi) * acc).real


def project_3d_to_2d(
    c: CoefficientSet, nu: SphericalDirection, grid: GridSpec2D
) -> SampledSignal2D:
    """Project a 3D coefficient set along ``nu`` onto a plane grid."""
    ax0, ax1 = (
        grid.origin[0] + grid.spacing * np.arange(grid.shape[0]),
        grid.origin[1] + grid.spacing * np.arange(grid.shape[1]),
    )
    xx, yy = np.meshgrid(ax0, ax1, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    out = np.zeros(len(pts))
    rot = rotation_to_pole(nu)
    cfg = c.config
    for (j, t), (k, v) in sorted(c.groups()):
        template = slice_to_2d(WaveletIndex(3, j, (0, 0, 0), t), nu, cfg)
        centers3 = cfg.spacing(j) * k
        c0 = centers3 @ rot[:, 0]
        c1 = centers3 @ rot[:, 1]
        isotropic = template.scaling or template.m_max == 0
        if isotropic:
            if template.scaling:
                prof = rw.scaling_profile()
                amp = 1.0 / (2.0 * math.pi)
            else:
                prof = rw.wavelet_profile(0)
                amp = float(template.beta[0].real) * 2.0**j / (2.0 * math.pi)
            scale = 1.0 if template.scaling else 2.0**j
            for lo in range(0, len(v), 256):
                d0 = pts[None, :, 0] - c0[lo : lo + 256, None]
                d1 = pts[None, :, 1] - c1[lo : lo + 256, None]
                r = np.hypot(d0, d1)
                out += (amp * v[lo : lo + 256]) @ prof(scale * r)
        else:
            for idx in range(len(v)):
                w = SlicedWavelet2D(
                    j=template.j,
                    center=(float(c0[idx]), float(c1[idx])),
                    beta=template.beta,
                    scaling=False,
                )
                out += v[idx] * eval_sliced_2d(w, pts)
    return SampledSignal2D((ax0[0], ax1[0]), grid.spacing, out.reshape(grid.shape))


# --- slicing to 1D ---------------------------------------------------------------


def slice_to_1d(
    s: WaveletIndex, nu_axis: SphericalDirection, cfg: FrameConfig3D
) -> SlicedWavelet1D:
    """Project one 3D frame function onto the axis ``nu_axis``.

    The weight is the angular window evaluated at the axis direction
    (equivalently: rotate the window so the axis is the pole, then read
    the pole value) times the cross-dimension factor ``2^(-j/2)``.
    """
    if s.dim != 3:
        raise ValueError("expected a 3D index")
    center = float(s.center @ nu_axis.to_vector())
    if s.j == -1:
        return SlicedWavelet1D(j=-1, center=center, weight=1.0, scaling=True)
    w = level_windows_3d(cfg, s.j)[s.t]
    val = complex(window_eval_3d(w, nu_axis.theta, nu_axis.phi))
    weight = 2.0 ** (-0.5 * s.j) * val.real
    return SlicedWavelet1D(j=s.j, center=center, weight=weight)


def project_3d_to_1d(
    c: CoefficientSet,
    nu_axis: SphericalDirection,
    grid: GridSpec1D,
    omega_cut: float = 1e-8,
) -> SampledSignal1D:
    """Project a 3D coefficient set onto the axis ``nu_axis``."""
    y = grid.points()
    out = np.zeros(grid.n)
    axis = nu_axis.to_vector()
    cfg = c.config
    for (j, t), (k, v) in sorted(c.groups()):
        template = slice_to_1d(WaveletIndex(3, j, (0, 0, 0), t), nu_axis, cfg)
        if abs(template.weight) <= omega_cut:
            continue
        centers = cfg.spacing(j) * (k @ axis)
        scale = 1.0 if j == -1 else 2.0**j
        prof = rw.scaling_slice_profile() if j == -1 else rw.wavelet_slice_profile()
        for lo in range(0, len(centers), 2048):
            ctr = centers[lo : lo + 2048]
            val = v[lo : lo + 2048]
            diff = y[None, :] - ctr[:, None]
            out += (template.weight * val) @ prof(scale * diff)
    return SampledSignal1D(grid.origin, grid.spacing, out)
