"""Parallel-beam tomography in the wavelet basis.

Measurements are exact line integrals of an ellipse phantom (closed-form
chord lengths).  The forward model writes each measurement as the sliced
frame expansion evaluated at the detector offset, giving a linear system
``m = Z r`` whose columns are sliced wavelets; reconstruction is a
truncated-SVD least-squares solve for the frame coefficients ``r``,
which are then evaluated on a pixel grid.

The default phantom builds each structure from a few nested ellipse
shells with small density steps: measurements stay closed-form while the
density has no large jumps, so a finite-level frame can represent it to
pixel accuracy.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from polarslice import radial_window as rw
from polarslice.frame2d import (
    CoefficientSet,
    FrameConfig,
    GridSpec2D,
    SampledSignal2D,
    WaveletIndex,
    level_windows,
)
from polarslice.slice2d import ProjectionDirection2D, group_weight_of_window

DEFAULT_SVD_CUTOFF = 1e-6


@dataclass(frozen=True)
class Ellipse:
    center: tuple[float, float]
    semi_axes: tuple[float, float]
    rotation: float
    density: float

    def __post_init__(self) -> None:
        if self.semi_axes[0] <= 0 or self.semi_axes[1] <= 0:
            raise ValueError("semi-axes must be positive")


@dataclass
class Phantom:
    """Additive superposition of constant-density ellipses."""

    ellipses: list[Ellipse]

    def sample(self, grid: GridSpec2D) -> SampledSignal2D:
        xx, yy = grid.meshgrid()
        out = np.zeros(grid.shape)
        for e in self.ellipses:
            ca, sa = math.cos(e.rotation), math.sin(e.rotation)
            dx = xx - e.center[0]
            dy = yy - e.center[1]
            u = (ca * dx + sa * dy) / e.semi_axes[0]
            v = (-sa * dx + ca * dy) / e.semi_axes[1]
            out += np.where(u**2 + v**2 <= 1.0, e.density, 0.0)
        return SampledSignal2D(grid.origin, grid.spacing, out)

    def to_json(self) -> dict:
        return {
            "ellipses": [
                {
                    "center": list(e.center),
                    "semi_axes": list(e.semi_axes),
                    "rotation": e.rotation,
                    "density": e.density,
                }
                for e in self.ellipses
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "Phantom":
        try:
            ellipses = [
                Ellipse(
                    center=tuple(float(x) for x in e["center"]),
                    semi_axes=tuple(float(x) for x in e["semi_axes"]),
                    rotation=float(e["rotation"]),
                    density=float(e["density"]),
                )
                for e in data["ellipses"]
            ]
        except (KeyError, TypeError, IndexError) as exc:
            raise ValueError(f"malformed phantom description: {exc}") from exc
        return cls(ellipses)


def _shells(center, semi_axes, rotation, total, n, inner_scale) -> list[Ellipse]:
    """Nested shells with equal density steps from full size down to
    ``inner_scale``; their sum ramps from ``total/n`` at the rim to
    ``total`` in the core."""
    scales = np.linspace(1.0, inner_scale, n)
    return [
        Ellipse(
            center=center,
            semi_axes=(semi_axes[0] * s, semi_axes[1] * s),
            rotation=rotation,
            density=total / n,
        )
        for s in scales
    ]


def default_phantom() -> Phantom:
    """Head-like test density: outer hull, a soft dip, and two balls.

    Shell counts keep every density step small and the limiting ramps
    gentle, so a level-3 frame represents the density to ~2% pointwise;
    all structure stays inside radius ~3.3, within the angularly
    well-determined zone of the default measurement set.
    """
    s = 0.78
    ellipses: list[Ellipse] = []
    ellipses += _shells((0.0, 0.08), (4.2 * s, 3.4 * s), 0.05, 1.0, 96, 0.62)
    ellipses += _shells((0.55 * s, 0.7 * s), (0.85 * s, 1.35 * s), -0.25, -0.18, 24, 0.5)
    ellipses += _shells((-1.0 * s, -0.4 * s), (0.9 * s, 0.9 * s), 0.0, 0.30, 24, 0.4)
    ellipses += _shells((1.25 * s, 0.8 * s), (0.5 * s, 0.5 * s), 0.0, 0.30, 24, 0.35)
    return Phantom(ellipses)


@dataclass(frozen=True)
class Ray:
    """Line with direction angle ``theta`` at detector offset ``offset``.

    Points are ``offset * d + s * nu`` with ``nu = (cos, sin)(theta)``
    and detector axis ``d = (sin, -cos)(theta)``.
    """

    theta: float
    offset: float

    @property
    def nu(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def axis(self) -> np.ndarray:
        return np.array([math.sin(self.theta), -math.cos(self.theta)])


def line_integral(phantom: Phantom, ray: Ray) -> float:
    """Exact integral along the ray: density times chord per ellipse."""
    p0 = ray.offset * ray.axis
    d = ray.nu
    total = 0.0
    for e in phantom.ellipses:
        ca, sa = math.cos(e.rotation), math.sin(e.rotation)
        a, b = e.semi_axes
        qx = (ca * (p0[0] - e.center[0]) + sa * (p0[1] - e.center[1])) / a
        qy = (-sa * (p0[0] - e.center[0]) + ca * (p0[1] - e.center[1])) / b
        dx = (ca * d[0] + sa * d[1]) / a
        dy = (-sa * d[0] + ca * d[1]) / b
        aa = dx * dx + dy * dy
        bb = 2.0 * (qx * dx + qy * dy)
        cc = qx * qx + qy * qy - 1.0
        disc = bb * bb - 4.0 * aa * cc
        if disc > 0.0:
            total += e.density * math.sqrt(disc) / aa
    return total


@dataclass
class Sinogram:
    """Measurements ``values[a, i]`` for orientation ``angles[a]`` at
    detector offset ``offsets[i]``."""

    angles: np.ndarray
    offsets: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.angles = np.asarray(self.angles, dtype=float)
        self.offsets = np.asarray(self.offsets, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.angles), len(self.offsets)):
            raise ValueError("sinogram dimensions are inconsistent")

    def vector(self) -> np.ndarray:
        return self.values.ravel()


def simulate_sinogram(
    phantom: Phantom,
    n_orient: int,
    n_samples: int,
    detector_extent: tuple[float, float],
) -> Sinogram:
    """Exact sinogram on uniform orientations in [0, pi) and uniform
    detector offsets over ``detector_extent``."""
    if n_orient < 1 or n_samples < 1:
        raise ValueError("counts must be >= 1")
    angles = math.pi * np.arange(n_orient) / n_orient
    offsets = np.linspace(detector_extent[0], detector_extent[1], n_samples)
    values = np.empty((n_orient, n_samples))
    for a, theta in enumerate(angles):
        for i, lam in enumerate(offsets):
            values[a, i] = line_integral(phantom, Ray(theta, lam))
    return Sinogram(angles, offsets, values)


def save_sinogram_csv(sino: Sinogram, path) -> None:
    """CSV layout: header row of angles, then one row per detector offset
    (first column is the offset)."""
    with open(path, "w") as fh:
        fh.write("offset," + ",".join(f"{a:.17g}" for a in sino.angles) + "\n")
        for i, lam in enumerate(sino.offsets):
            row = ",".join(f"{v:.17g}" for v in sino.values[:, i])
            fh.write(f"{lam:.17g},{row}\n")


def load_sinogram_csv(path) -> Sinogram:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[0] != "offset":
            raise ValueError("not a sinogram CSV: missing offset header")
        angles = np.array([float(x) for x in header[1:]])
        offsets = []
        rows = []
        for line in fh:
            parts = [float(x) for x in line.strip().split(",")]
            offsets.append(parts[0])
            rows.append(parts[1:])
    values = np.asarray(rows).T
    return Sinogram(angles, np.asarray(offsets), values)


@dataclass
class SystemMatrix:
    """Dense forward operator: rows (orientation, offset), columns basis
    functions in the order of ``columns``."""

    matrix: np.ndarray
    angles: np.ndarray
    offsets: np.ndarray
    columns: list[WaveletIndex]
    culled_entries: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def full_basis(cfg: FrameConfig) -> list[WaveletIndex]:
    """Every frame function with centre inside the domain box."""
    out: list[WaveletIndex] = []
    for j in cfg.levels:
        k = cfg.domain_indices(j)
        for t in range(cfg.orientation_count(j)):
            out += [WaveletIndex(2, j, tuple(int(x) for x in row), t) for row in k]
    return out


def select_sparse_basis(
    cfg: FrameConfig,
    regions: dict[int, list[tuple[tuple[float, float], tuple[float, float]]]],
) -> list[WaveletIndex]:
    """Basis functions restricted per level to the given boxes.

    Levels missing from ``regions`` keep their full domain complement;
    a level mapped to an empty list contributes nothing.
    """
    out: list[WaveletIndex] = []
    for j in cfg.levels:
        k = cfg.domain_indices(j)
        if j in regions:
            boxes = regions[j]
            if not boxes:
                continue
            sp = cfg.spacing(j)
            centers = sp * k
            keep = np.zeros(len(k), dtype=bool)
            for (x0, x1), (y0, y1) in boxes:
                keep |= (
                    (centers[:, 0] >= x0)
                    & (centers[:, 0] <= x1)
                    & (centers[:, 1] >= y0)
                    & (centers[:, 1] <= y1)
                )
            k = k[keep]
        for t in range(cfg.orientation_count(j)):
            out += [WaveletIndex(2, j, tuple(int(x) for x in row), t) for row in k]
    return out


def _grouped_columns(basis: list[WaveletIndex]):
    groups: dict[tuple[int, int], list[int]] = {}
    for col, s in enumerate(basis):
        groups.setdefault((s.j, s.t), []).append(col)
    return groups


#: Slice support (in units of 2^-j) used when assembling reconstruction
#: systems.  The 1/x^2 profile tails couple every column to every
#: detector sample at the 1e-3 level; left in place they produce a
#: continuum of weakly-determined singular directions that amplify the
#: out-of-model content of real measurements catastrophically.
#: Truncating the columns at a modest radius decouples them (the forward
#: modelling error is only the tail mass, ~1e-3 relative) and restores a
#: well-conditioned system.
DEFAULT_SUPPORT_RADIUS = 12.0


def assemble_system(
    cfg: FrameConfig,
    basis: list[WaveletIndex],
    sino: Sinogram,
    omega_cut: float = 1e-8,
    support_radius: float | None = None,
) -> SystemMatrix:
    """Forward matrix: column ``s`` at row ``(a, i)`` is the sliced
    wavelet of ``s`` for orientation ``a`` evaluated at offset ``i``.

    Orientation groups with angular weight ``<= omega_cut`` are dropped
    (their block stays zero).  ``support_radius`` truncates each column
    beyond that many scaled units from its centre (None keeps the full
    profile table range)."""
    if not basis:
        raise ValueError("basis is empty")
    n_rows = len(sino.angles) * len(sino.offsets)
    if n_rows == 0:
        raise ValueError("sinogram is empty")
    if n_rows > 1e5 or len(basis) > 1e4:
        raise ValueError(
            f"system of {n_rows} x {len(basis)} exceeds the dense solver limit"
        )
    matrix = np.zeros((n_rows, len(basis)))
    groups = _grouped_columns(basis)
    n_off = len(sino.offsets)
    culled = 0
    for a, theta in enumerate(sino.angles):
        nu = ProjectionDirection2D(theta)
        rows = slice(a * n_off, (a + 1) * n_off)
        for (j, t), cols in groups.items():
            w = group_weight_of_window(cfg, j, t, nu)
            if abs(w) <= omega_cut:
                culled += len(cols) * n_off
                continue
            sp = cfg.spacing(j)
            centers = sp * np.array([basis[c].k for c in cols], dtype=float) @ nu.axis
            scale = 1.0 if j == -1 else 2.0**j
            prof = rw.scaling_slice_profile() if j == -1 else rw.wavelet_slice_profile()
            arg = scale * (sino.offsets[:, None] - centers[None, :])
            vals = w * prof(arg)
            if support_radius is not None:
                vals[np.abs(arg) > support_radius] = 0.0
            matrix[rows, np.asarray(cols)] = vals
    return SystemMatrix(
        matrix=matrix,
        angles=sino.angles,
        offsets=sino.offsets,
        columns=list(basis),
        culled_entries=culled,
    )


def solve_lsq(system, measurements, svd_cutoff: float = DEFAULT_SVD_CUTOFF):
    """Minimum-norm least squares with singular values below
    ``svd_cutoff * sigma_max`` treated as zero.

    Accepts a SystemMatrix or a plain matrix.  Returns the coefficient
    vector and a diagnostics dict (rank, sizes, singular value range,
    residual norm)."""
    matrix = getattr(system, "matrix", system)
    m = np.asarray(measurements, dtype=float).ravel()
    if matrix.shape[0] != len(m):
        raise ValueError("measurement vector does not match the system rows")
    x, _, rank, sv = np.linalg.lstsq(matrix, m, rcond=svd_cutoff)
    residual = float(np.linalg.norm(matrix @ x - m))
    info = {
        "rank": int(rank),
        "n_rows": int(matrix.shape[0]),
        "n_cols": int(matrix.shape[1]),
        "sigma_max": float(sv[0]) if len(sv) else 0.0,
        "sigma_min": float(sv[-1]) if len(sv) else 0.0,
        "residual": residual,
    }
    return x, info


def coefficients_from_solution(
    cfg: FrameConfig, basis: list[WaveletIndex], x: np.ndarray
) -> CoefficientSet:
    out = CoefficientSet(cfg, dim=2)
    groups = _grouped_columns(basis)
    for (j, t), cols in groups.items():
        k = np.array([basis[c].k for c in cols], dtype=np.int64)
        v = np.asarray([x[c] for c in cols], dtype=float)
        nz = v != 0.0
        if np.any(nz):
            out.set_group(j, t, k[nz], v[nz])
    return out


def evaluate_frame_sum(
    cfg: FrameConfig, coeffs: CoefficientSet, grid: GridSpec2D
) -> SampledSignal2D:
    """Open-plane evaluation of ``sum_s r_s psi_s`` on a pixel grid.

    Unlike frequency-domain synthesis this does not periodise, which
    matches the tomographic forward model (open line integrals)."""
    ax0 = grid.origin[0] + grid.spacing * np.arange(grid.shape[0])
    ax1 = grid.origin[1] + grid.spacing * np.arange(grid.shape[1])
    xx, yy = np.meshgrid(ax0, ax1, indexing="ij")
    pts0 = xx.ravel()
    pts1 = yy.ravel()
    out = np.zeros(pts0.shape)
    for (j, t), (k, v) in sorted(coeffs.groups()):
        sp = cfg.spacing(j)
        centers = sp * k
        window = level_windows(cfg, j)[t]
        scale = 1.0 if j == -1 else 2.0**j
        amp = scale / (2.0 * math.pi)
        if j == -1:
            prof = rw.scaling_profile()
        else:
            prof = rw.wavelet_profile(0)
        if window.n_max == 0:
            for lo in range(0, len(v), 256):
                d0 = pts0[None, :] - centers[lo : lo + 256, 0:1]
                d1 = pts1[None, :] - centers[lo : lo + 256, 1:2]
                out += (amp * v[lo : lo + 256]) @ prof(scale * np.hypot(d0, d1))
        else:
            for idx in range(len(v)):
                d0 = pts0 - centers[idx, 0]
                d1 = pts1 - centers[idx, 1]
                r = np.hypot(d0, d1)
                theta = np.arctan2(d1, d0)
                acc = np.zeros(r.shape, dtype=complex)
                for i, n in enumerate(window.n_values):
                    b = window.beta[i]
                    if b == 0:
                        continue
                    p = rw.wavelet_profile(abs(int(n)))(scale * r)
                    if n < 0:
                        p = p * (-1.0) ** (-n)
                    acc += (1j ** int(n)) * b * np.exp(1j * n * theta) * p
                out += v[idx] * amp * acc.real
    return SampledSignal2D((ax0[0], ax1[0]), grid.spacing, out.reshape(grid.shape))


def error_metrics(rec: SampledSignal2D, ref: SampledSignal2D) -> dict[str, float]:
    """Relative L1/L2/Linf of ``rec - ref`` w.r.t. the matching norms of
    ``ref`` on a shared grid."""
    if rec.values.shape != ref.values.shape:
        raise ValueError("grids have different shapes")
    if abs(rec.spacing - ref.spacing) > 1e-12 or tuple(rec.origin) != tuple(ref.origin):
        raise ValueError("grids are not aligned")
    diff = rec.values - ref.values
    n1 = np.abs(ref.values).sum()
    n2 = np.linalg.norm(ref.values)
    ninf = np.abs(ref.values).max()
    if ninf == 0.0:
        raise ValueError("reference signal is identically zero")
    return {
        "l1": float(np.abs(diff).sum() / n1),
        "l2": float(np.linalg.norm(diff) / n2),
        "linf": float(np.abs(diff).max() / ninf),
    }


@dataclass
class ReconstructionResult:
    coefficients: CoefficientSet
    solution: np.ndarray
    basis: list[WaveletIndex]
    info: dict

    def on_grid(self, grid: GridSpec2D) -> SampledSignal2D:
        return evaluate_frame_sum(self.coefficients.config, self.coefficients, grid)


def reconstruct(
    cfg: FrameConfig,
    sino: Sinogram,
    basis: list[WaveletIndex] | None = None,
    svd_cutoff: float = DEFAULT_SVD_CUTOFF,
    omega_cut: float = 1e-8,
    support_radius: float | None = DEFAULT_SUPPORT_RADIUS,
) -> ReconstructionResult:
    """Assemble the system for ``basis`` (full domain basis by default)
    and solve the least-squares problem."""
    basis = full_basis(cfg) if basis is None else basis
    t0 = time.perf_counter()
    system = assemble_system(
        cfg, basis, sino, omega_cut=omega_cut, support_radius=support_radius
    )
    t1 = time.perf_counter()
    x, info = solve_lsq(system, sino.vector(), svd_cutoff=svd_cutoff)
    t2 = time.perf_counter()
    info["assemble_seconds"] = t1 - t0
    info["solve_seconds"] = t2 - t1
    info["matrix_entries"] = int(system.matrix.size)
    coeffs = coefficients_from_solution(cfg, basis, x)
    return ReconstructionResult(coeffs, x, basis, info)
