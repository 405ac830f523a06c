"""Tests for sinogram simulation and least-squares reconstruction."""

import math

import numpy as np
import pytest

from polarslice.frame2d import FrameConfig, GridSpec2D, WaveletIndex, analyze, threshold
from polarslice.slice2d import GridSpec1D, ProjectionDirection2D, project
from polarslice.tomography import (
    Ellipse,
    Phantom,
    Ray,
    Sinogram,
    SystemMatrix,
    assemble_system,
    coefficients_from_solution,
    default_phantom,
    error_metrics,
    evaluate_frame_sum,
    full_basis,
    line_integral,
    load_sinogram_csv,
    reconstruct,
    save_sinogram_csv,
    select_sparse_basis,
    simulate_sinogram,
    solve_lsq,
)
from polarslice.frame2d import SampledSignal2D

UNIT_DISK = Phantom([Ellipse((0.0, 0.0), (1.0, 1.0), 0.0, 1.0)])


def ray_marching_oracle(phantom: Phantom, ray: Ray, step=1e-4, half_length=8.0):
    s = np.arange(-half_length, half_length, step)
    p0 = ray.offset * ray.axis
    x = p0[0] + s * ray.nu[0]
    y = p0[1] + s * ray.nu[1]
    total = np.zeros_like(s)
    for e in phantom.ellipses:
        ca, sa = math.cos(e.rotation), math.sin(e.rotation)
        u = (ca * (x - e.center[0]) + sa * (y - e.center[1])) / e.semi_axes[0]
        v = (-sa * (x - e.center[0]) + ca * (y - e.center[1])) / e.semi_axes[1]
        total += np.where(u**2 + v**2 <= 1.0, e.density, 0.0)
    return float(total.sum() * step)


# --- line integrals -------------------------------------------------------------


def test_diameter_chord_of_unit_disk():
    assert line_integral(UNIT_DISK, Ray(0.3, 0.0)) == pytest.approx(2.0, abs=1e-12)


def test_ray_missing_everything():
    assert line_integral(UNIT_DISK, Ray(1.0, 5.0)) == 0.0


def test_line_integral_matches_ray_marching():
    rng = np.random.default_rng(8)
    phantom = default_phantom()
    for _ in range(6):
        ray = Ray(float(rng.uniform(0, math.pi)), float(rng.uniform(-4, 4)))
        assert line_integral(phantom, ray) == pytest.approx(
            ray_marching_oracle(phantom, ray), abs=1e-3
        )


def test_rotated_ellipse_chord():
    e = Phantom([Ellipse((0.5, -0.25), (2.0, 0.5), 0.7, 2.0)])
    ray = Ray(2.1, 0.4)
    assert line_integral(e, ray) == pytest.approx(
        ray_marching_oracle(e, ray), abs=1e-3
    )


# --- sinogram --------------------------------------------------------------------


def test_disk_sinogram_rotation_invariant():
    sino = simulate_sinogram(UNIT_DISK, 8, 33, (-1.5, 1.5))
    for a in range(1, 8):
        np.testing.assert_allclose(sino.values[a], sino.values[0], atol=1e-12)


def test_zero_phantom_gives_zero_sinogram():
    empty = Phantom([Ellipse((0.0, 0.0), (1.0, 1.0), 0.0, 0.0)])
    sino = simulate_sinogram(empty, 4, 9, (-2.0, 2.0))
    assert np.all(sino.values == 0.0)


def test_toy_sinogram_against_hand_chords():
    sino = simulate_sinogram(UNIT_DISK, 2, 3, (-0.5, 0.5))
    for lam, col in zip((-0.5, 0.0, 0.5), range(3)):
        chord = 2.0 * math.sqrt(1.0 - lam**2)
        assert sino.values[0, col] == pytest.approx(chord, abs=1e-12)
        assert sino.values[1, col] == pytest.approx(chord, abs=1e-12)


def test_sinogram_csv_roundtrip(tmp_path):
    sino = simulate_sinogram(UNIT_DISK, 3, 5, (-1.2, 1.2))
    path = tmp_path / "sino.csv"
    save_sinogram_csv(sino, path)
    back = load_sinogram_csv(path)
    np.testing.assert_array_equal(back.values, sino.values)
    np.testing.assert_array_equal(back.angles, sino.angles)
    np.testing.assert_array_equal(back.offsets, sino.offsets)


def test_sinogram_dimension_guard():
    with pytest.raises(ValueError):
        Sinogram(np.zeros(3), np.zeros(4), np.zeros((4, 3)))


# --- system assembly --------------------------------------------------------------


CFG = FrameConfig(j_max=2, domain=((-5.0, 5.0), (-5.0, 5.0)), apron=3.0)


def test_single_wavelet_column_is_its_slice():
    sino = simulate_sinogram(UNIT_DISK, 4, 16, (-7.0, 7.0))
    s = WaveletIndex(2, 1, (2, -1), 0)
    system = assemble_system(CFG, [s], sino, omega_cut=0.0)
    assert system.shape == (64, 1)
    from polarslice.slice2d import eval_sliced, slice_wavelet

    for a, theta in enumerate(sino.angles):
        sw = slice_wavelet(s, ProjectionDirection2D(theta), CFG)
        expected = [eval_sliced(sw, lam) for lam in sino.offsets]
        np.testing.assert_allclose(
            system.matrix[a * 16 : (a + 1) * 16, 0], expected, atol=1e-12
        )


def test_system_row_count_and_guards():
    sino = simulate_sinogram(UNIT_DISK, 3, 8, (-2.0, 2.0))
    basis = [WaveletIndex(2, -1, (0, 0), 0), WaveletIndex(2, 0, (1, 1), 0)]
    system = assemble_system(CFG, basis, sino)
    assert system.shape == (24, 2)
    with pytest.raises(ValueError):
        assemble_system(CFG, [], sino)


def test_forward_consistency_with_analysis():
    phantom = default_phantom()
    grid_n = int(round(CFG.box_extent)) * 2**CFG.j_max
    grid = GridSpec2D(CFG.box_origin, 2.0 ** (-CFG.j_max), (grid_n, grid_n))
    sampled = phantom.sample(grid)
    coeffs = threshold(analyze(sampled, CFG, pad=32.0), 1e-10)
    sino = simulate_sinogram(phantom, 12, 48, (-7.1, 7.1))
    basis = full_basis(CFG)
    system = assemble_system(CFG, basis, sino)
    r = np.array([coeffs.get(s) for s in basis])
    predicted = system.matrix @ r
    rel = np.linalg.norm(predicted - sino.vector()) / np.linalg.norm(sino.vector())
    assert rel < 5e-2


# --- least squares -----------------------------------------------------------------


def test_lsq_identity():
    m = np.array([1.0, -2.0, 3.0])
    x, info = solve_lsq(np.eye(3), m)
    np.testing.assert_allclose(x, m, atol=1e-12)
    assert info["rank"] == 3


def test_lsq_overdetermined_consistent():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(40, 7))
    x_true = rng.normal(size=7)
    x, info = solve_lsq(a, a @ x_true)
    np.testing.assert_allclose(x, x_true, atol=1e-10)
    assert info["residual"] < 1e-10


def test_lsq_svd_cutoff_semantics():
    u, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(8, 3)))
    v, _ = np.linalg.qr(np.random.default_rng(2).normal(size=(3, 3)))
    a = u @ np.diag([1.0, 1e-3, 1e-9]) @ v.T
    _, info = solve_lsq(a, np.ones(8), svd_cutoff=1e-6)
    assert info["rank"] == 2
    _, info = solve_lsq(a, np.ones(8), svd_cutoff=1e-12)
    assert info["rank"] == 3


def test_lsq_never_fails_on_rank_deficiency():
    a = np.zeros((5, 4))
    x, info = solve_lsq(a, np.ones(5))
    assert info["rank"] == 0
    np.testing.assert_allclose(x, 0.0)


# --- basis selection ----------------------------------------------------------------


def test_whole_domain_regions_keep_full_basis():
    whole = ((-5.0, 5.0), (-5.0, 5.0))
    regions = {j: [whole] for j in CFG.levels}
    assert len(select_sparse_basis(CFG, regions)) == len(full_basis(CFG))


def test_empty_region_removes_level():
    basis = select_sparse_basis(CFG, {2: []})
    assert all(s.j != 2 for s in basis)


def test_levels_missing_from_regions_stay_complete():
    basis = select_sparse_basis(CFG, {2: [((-1.0, 1.0), (-1.0, 1.0))]})
    full = full_basis(CFG)
    full_per_level = {j: sum(1 for s in full if s.j == j) for j in CFG.levels}
    got_per_level = {j: sum(1 for s in basis if s.j == j) for j in CFG.levels}
    for j in (-1, 0, 1):
        assert got_per_level[j] == full_per_level[j]
    assert 0 < got_per_level[2] < full_per_level[2]


def test_paper_style_sparse_ratio():
    cfg = FrameConfig(j_max=3, domain=((-5.0, 5.0), (-5.0, 5.0)), apron=3.0)
    regions = {
        1: [((-2.6, 2.6), (-2.2, 2.2))],
        2: [((-2.6, 2.6), (-2.2, 2.2))],
        3: [((0.9, 2.3), (0.3, 1.7))],
    }
    sparse = select_sparse_basis(cfg, regions)
    assert len(sparse) / len(full_basis(cfg)) < 0.10


# --- error metrics ------------------------------------------------------------------


def make_signal(values):
    return SampledSignal2D((0.0, 0.0), 1.0, np.asarray(values, dtype=float))


def test_error_metrics_identity_and_scaling():
    ref = make_signal([[1.0, 2.0], [3.0, 4.0]])
    same = error_metrics(make_signal([[1.0, 2.0], [3.0, 4.0]]), ref)
    assert same == {"l1": 0.0, "l2": 0.0, "linf": 0.0}
    double = error_metrics(make_signal([[2.0, 4.0], [6.0, 8.0]]), ref)
    assert double["l1"] == pytest.approx(1.0)
    assert double["l2"] == pytest.approx(1.0)
    assert double["linf"] == pytest.approx(1.0)


def test_error_metrics_single_pixel_perturbation():
    ref = make_signal([[1.0, 2.0], [3.0, 4.0]])
    rec = make_signal([[1.0, 2.0], [3.0, 4.5]])
    out = error_metrics(rec, ref)
    assert out["l1"] == pytest.approx(0.5 / 10.0, abs=1e-15)
    assert out["l2"] == pytest.approx(0.5 / math.sqrt(30.0), abs=1e-15)
    assert out["linf"] == pytest.approx(0.5 / 4.0, abs=1e-15)


def test_error_metrics_guards():
    ref = make_signal([[1.0, 2.0]])
    with pytest.raises(ValueError):
        error_metrics(make_signal([[1.0], [2.0]]), ref)
    with pytest.raises(ValueError):
        error_metrics(make_signal([[0.0, 0.0]]), make_signal([[0.0, 0.0]]))


# --- end-to-end (reduced scale; the acceptance suite runs the full config) -----------


@pytest.fixture(scope="module")
def small_reconstruction():
    cfg = FrameConfig(j_max=2, domain=((-5.0, 5.0), (-5.0, 5.0)), apron=3.0)
    phantom = default_phantom()
    sino = simulate_sinogram(phantom, 48, 96, (-7.1, 7.1))
    result = reconstruct(cfg, sino)
    return cfg, phantom, result


def test_reconstruction_reduces_residual(small_reconstruction):
    _, _, result = small_reconstruction
    assert result.info["rank"] > 0
    # Residual stays a small fraction of the measurement norm (~230).
    assert result.info["residual"] < 8.0


def test_reconstruction_matches_phantom_coarsely(small_reconstruction):
    cfg, phantom, result = small_reconstruction
    grid = GridSpec2D((-5.0, -5.0), 10.0 / 96, (97, 97))
    rec = result.on_grid(grid)
    ref = phantom.sample(grid)
    err = error_metrics(rec, ref)
    # A j <= 2 frame cannot render the phantom's fine steps; the frame
    # representation itself sits at ~4% L2, the solve lands close to it.
    assert err["l2"] < 0.2
    assert err["linf"] < 0.35


def test_culling_zero_vs_denormal_identical():
    cfg = FrameConfig(j_max=1, domain=((-3.0, 3.0), (-3.0, 3.0)), apron=2.0)
    sino = simulate_sinogram(UNIT_DISK, 6, 24, (-4.0, 4.0))
    basis = full_basis(cfg)
    a = assemble_system(cfg, basis, sino, omega_cut=0.0)
    b = assemble_system(cfg, basis, sino, omega_cut=1e-300)
    np.testing.assert_array_equal(a.matrix, b.matrix)
