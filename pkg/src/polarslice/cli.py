"""Command line interface: experiments, CSV outputs and run manifests.

Every command writes machine-readable CSV plus a JSON manifest capturing
the resolved parameters, timings and evaluation statistics; ``rerun``
re-executes a manifest and reproduces the outputs bit-identically
(timings aside).  Exit codes: 0 success, 2 configuration error, 3
numeric self-check failure.
"""

from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import click
import numpy as np

import polarslice
from polarslice import radial_window as rw
from polarslice.frame2d import (
    CoefficientSet,
    FrameConfig,
    GridSpec2D,
    SampledSignal2D,
    analyze,
    load_coefficients,
    save_coefficients,
    synthesize,
    threshold as hard_threshold,
)
from polarslice.slice2d import (
    GridSpec1D,
    ProjectionDirection2D,
    project,
)
from polarslice.tomography import (
    Phantom,
    Ray,
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
)


class ConfigError(click.ClickException):
    exit_code = 2


class NumericCheckError(click.ClickException):
    exit_code = 3


# --- small I/O helpers -----------------------------------------------------------


def _write_grid_csv(signal: SampledSignal2D, path: Path) -> None:
    np.savetxt(path, signal.values, delimiter=",", fmt="%.17g")
    meta = {
        "origin": list(signal.origin),
        "spacing": signal.spacing,
        "shape": list(signal.values.shape),
    }
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, sort_keys=True))


def _read_grid_csv(path: Path) -> SampledSignal2D:
    meta_path = Path(str(path) + ".meta.json")
    if not meta_path.exists():
        raise ConfigError(f"missing grid metadata {meta_path}")
    meta = json.loads(meta_path.read_text())
    values = np.loadtxt(path, delimiter=",")
    return SampledSignal2D(tuple(meta["origin"]), float(meta["spacing"]), values)


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _write_manifest(out_dir: Path, command: str, params: dict, timings: dict, stats: dict, outputs: list[str]) -> Path:
    manifest = {
        "command": command,
        "params": params,
        "version": polarslice.__version__,
        "timings": timings,
        "stats": stats,
        "outputs": outputs,
    }
    path = out_dir / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1))
    return path


def _load_phantom(config: str | None) -> tuple[Phantom, dict]:
    if config is None:
        phantom = default_phantom()
        return phantom, phantom.to_json()
    try:
        data = json.loads(Path(config).read_text())
    except FileNotFoundError:
        raise ConfigError(f"phantom config not found: {config}")
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {config}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        )
    try:
        return Phantom.from_json(data), data
    except ValueError as exc:
        raise ConfigError(str(exc))


def _parse_orientations(spec: str):
    if spec in ("isotropic", "directional"):
        return spec
    try:
        return tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise ConfigError(f"bad orientation spec {spec!r}")


def _domain_grid(cfg: FrameConfig, n: int) -> GridSpec2D:
    (x0, x1), (y0, y1) = cfg.domain
    spacing = (x1 - x0) / (n - 1)
    return GridSpec2D((x0, y0), spacing, (n, n))


def _frame_grid(cfg: FrameConfig) -> GridSpec2D:
    n = int(round(cfg.box_extent)) * 2**cfg.j_max
    return GridSpec2D(cfg.box_origin, 2.0 ** (-cfg.j_max), (n, n))


def _detector_extent(cfg: FrameConfig) -> tuple[float, float]:
    half = 0.5 * math.hypot(
        cfg.domain[0][1] - cfg.domain[0][0], cfg.domain[1][1] - cfg.domain[1][0]
    )
    return (-half, half)


# --- commands ----------------------------------------------------------------------


@click.group()
def main() -> None:
    """Polar wavelet slicing experiments."""


@main.command()
@click.option("--config", type=str, default=None, help="Phantom JSON (default built-in).")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
@click.option("--size", type=int, default=512, show_default=True)
def phantom(config, out, size):
    """Sample the phantom density on a pixel grid."""
    t0 = time.perf_counter()
    phan, descr = _load_phantom(config)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = FrameConfig()
    grid = _domain_grid(cfg, size)
    sampled = phan.sample(grid)
    grid_path = out_dir / "phantom.csv"
    _write_grid_csv(sampled, grid_path)
    (out_dir / "phantom.json").write_text(json.dumps(descr, sort_keys=True, indent=1))
    _write_manifest(
        out_dir,
        "phantom",
        {"config": config, "size": size, "out": str(out_dir)},
        {"seconds": time.perf_counter() - t0},
        {"max_density": float(sampled.values.max())},
        [str(grid_path)],
    )
    click.echo(f"wrote {grid_path}")


@main.command(name="analyze")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--levels", type=int, default=3, show_default=True)
@click.option("--orientations", type=str, default="isotropic", show_default=True)
@click.option("--apron", type=float, default=3.0, show_default=True)
@click.option("--pad", type=float, default=0.0, show_default=True,
              help="Transform padding; 0 keeps the exact synthesis round trip, "
              "larger values give open-plane coefficients for slicing.")
@click.option("--out", type=click.Path(), required=True, help="Coefficient file.")
def analyze_cmd(input_path, levels, orientations, apron, pad, out):
    """Frame analysis of a sampled grid into a coefficient file."""
    t0 = time.perf_counter()
    sig = _read_grid_csv(Path(input_path))
    domain = (
        (sig.origin[0], sig.origin[0] + sig.spacing * (sig.values.shape[0] - 1)),
        (sig.origin[1], sig.origin[1] + sig.spacing * (sig.values.shape[1] - 1)),
    )
    cfg = FrameConfig(
        j_max=levels,
        domain=domain,
        orientations=_parse_orientations(orientations),
        apron=apron,
    )
    try:
        coeffs = analyze(sig, cfg, pad=pad)
    except ValueError as exc:
        raise ConfigError(str(exc))
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_coefficients(coeffs, out_path)
    _write_manifest(
        out_path.parent,
        "analyze",
        {
            "input_path": str(input_path),
            "levels": levels,
            "orientations": orientations,
            "apron": apron,
            "pad": pad,
            "out": str(out_path),
        },
        {"seconds": time.perf_counter() - t0},
        {"coefficients": coeffs.n_entries},
        [str(out_path)],
    )
    click.echo(f"wrote {out_path} ({coeffs.n_entries} coefficients)")


@main.command(name="synthesize")
@click.option("--coeffs", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def synthesize_cmd(coeffs, out):
    """Evaluate a coefficient file back onto the frame grid."""
    t0 = time.perf_counter()
    try:
        cset = load_coefficients(coeffs)
    except ValueError as exc:
        raise ConfigError(str(exc))
    signal = synthesize(cset, _frame_grid(cset.config))
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_grid_csv(signal, out_path)
    _write_manifest(
        out_path.parent,
        "synthesize",
        {"coeffs": str(coeffs), "out": str(out_path)},
        {"seconds": time.perf_counter() - t0},
        {"coefficients": cset.n_entries},
        [str(out_path)],
    )
    click.echo(f"wrote {out_path}")


@main.command(name="threshold")
@click.option("--coeffs", type=click.Path(exists=True), required=True)
@click.option("--threshold", "eps", type=float, required=True)
@click.option("--out", type=click.Path(), required=True)
def threshold_cmd(coeffs, eps, out):
    """Hard-threshold a coefficient file."""
    t0 = time.perf_counter()
    try:
        cset = load_coefficients(coeffs)
    except ValueError as exc:
        raise ConfigError(str(exc))
    if eps < 0:
        raise ConfigError("threshold must be >= 0")
    kept = hard_threshold(cset, eps)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_coefficients(kept, out_path)
    _write_manifest(
        out_path.parent,
        "threshold",
        {"coeffs": str(coeffs), "eps": eps, "out": str(out_path)},
        {"seconds": time.perf_counter() - t0},
        {"kept": kept.n_entries, "before": cset.n_entries},
        [str(out_path)],
    )
    click.echo(f"kept {kept.n_entries} of {cset.n_entries}")


def _reference_projection(phan: Phantom, theta: float, offsets: np.ndarray) -> np.ndarray:
    return np.array([line_integral(phan, Ray(theta, lam)) for lam in offsets])


@main.command(name="project")
@click.option("--coeffs", type=click.Path(exists=True), required=True)
@click.option("--theta", type=str, default="90", show_default=True, help="Degrees; comma list sweeps.")
@click.option("--samples", type=int, default=512, show_default=True)
@click.option("--extent", type=str, default=None, help="Detector interval 'a,b'.")
@click.option("--region", type=str, default=None, help="Local query interval 'a,b'.")
@click.option("--omega-cut", type=float, default=1e-8, show_default=True)
@click.option("--threshold", "eps", type=float, default=None, help="Also project a thresholded copy.")
@click.option("--config", type=str, default=None, help="Phantom JSON for a reference column.")
@click.option("--self-check", is_flag=True, default=False)
@click.option("--out", type=click.Path(), required=True)
def project_cmd(coeffs, theta, samples, extent, region, omega_cut, eps, config, self_check, out):
    """Project a coefficient file along one or more directions.

    A single angle emits detector samples (plus optional reference and
    thresholded columns); an angle list emits an error-vs-angle sweep
    (requires the phantom reference).
    """
    t0 = time.perf_counter()
    try:
        cset = load_coefficients(coeffs)
    except ValueError as exc:
        raise ConfigError(str(exc))
    try:
        angles = [math.radians(float(x)) for x in theta.split(",")]
    except ValueError:
        raise ConfigError(f"bad angle list {theta!r}")
    if extent is None:
        lo, hi = _detector_extent(cset.config)
    else:
        try:
            lo, hi = (float(x) for x in extent.split(","))
        except ValueError:
            raise ConfigError(f"bad extent {extent!r}")
    grid = GridSpec1D(lo, (hi - lo) / (samples - 1), samples)
    region_t = None
    if region is not None:
        try:
            region_t = tuple(float(x) for x in region.split(","))
        except ValueError:
            raise ConfigError(f"bad region {region!r}")
        if len(region_t) != 2:
            raise ConfigError("region needs exactly two numbers")
    phan = None
    if config is not None or len(angles) > 1:
        phan, _ = _load_phantom(config)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    stats_all = {}
    if len(angles) == 1:
        nu = ProjectionDirection2D(angles[0])
        signal, stats = project(cset, nu, grid, omega_cut=omega_cut, region=region_t)
        header = ["y", "value"]
        cols = [grid.points(), signal.values]
        if phan is not None:
            header.append("reference")
            cols.append(_reference_projection(phan, angles[0], grid.points()))
        if eps is not None:
            thin, _ = project(
                hard_threshold(cset, eps), nu, grid, omega_cut=omega_cut, region=region_t
            )
            header.append("thresholded")
            cols.append(thin.values)
        _write_csv(out_path, header, cols)
        stats_all = {
            "eval_count": stats.eval_count,
            "active_coefficients": stats.active_coefficients,
            "culled_groups": stats.culled_groups,
            "n_samples": stats.n_samples,
        }
        if self_check:
            if phan is None:
                raise ConfigError("--self-check needs --config for the reference")
            ref = _reference_projection(phan, angles[0], grid.points())
            linf = float(np.abs(signal.values - ref).max() / np.abs(ref).max())
            stats_all["self_check_linf"] = linf
            if linf > 5e-2:
                raise NumericCheckError(
                    f"projection deviates from the line-integral oracle: Linf {linf:.3e}"
                )
    else:
        rows = {"theta_deg": [], "l1": [], "l2": [], "linf": [], "eval_count": []}
        for ang in angles:
            nu = ProjectionDirection2D(ang)
            signal, stats = project(cset, nu, grid, omega_cut=omega_cut, region=region_t)
            ref = _reference_projection(phan, ang, grid.points())
            diff = signal.values - ref
            rows["theta_deg"].append(math.degrees(ang))
            rows["l1"].append(np.abs(diff).sum() / np.abs(ref).sum())
            rows["l2"].append(np.linalg.norm(diff) / np.linalg.norm(ref))
            rows["linf"].append(np.abs(diff).max() / np.abs(ref).max())
            rows["eval_count"].append(stats.eval_count)
        _write_csv(out_path, list(rows), [np.asarray(v) for v in rows.values()])
        stats_all = {"angles": len(angles)}
    _write_manifest(
        out_path.parent,
        "project",
        {
            "coeffs": str(coeffs),
            "theta": theta,
            "samples": samples,
            "extent": extent,
            "region": region,
            "omega_cut": omega_cut,
            "eps": eps,
            "config": config,
            "self_check": self_check,
            "out": str(out_path),
        },
        {"seconds": time.perf_counter() - t0},
        stats_all,
        [str(out_path)],
    )
    click.echo(f"wrote {out_path}")


@main.command(name="sweep")
@click.option("--config", type=str, default=None, help="Phantom JSON (default built-in).")
@click.option("--levels", type=int, default=3, show_default=True)
@click.option("--theta", type=float, default=90.0, show_default=True)
@click.option("--samples", type=int, default=256, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def sweep_cmd(config, levels, theta, samples, out):
    """Threshold sweep: sparsity versus projection error."""
    t0 = time.perf_counter()
    phan, _ = _load_phantom(config)
    cfg = FrameConfig(j_max=levels)
    grid2 = _frame_grid(cfg)
    sampled = phan.sample(grid2)
    coeffs = analyze(sampled, cfg, pad=64.0)
    total = coeffs.n_entries
    lo, hi = _detector_extent(cfg)
    grid = GridSpec1D(lo, (hi - lo) / (samples - 1), samples)
    ang = math.radians(theta)
    ref = _reference_projection(phan, ang, grid.points())
    eps_values = [0.0] + list(np.geomspace(1e-6, 1.0, 25))
    rows = {k: [] for k in ("eps", "nonzero", "fraction", "l1", "l2", "linf", "seconds")}
    for eps in eps_values:
        kept = hard_threshold(coeffs, eps)
        t1 = time.perf_counter()
        signal, _ = project(kept, ProjectionDirection2D(ang), grid)
        dt = time.perf_counter() - t1
        diff = signal.values - ref
        rows["eps"].append(eps)
        rows["nonzero"].append(kept.n_entries)
        rows["fraction"].append(kept.n_entries / total)
        rows["l1"].append(np.abs(diff).sum() / np.abs(ref).sum())
        rows["l2"].append(np.linalg.norm(diff) / np.linalg.norm(ref))
        rows["linf"].append(np.abs(diff).max() / np.abs(ref).max())
        rows["seconds"].append(dt)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out_path, list(rows), [np.asarray(v) for v in rows.values()])
    _write_manifest(
        out_path.parent,
        "sweep",
        {"config": config, "levels": levels, "theta": theta, "samples": samples, "out": str(out_path)},
        {"seconds": time.perf_counter() - t0},
        {"total_coefficients": total},
        [str(out_path)],
    )
    click.echo(f"wrote {out_path}")


@main.command(name="sino")
@click.option("--config", type=str, default=None, help="Phantom JSON (default built-in).")
@click.option("--orientations", type=int, default=96, show_default=True)
@click.option("--samples", type=int, default=128, show_default=True)
@click.option("--extent", type=str, default=None, help="Detector interval 'a,b'.")
@click.option("--out", type=click.Path(), required=True)
def sino_cmd(config, orientations, samples, extent, out):
    """Simulate a parallel-beam sinogram of the phantom."""
    t0 = time.perf_counter()
    phan, _ = _load_phantom(config)
    if extent is None:
        ext = _detector_extent(FrameConfig())
    else:
        try:
            ext = tuple(float(x) for x in extent.split(","))
        except ValueError:
            raise ConfigError(f"bad extent {extent!r}")
    if orientations < 1 or samples < 1:
        raise ConfigError("orientation and sample counts must be >= 1")
    sino = simulate_sinogram(phan, orientations, samples, ext)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_sinogram_csv(sino, out_path)
    _write_manifest(
        out_path.parent,
        "sino",
        {"config": config, "orientations": orientations, "samples": samples, "extent": extent, "out": str(out_path)},
        {"seconds": time.perf_counter() - t0},
        {"measurements": int(sino.values.size)},
        [str(out_path)],
    )
    click.echo(f"wrote {out_path}")


@main.command(name="reconstruct")
@click.option("--sino", "sino_path", type=str, required=True)
@click.option("--levels", type=int, default=3, show_default=True)
@click.option("--svd-cutoff", type=float, default=1e-6, show_default=True)
@click.option("--omega-cut", type=float, default=1e-8, show_default=True)
@click.option("--regions", type=str, default=None, help="JSON file of per-level region boxes.")
@click.option("--grid-size", type=int, default=128, show_default=True)
@click.option("--config", type=str, default=None, help="Phantom JSON for an error panel.")
@click.option("--self-check", is_flag=True, default=False)
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def reconstruct_cmd(sino_path, levels, svd_cutoff, omega_cut, regions, grid_size, config, self_check, out):
    """Least-squares reconstruction from a sinogram file."""
    t0 = time.perf_counter()
    if not Path(sino_path).exists():
        raise ConfigError(f"missing sinogram file: {sino_path}")
    try:
        sino = load_sinogram_csv(sino_path)
    except ValueError as exc:
        raise ConfigError(str(exc))
    cfg = FrameConfig(j_max=levels)
    if regions is None:
        basis = full_basis(cfg)
    else:
        try:
            raw = json.loads(Path(regions).read_text())
            region_map = {
                int(j): [tuple(map(tuple, box)) for box in boxes]
                for j, boxes in raw.items()
            }
        except (OSError, ValueError) as exc:
            raise ConfigError(f"bad regions file: {exc}")
        basis = select_sparse_basis(cfg, region_map)
    if not basis:
        raise ConfigError("selected basis is empty")
    result = reconstruct(cfg, sino, basis=basis, svd_cutoff=svd_cutoff, omega_cut=omega_cut)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    coeff_path = out_dir / "reconstruction.pwc"
    save_coefficients(result.coefficients, coeff_path)
    grid = _domain_grid(cfg, grid_size)
    image = result.on_grid(grid)
    grid_path = out_dir / "reconstruction.csv"
    _write_grid_csv(image, grid_path)
    outputs = [str(coeff_path), str(grid_path)]
    stats = {
        "rank": result.info["rank"],
        "rows": result.info["n_rows"],
        "columns": result.info["n_cols"],
        "matrix_entries": result.info["matrix_entries"],
        "residual": result.info["residual"],
    }
    if config is not None:
        phan, _ = _load_phantom(config)
        ref = phan.sample(grid)
        err = SampledSignal2D(grid.origin, grid.spacing, image.values - ref.values)
        err_path = out_dir / "reconstruction_error.csv"
        _write_grid_csv(err, err_path)
        outputs.append(str(err_path))
        stats["error"] = error_metrics(image, ref)
    if self_check:
        rel = result.info["residual"] / float(np.linalg.norm(sino.vector()))
        stats["self_check_relative_residual"] = rel
        if rel > 0.2:
            raise NumericCheckError(f"forward residual too large: {rel:.3e}")
    _write_manifest(
        out_dir,
        "reconstruct",
        {
            "sino_path": str(sino_path),
            "levels": levels,
            "svd_cutoff": svd_cutoff,
            "omega_cut": omega_cut,
            "regions": regions,
            "grid_size": grid_size,
            "config": config,
            "self_check": self_check,
            "out": str(out_dir),
        },
        {
            "seconds": time.perf_counter() - t0,
            "assemble_seconds": result.info["assemble_seconds"],
            "solve_seconds": result.info["solve_seconds"],
        },
        stats,
        outputs,
    )
    click.echo(f"wrote {grid_path} (rank {result.info['rank']})")


@main.command(name="bench")
@click.option("--levels", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def bench_cmd(levels, out):
    """Cost-model sweeps: evaluation counts vs region size, k and alignment."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1234)
    cfg = FrameConfig(j_max=levels)
    rows = {k: [] for k in ("sweep", "param", "region_len", "k", "omega", "seconds", "eval_count")}

    def record(sweep, param, region_len, k, omega, seconds, evals):
        rows["sweep"].append(sweep)
        rows["param"].append(param)
        rows["region_len"].append(region_len)
        rows["k"].append(k)
        rows["omega"].append(omega)
        rows["seconds"].append(seconds)
        rows["eval_count"].append(evals)

    # Region-length sweep over a plateau signal with uniform coefficients.
    plateau = _plateau_coeffs(cfg)
    for length in (2.0, 4.0, 8.0):
        n = max(int(round(128 * length / 8.0)), 16)
        grid = GridSpec1D(-length / 2.0, length / n, n)
        t1 = time.perf_counter()
        _, stats = project(
            plateau, ProjectionDirection2D(math.pi / 2), grid, region=(-length / 2, length / 2)
        )
        record("region", length, length, plateau.n_entries, 1.0, time.perf_counter() - t1, stats.eval_count)

    # k sweep: synthetic coefficient populations at one level.
    for k_count in (1000, 2000, 4000):
        cset = CoefficientSet(cfg, dim=2)
        k_idx = rng.integers(-20, 21, size=(k_count, 2))
        k_idx = np.unique(k_idx, axis=0)
        while len(k_idx) < k_count:
            extra = rng.integers(-20, 21, size=(k_count, 2))
            k_idx = np.unique(np.vstack([k_idx, extra]), axis=0)
        k_idx = k_idx[:k_count]
        cset.set_group(2, 0, k_idx, rng.normal(size=k_count))
        grid = GridSpec1D(-6.0, 12.0 / 256, 257)
        t1 = time.perf_counter()
        _, stats = project(cset, ProjectionDirection2D(0.3), grid)
        record("k", k_count, 12.0, k_count, 1.0, time.perf_counter() - t1, stats.eval_count)

    # Alignment sweep: rotating a ridge against a directional frame.
    dir_cfg = FrameConfig(j_max=2, orientations=(1, 4, 8), apron=3.0)
    grid2 = _frame_grid(dir_cfg)
    for ang_deg in (0.0, 22.5, 45.0, 67.5, 90.0):
        phi = math.radians(ang_deg)
        u = (math.cos(phi), math.sin(phi))
        sig = SampledSignal2D.from_function(
            grid2,
            lambda x, y: np.cos(3.0 * (u[0] * x + u[1] * y))
            * np.exp(-(x**2 + y**2) / 8.0),
        )
        coeffs = hard_threshold(analyze(sig, dir_cfg), 1e-3)
        grid = GridSpec1D(-6.0, 12.0 / 256, 257)
        t1 = time.perf_counter()
        _, stats = project(coeffs, ProjectionDirection2D(math.pi / 2), grid, omega_cut=0.05)
        record("omega", ang_deg, 12.0, coeffs.n_entries, math.cos(phi), time.perf_counter() - t1, stats.eval_count)

    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as fh:
        fh.write(",".join(rows) + "\n")
        for i in range(len(rows["sweep"])):
            fh.write(
                f'{rows["sweep"][i]},{rows["param"][i]},{rows["region_len"][i]},'
                f'{rows["k"][i]},{rows["omega"][i]},{rows["seconds"][i]:.6f},{rows["eval_count"][i]}\n'
            )
    _write_manifest(
        out_path.parent,
        "bench",
        {"levels": levels, "out": str(out_path)},
        {"seconds": time.perf_counter() - t0},
        {},
        [str(out_path)],
    )
    click.echo(f"wrote {out_path}")


def _plateau_coeffs(cfg: FrameConfig) -> CoefficientSet:
    from scipy.special import erf

    grid2 = _frame_grid(cfg)

    def plateau(x, y):
        gx = 0.5 * (erf((x + 4.5) / 0.7) - erf((x - 4.5) / 0.7))
        gy = 0.5 * (erf((y + 4.5) / 0.7) - erf((y - 4.5) / 0.7))
        return gx * gy

    sig = SampledSignal2D.from_function(grid2, plateau)
    return hard_threshold(analyze(sig, cfg), 1e-6)


@main.command(name="rerun")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
def rerun_cmd(manifest_path):
    """Re-execute a command from its manifest (bit-identical outputs)."""
    data = json.loads(Path(manifest_path).read_text())
    command = data.get("command")
    params = data.get("params", {})
    targets = {
        "phantom": phantom,
        "analyze": analyze_cmd,
        "synthesize": synthesize_cmd,
        "threshold": threshold_cmd,
        "project": project_cmd,
        "sweep": sweep_cmd,
        "sino": sino_cmd,
        "reconstruct": reconstruct_cmd,
        "bench": bench_cmd,
    }
    if command not in targets:
        raise ConfigError(f"manifest names unknown command {command!r}")
    ctx = click.get_current_context()
    ctx.invoke(targets[command], **{k.replace("-", "_"): v for k, v in params.items()})


if __name__ == "__main__":
    main()
