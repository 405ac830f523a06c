"""scikit-learn style front ends for the frame transform and tomography.

These wrap the functional core behind the familiar estimator protocol
(constructor parameters, ``fit``/``transform``/``predict``, ``get_params``)
so pipelines and model-selection tooling can drive them.  The heavy
lifting stays in :mod:`polarslice.frame2d` and
:mod:`polarslice.tomography`.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array

from polarslice.frame2d import (
    CoefficientSet,
    FrameConfig,
    GridSpec2D,
    SampledSignal2D,
    analyze,
    synthesize,
    threshold,
)
from polarslice.tomography import (
    Sinogram,
    full_basis,
    reconstruct,
    select_sparse_basis,
)


def _square_grid(domain, shape) -> GridSpec2D:
    spacings = [
        (hi - lo) / (n - 1) for (lo, hi), n in zip(domain, shape)
    ]
    if abs(spacings[0] - spacings[1]) > 1e-12:
        raise ValueError("grid must have equal spacing on both axes")
    return GridSpec2D((domain[0][0], domain[1][0]), spacings[0], tuple(shape))


class PolarWaveletTransform2D(TransformerMixin, BaseEstimator):
    """Tight-frame analysis/synthesis as a transformer.

    Parameters
    ----------
    levels : int
        Finest dyadic level of the frame.
    domain : pair of (lo, hi) pairs
        Box the input image covers (inclusive endpoints).
    orientations : "isotropic", "directional" or tuple of counts
        Angular resolution per level.
    apron : float
        Padding of the frame box around the domain.
    pad : float
        Extra transform padding; keeps coefficients close to open-plane
        inner products (see :func:`polarslice.frame2d.analyze`).
    threshold : float
        Hard threshold applied to the coefficients in ``transform``.
    """

    def __init__(
        self,
        levels: int = 3,
        domain=((-5.0, 5.0), (-5.0, 5.0)),
        orientations="isotropic",
        apron: float = 3.0,
        pad: float = 0.0,
        threshold: float = 0.0,
    ):
        self.levels = levels
        self.domain = domain
        self.orientations = orientations
        self.apron = apron
        self.pad = pad
        self.threshold = threshold

    def _config(self) -> FrameConfig:
        orient = self.orientations
        if isinstance(orient, (list, tuple)) and not isinstance(orient, str):
            orient = tuple(int(x) for x in orient)
        return FrameConfig(
            j_max=self.levels,
            domain=tuple(tuple(float(v) for v in b) for b in self.domain),
            orientations=orient,
            apron=float(self.apron),
        )

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=True)
        self.config_ = self._config()
        self.grid_ = _square_grid(self.config_.domain, X.shape)
        # Fail early if the grid cannot resolve the frame's top level.
        spacing = self.grid_.spacing
        if spacing > 2.0 ** (-self.levels) * (1 + 1e-9):
            raise ValueError(
                f"grid spacing {spacing} does not resolve level {self.levels}"
            )
        return self

    def transform(self, X) -> CoefficientSet:
        if not hasattr(self, "config_"):
            self.fit(X)
        X = check_array(X, ensure_2d=True)
        if tuple(X.shape) != tuple(self.grid_.shape):
            raise ValueError("shape differs from the fitted grid")
        sig = SampledSignal2D(self.grid_.origin, self.grid_.spacing, X)
        coeffs = analyze(sig, self.config_, pad=self.pad)
        if self.threshold > 0:
            coeffs = threshold(coeffs, self.threshold)
        return coeffs

    def inverse_transform(self, coeffs: CoefficientSet) -> np.ndarray:
        if not hasattr(self, "grid_"):
            raise ValueError("estimator is not fitted")
        return synthesize(coeffs, self.grid_).values

    def score(self, X, y=None) -> float:
        """Negative relative round-trip error (0 is perfect)."""
        rec = self.inverse_transform(self.transform(X))
        X = check_array(X, ensure_2d=True)
        return -float(np.linalg.norm(rec - X) / np.linalg.norm(X))


class TomographicReconstructor(BaseEstimator):
    """Least-squares tomographic reconstruction in the wavelet basis.

    ``fit`` takes a sinogram (a :class:`Sinogram` or the value matrix with
    ``angles``/``offsets`` given separately), solves the truncated-SVD
    least squares problem and stores the frame coefficients;
    ``predict`` evaluates the density on a pixel grid.
    """

    def __init__(
        self,
        levels: int = 3,
        domain=((-5.0, 5.0), (-5.0, 5.0)),
        svd_cutoff: float = 1e-6,
        omega_cut: float = 1e-8,
        regions=None,
    ):
        self.levels = levels
        self.domain = domain
        self.svd_cutoff = svd_cutoff
        self.omega_cut = omega_cut
        self.regions = regions

    def _config(self) -> FrameConfig:
        return FrameConfig(
            j_max=self.levels,
            domain=tuple(tuple(float(v) for v in b) for b in self.domain),
            orientations="isotropic",
        )

    def fit(self, X, y=None, angles=None, offsets=None):
        if isinstance(X, Sinogram):
            sino = X
        else:
            X = check_array(X, ensure_2d=True)
            if angles is None or offsets is None:
                raise ValueError("angles and offsets are required with a raw matrix")
            sino = Sinogram(np.asarray(angles), np.asarray(offsets), X)
        cfg = self._config()
        if self.regions is None:
            basis = full_basis(cfg)
        else:
            regions = {
                int(j): [tuple(map(tuple, box)) for box in boxes]
                for j, boxes in self.regions.items()
            }
            basis = select_sparse_basis(cfg, regions)
        result = reconstruct(
            cfg,
            sino,
            basis=basis,
            svd_cutoff=self.svd_cutoff,
            omega_cut=self.omega_cut,
        )
        self.config_ = cfg
        self.coefficients_ = result.coefficients
        self.solution_ = result.solution
        self.basis_ = result.basis
        self.rank_ = result.info["rank"]
        self.info_ = result.info
        return self

    def predict(self, shape=(128, 128)) -> np.ndarray:
        if not hasattr(self, "coefficients_"):
            raise ValueError("estimator is not fitted")
        grid = _square_grid(self.config_.domain, tuple(shape))
        from polarslice.tomography import evaluate_frame_sum

        return evaluate_frame_sum(self.config_, self.coefficients_, grid).values
