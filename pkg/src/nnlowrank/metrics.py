"""Approximation-quality measures: relative errors, R^2, band-wise SSIM.

SSIM follows the canonical single-scale convention: 11x11 Gaussian window
with standard deviation 1.5, stability constants C1 = (0.01 L)^2 and
C2 = (0.03 L)^2 for dynamic range L (default 1, matching data rescaled to
[0, 1]), population window statistics, and symmetric boundary padding. For
3-D cubes the last axis is treated as the spectral-band axis and per-band
SSIM values are averaged.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Optional, Tuple

import numpy as np
import scipy.ndimage

from ._validation import as_tensor
from .tensor_ops import NegativityStats, negativity_stats

__all__ = [
    "QualityReport",
    "relative_errors",
    "r_squared",
    "ssim_image",
    "ssim_bandwise_mean",
    "quality_report",
]


@dataclass(frozen=True)
class QualityReport:
    """Bundle of final-approximant quality measures.

    ``ssim_bandwise_mean`` is populated for 3-D inputs only. ``negativity``
    holds the absolute negative-part statistics of the approximant; the
    relative values used in convergence traces are these divided by the
    reference tensor's norms.
    """

    rel_err_frobenius: float
    rel_err_chebyshev: float
    r_squared: float
    negativity: NegativityStats
    ssim_bandwise_mean: Optional[float] = None

    def __post_init__(self):
        if self.rel_err_frobenius < 0 or self.rel_err_chebyshev < 0:
            raise ValueError("relative errors must be nonnegative")
        if self.r_squared > 1.0:
            raise ValueError("r_squared cannot exceed 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["negativity"] = asdict(self.negativity)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QualityReport":
        neg = NegativityStats(**d["negativity"])
        return cls(rel_err_frobenius=d["rel_err_frobenius"],
                   rel_err_chebyshev=d["rel_err_chebyshev"],
                   r_squared=d["r_squared"],
                   negativity=neg,
                   ssim_bandwise_mean=d.get("ssim_bandwise_mean"))


def relative_errors(X, Y) -> Tuple[float, float]:
    """Relative Frobenius and Chebyshev errors ||X - Y|| / ||X||."""
    X = as_tensor(X)
    Y = as_tensor(Y, name="Y")
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    nf = float(np.linalg.norm(X.ravel()))
    nc = float(np.abs(X).max())
    if nf == 0.0 or nc == 0.0:
        raise ValueError("reference tensor has zero norm")
    diff = X - Y
    return (float(np.linalg.norm(diff.ravel())) / nf, float(np.abs(diff).max()) / nc)


def r_squared(X, Y) -> float:
    """Coefficient of determination 1 - ||X - Y||_F^2 / ||X - mean(X)||_F^2."""
    X = as_tensor(X)
    Y = as_tensor(Y, name="Y")
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    centered = X - X.mean()
    denom = float(np.dot(centered.ravel(), centered.ravel()))
    if denom == 0.0:
        raise ValueError("r_squared is undefined for a constant reference tensor")
    diff = (X - Y).ravel()
    return 1.0 - float(np.dot(diff, diff)) / denom


# SSIM window: 11x11 Gaussian, sigma 1.5. gaussian_filter with truncate=3.5
# gives radius int(3.5 * 1.5 + 0.5) = 5, i.e. exactly an 11-tap kernel.
_SSIM_SIGMA = 1.5
_SSIM_TRUNCATE = 3.5


def _window_mean(img: np.ndarray) -> np.ndarray:
    # 'reflect' is symmetric padding (edge value repeated)
    return scipy.ndimage.gaussian_filter(img, sigma=_SSIM_SIGMA,
                                         truncate=_SSIM_TRUNCATE, mode="reflect")


def ssim_image(X, Y, data_range: float = 1.0, full: bool = False):
    """Single-scale SSIM between two 2-D images.

    Returns the mean over the full SSIM map (boundary windows use symmetric
    padding); with ``full=True`` also returns the map itself.
    """
    X = as_tensor(X, min_ndim=2)
    Y = as_tensor(Y, name="Y", min_ndim=2)
    if X.ndim != 2 or Y.shape != X.shape:
        raise ValueError("ssim_image expects two equal-shape 2-D images")
    if not data_range > 0:
        raise ValueError("data_range must be positive")
    C1 = (0.01 * data_range) ** 2
    C2 = (0.03 * data_range) ** 2
    mu_x = _window_mean(X)
    mu_y = _window_mean(Y)
    # population (uniformly weighted) window statistics
    var_x = _window_mean(X * X) - mu_x * mu_x
    var_y = _window_mean(Y * Y) - mu_y * mu_y
    cov = _window_mean(X * Y) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + C1) * (2.0 * cov + C2)
    den = (mu_x * mu_x + mu_y * mu_y + C1) * (var_x + var_y + C2)
    smap = num / den
    mean = float(smap.mean())
    return (mean, smap) if full else mean


def ssim_bandwise_mean(X, Y, data_range: float = 1.0) -> float:
    """Mean of per-band SSIM over the last axis of two 3-D cubes."""
    X = as_tensor(X, min_ndim=3)
    Y = as_tensor(Y, name="Y", min_ndim=3)
    if X.ndim != 3:
        raise ValueError(f"expected a 3-D cube, got order {X.ndim}")
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    vals = [ssim_image(X[:, :, b], Y[:, :, b], data_range=data_range)
            for b in range(X.shape[2])]
    return float(np.mean(vals))


def quality_report(X, Y, data_range: float = 1.0) -> QualityReport:
    """Assemble the full quality report of approximant Y against reference X."""
    X = as_tensor(X)
    Y = as_tensor(Y, name="Y")
    rf, rc = relative_errors(X, Y)
    ssim = ssim_bandwise_mean(X, Y, data_range=data_range) if X.ndim == 3 else None
    return QualityReport(
        rel_err_frobenius=rf,
        rel_err_chebyshev=rc,
        r_squared=r_squared(X, Y),
        negativity=negativity_stats(Y),
        ssim_bandwise_mean=ssim,
    )
