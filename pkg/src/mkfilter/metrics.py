"""MAE and SSIM quality scores.

SSIM uses the common defaults: 11x11 Gaussian window with sigma 1.5,
C1 = (0.01 L)^2, C2 = (0.03 L)^2, mirror boundaries. The dynamic range L
is explicit because the benchmark mixes 8-bit data (L=255) with signed
MRI slices (L=6000). Scores are computed on real-valued pixels, not on
clamped 8-bit exports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import ConfigError
from .raster import Raster

__all__ = ["ScorePair", "mae", "ssim", "score_pair"]

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


@dataclass(frozen=True)
class ScorePair:
    mae: float
    ssim: float


def _check_dims(a: Raster, b: Raster) -> None:
    if a.data.shape != b.data.shape:
        raise ConfigError(
            f"rasters differ in shape: {a.data.shape} vs {b.data.shape}")


def mae(a: Raster, b: Raster) -> float:
    """Mean absolute error."""
    _check_dims(a, b)
    return float(np.abs(a.data - b.data).mean())


def _gaussian_taps(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    taps = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def _window_mean(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    out = correlate1d(img, taps, axis=0, mode="reflect")
    return correlate1d(out, taps, axis=1, mode="reflect")


def ssim(a: Raster, b: Raster, dynamic_range: float) -> float:
    """Mean local structural similarity over the full image."""
    _check_dims(a, b)
    if dynamic_range <= 0:
        raise ConfigError(f"dynamic range must be positive, got {dynamic_range}")
    c1 = (0.01 * dynamic_range) ** 2
    c2 = (0.03 * dynamic_range) ** 2
    taps = _gaussian_taps(SSIM_WINDOW, SSIM_SIGMA)
    x = a.data
    y = b.data
    mu_x = _window_mean(x, taps)
    mu_y = _window_mean(y, taps)
    var_x = _window_mean(x * x, taps) - mu_x * mu_x
    var_y = _window_mean(y * y, taps) - mu_y * mu_y
    cov = _window_mean(x * y, taps) - mu_x * mu_y
    score = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2))
    return float(score.mean())


def score_pair(reference: Raster, candidate: Raster,
               dynamic_range: float) -> ScorePair:
    return ScorePair(mae=mae(reference, candidate),
                     ssim=ssim(reference, candidate, dynamic_range))
