"""Edge-map quality metrics: MSE, PSNR, windowed SSIM and entropy."""

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dwt2d import as_grid
from .errors import DimensionError, ParameterError

__all__ = ["MetricsReport", "mse", "psnr", "ssim", "entropy", "evaluate"]


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr_db: float
    ssim: float
    entropy: float
    operator: str = ""
    image_id: str = ""


def _pair(a, b):
    a = as_grid(a, "a")
    b = as_grid(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def mse(a, b):
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b, peak=1.0):
    """Peak signal-to-noise ratio in dB; identical inputs give ``inf``."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(peak**2 / err)


def ssim(a, b, window=8, peak=1.0, k1=0.01, k2=0.03):
    """Mean SSIM over all ``window x window`` patches at stride 1.

    Patch statistics use population (biased) moments.
    """
    a, b = _pair(a, b)
    if min(a.shape) < window:
        raise DimensionError(f"ssim needs images of at least {window}x{window}")
    c1 = (k1 * peak) ** 2
    c2 = (k2 * peak) ** 2
    pa = sliding_window_view(a, (window, window))
    pb = sliding_window_view(b, (window, window))
    mu_a = pa.mean(axis=(-2, -1))
    mu_b = pb.mean(axis=(-2, -1))
    var_a = pa.var(axis=(-2, -1))
    var_b = pb.var(axis=(-2, -1))
    cov = (pa * pb).mean(axis=(-2, -1)) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def _plogp(p):
    return 0.0 if p <= 0.0 else -p * math.log2(p)


def entropy(edge, mode="binary"):
    """Entropy of an edge map.

    ``mode='binary'`` (default) is the binary Shannon entropy of the fraction
    of pixels with a positive value, so it lies in ``[0, 1]``.
    ``mode='histogram'`` is the Shannon entropy of a 256-bin intensity
    histogram divided by 8 bits, also in ``[0, 1]``.
    """
    e = as_grid(edge, "edge")
    if mode == "binary":
        p = float(np.mean(e > 0))
        return _plogp(p) + _plogp(1.0 - p)
    if mode == "histogram":
        counts, _ = np.histogram(np.clip(e, 0.0, 1.0), bins=256, range=(0.0, 1.0))
        probs = counts / counts.sum()
        return sum(_plogp(float(p)) for p in probs) / 8.0
    raise ParameterError(f"unknown entropy mode {mode!r}")


def evaluate(edge, reference, operator="", image_id="", entropy_mode="binary"):
    """All four metrics of ``edge`` against ``reference``."""
    return MetricsReport(
        mse=mse(edge, reference),
        psnr_db=psnr(edge, reference),
        ssim=ssim(edge, reference),
        entropy=entropy(edge, entropy_mode),
        operator=operator,
        image_id=image_id,
    )
