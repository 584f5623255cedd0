"""Reference detectors: Sobel, Prewitt, Canny and wavelet modulus maxima."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import dwt2d, edgecore, filterbank
from .errors import DimensionError, ParameterError
from .morphology import normalize_max

__all__ = [
    "BaselineParams",
    "OPERATORS",
    "SOBEL_X",
    "PREWITT_X",
    "gradient_components",
    "sobel",
    "prewitt",
    "canny",
    "wtmm",
    "run_baseline",
]

OPERATORS = ("sobel", "prewitt", "canny", "wtmm")

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
PREWITT_X = np.array([[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]])
_KERNELS = {"sobel": SOBEL_X, "prewitt": PREWITT_X}


@dataclass(frozen=True)
class BaselineParams:
    """Parameters shared by the reference detectors.

    ``threshold`` applies to the max-normalized magnitude; when ``None`` the
    mid-range rule ``(max + min) / 2`` is used. Canny thresholds are
    fractions of the largest suppressed gradient magnitude.
    """

    operator: str = "sobel"
    threshold: float = None
    canny_sigma: float = 1.0
    canny_low: float = 0.1
    canny_high: float = 0.2
    wtmm_bank: str = "haar"

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ParameterError(f"unknown operator {self.operator!r}")
        if self.threshold is not None and self.threshold < 0:
            raise ParameterError("threshold must be non-negative")
        if not 0 <= self.canny_low < self.canny_high:
            raise ParameterError("need 0 <= canny_low < canny_high")
        if not self.canny_sigma > 0:
            raise ParameterError("canny_sigma must be positive")


def gradient_components(img, operator="sobel"):
    """Raw ``(gx, gy)`` responses of the 3x3 kernel pair, replicate border.

    ``gx`` differentiates along columns; ``gy`` uses the transposed kernel.
    """
    x = dwt2d.as_grid(img)
    if min(x.shape) < 3:
        raise DimensionError(f"{operator} needs at least 3x3, got {x.shape}")
    k = _KERNELS[operator]
    # correlate keeps the kernel orientation as written
    gx = ndimage.correlate(x, k, mode="nearest")
    gy = ndimage.correlate(x, k.T, mode="nearest")
    return gx, gy


def _kernel_edges(img, operator, threshold):
    gx, gy = gradient_components(img, operator)
    mag = normalize_max(np.hypot(gx, gy))
    if threshold is None:
        return edgecore.adaptive_threshold(mag)
    return np.where(mag > threshold, mag, 0.0)


def sobel(img, threshold=None):
    """Thresholded, max-normalized Sobel magnitude in ``[0, 1]``."""
    return _kernel_edges(img, "sobel", threshold)


def prewitt(img, threshold=None):
    """Thresholded, max-normalized Prewitt magnitude in ``[0, 1]``."""
    return _kernel_edges(img, "prewitt", threshold)


def _canny_nms(mag, angle):
    # >= on the trailing neighbour, > on the leading one: one pixel of a tied
    # pair survives, so a symmetric ridge yields a one-pixel line
    cls = edgecore.direction_class(angle)
    out = np.zeros_like(mag)
    h, w = mag.shape
    centre = mag[1:-1, 1:-1]
    c_cls = cls[1:-1, 1:-1]
    keep = np.zeros(centre.shape, dtype=bool)
    for c, (dr, dc) in edgecore._NEIGHBOUR.items():
        ahead = mag[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]
        behind = mag[1 - dr : h - 1 - dr, 1 - dc : w - 1 - dc]
        keep |= (c_cls == c) & (centre > ahead) & (centre >= behind)
    out[1:-1, 1:-1] = np.where(keep & (centre > 0), centre, 0.0)
    return out


def canny(img, params=None):
    """Canny detector returning a binary ``{0, 1}`` edge map.

    Gaussian smoothing (radius ``ceil(3 sigma)``), Sobel gradient,
    four-direction suppression and hysteresis over 8-connected components.
    """
    params = params or BaselineParams(operator="canny")
    if not 0 <= params.canny_low < params.canny_high:
        raise ParameterError("need 0 <= canny_low < canny_high")
    x = dwt2d.as_grid(img)
    if min(x.shape) < 7:
        raise DimensionError(f"canny needs at least 7x7, got {x.shape}")
    radius = int(math.ceil(3 * params.canny_sigma))
    smooth = ndimage.gaussian_filter(x, params.canny_sigma, mode="nearest", radius=radius)
    gx, gy = gradient_components(smooth, "sobel")
    mag = np.hypot(gx, gy)
    thin = _canny_nms(mag, edgecore.direction(gy, gx))
    peak = thin.max()
    if peak <= 1e-12:
        return np.zeros_like(x)
    weak = thin > params.canny_low * peak
    strong = thin > params.canny_high * peak
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return np.zeros_like(x)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels].astype(float)


def wtmm(img, params=None, bank=None):
    """One-level wavelet modulus maxima with the mid-range threshold.

    The detail-band maxima are brought back to the input size by
    nearest-neighbour repetition and max-normalized.
    """
    params = params or BaselineParams(operator="wtmm")
    x = dwt2d.as_grid(img)
    bank = bank or filterbank.resolve_bank(params.wtmm_bank)
    dec = dwt2d.dwt2(x, bank)
    modulus, angle = edgecore.modulus_highfreq(*dec.details)
    edges = edgecore.adaptive_threshold(edgecore.nms(modulus, angle))
    up = np.repeat(np.repeat(edges, 2, axis=0), 2, axis=1)[: x.shape[0], : x.shape[1]]
    return normalize_max(up)


def run_baseline(name, img, params=None, bank=None):
    """Dispatch by operator name."""
    if name == "sobel":
        return sobel(img, params.threshold if params else None)
    if name == "prewitt":
        return prewitt(img, params.threshold if params else None)
    if name == "canny":
        return canny(img, params)
    if name == "wtmm":
        return wtmm(img, params, bank=bank)
    raise ParameterError(f"unknown operator {name!r}")
