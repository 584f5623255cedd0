"""Gradients, modulus maxima, adaptive thresholding and window selection."""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dwt2d import as_grid
from .errors import DimensionError, ParameterError

__all__ = [
    "GradientField",
    "SelectorParams",
    "SelectionResult",
    "gradient",
    "direction",
    "modulus_highfreq",
    "nms",
    "direction_class",
    "adaptive_threshold",
    "uncertainty_select",
]

# direction classes for NMS; offsets are (drow, dcol) of one neighbour,
# the other neighbour is the negation
AXIS_X, DIAG_PI4, AXIS_Y, DIAG_3PI4 = 0, 1, 2, 3
_NEIGHBOUR = {
    AXIS_X: (0, 1),
    DIAG_PI4: (1, 1),
    AXIS_Y: (1, 0),
    DIAG_3PI4: (-1, 1),
}


@dataclass(frozen=True)
class GradientField:
    Cx: np.ndarray
    Cy: np.ndarray
    modulus: np.ndarray
    angle: np.ndarray


def direction(num, den):
    """``arctan(num / den)`` folded into ``(-pi/2, pi/2]``.

    ``den == 0`` maps to ``pi/2`` when ``num != 0`` and to 0 when both vanish.
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    safe = np.where(den == 0.0, 1.0, den)
    ang = np.arctan(num / safe)
    ang = np.where(den == 0.0, np.where(num == 0.0, 0.0, np.pi / 2), ang)
    return ang


def gradient(img):
    """Central-difference gradient (one-sided on the border).

    ``Cx`` differentiates along columns, ``Cy`` along rows.
    """
    x = as_grid(img)
    if min(x.shape) < 3:
        raise DimensionError(f"gradient needs at least 3x3, got {x.shape}")
    Cy, Cx = np.gradient(x)
    return GradientField(Cx, Cy, np.hypot(Cx, Cy), direction(Cy, Cx))


def modulus_highfreq(cH, cV, cD):
    """Joint modulus of the detail subbands and their direction ``arctan(cH/cV)``."""
    cH, cV, cD = (as_grid(b, "subband") for b in (cH, cV, cD))
    if not cH.shape == cV.shape == cD.shape:
        raise DimensionError("detail subbands must share one shape")
    modulus = np.sqrt(cH**2 + cV**2 + cD**2)
    return modulus, direction(cH, cV)


def direction_class(angle):
    """Quantize angles in ``(-pi/2, pi/2]`` to the four NMS neighbour classes."""
    a = np.asarray(angle, dtype=float)
    cls = np.full(a.shape, AXIS_Y, dtype=np.int8)
    cls[np.abs(a) < np.pi / 8] = AXIS_X
    cls[(a >= np.pi / 8) & (a < 3 * np.pi / 8)] = DIAG_PI4
    cls[(a > -3 * np.pi / 8) & (a <= -np.pi / 8)] = DIAG_3PI4
    return cls


def nms(modulus, angle):
    """Keep pixels strictly larger than both neighbours along the gradient.

    Border pixels are always suppressed.
    """
    m = as_grid(modulus, "modulus")
    a = np.asarray(angle, dtype=float)
    if a.shape != m.shape:
        raise DimensionError("modulus and angle must share one shape")
    out = np.zeros_like(m)
    if min(m.shape) < 3:
        return out
    cls = direction_class(a)[1:-1, 1:-1]
    centre = m[1:-1, 1:-1]
    h, w = m.shape
    keep = np.zeros(centre.shape, dtype=bool)
    for c, (dr, dc) in _NEIGHBOUR.items():
        ahead = m[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]
        behind = m[1 - dr : h - 1 - dr, 1 - dc : w - 1 - dc]
        keep |= (cls == c) & (centre > ahead) & (centre > behind)
    out[1:-1, 1:-1] = np.where(keep, centre, 0.0)
    return out


def adaptive_threshold(modulus):
    """Zero every value not strictly above ``(max + min) / 2``."""
    m = as_grid(modulus, "modulus")
    t = 0.5 * (m.max() + m.min())
    return np.where(m > t, m, 0.0)


@dataclass(frozen=True)
class SelectorParams:
    """Window-selection settings.

    ``T`` is the deviation tolerance. ``mean_gate`` bounds the window mean of
    the approximation band (open interval); ``(0, T)`` is the strict reading,
    the default ``(0, 1)`` only excludes saturated windows. ``coverage`` is
    the fraction of approximation samples that must lie within two standard
    deviations of the mean for a window to count as normally distributed.
    """

    T: float = 0.05
    window: tuple = (7, 7)
    stride: tuple = None
    mean_gate: tuple = (0.0, 1.0)
    coverage: float = 0.9

    def __post_init__(self):
        if not self.T >= 0:
            raise ParameterError(f"T must be non-negative, got {self.T!r}")
        window = tuple(int(v) for v in self.window)
        if len(window) != 2 or any(v < 3 or v % 2 == 0 for v in window):
            raise ParameterError(f"window sides must be odd and >= 3, got {self.window!r}")
        object.__setattr__(self, "window", window)
        stride = self.stride
        if stride is None:
            stride = tuple(v // 2 for v in window)
        stride = tuple(int(v) for v in stride)
        if len(stride) != 2 or any(v < 1 for v in stride):
            raise ParameterError(f"stride must be positive, got {self.stride!r}")
        object.__setattr__(self, "stride", stride)
        object.__setattr__(self, "mean_gate", tuple(float(v) for v in self.mean_gate))


@dataclass(frozen=True)
class SelectionResult:
    """Selected detail maps plus per-window diagnostics (row-major window grid)."""

    CH: np.ndarray
    CV: np.ndarray
    CD: np.ndarray
    selected: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    sigma_details: np.ndarray
    mu_details: np.ndarray

    def __iter__(self):
        return iter((self.CH, self.CV, self.CD))


def _window_stats(band, wh, ww, sr, sc):
    views = sliding_window_view(band, (wh, ww))[::sr, ::sc]
    return views.mean(axis=(-2, -1)), views.std(axis=(-2, -1)), views


def uncertainty_select(dec, params=None):
    """Structural uncertainty-aware selection of detail maxima.

    A window is kept when its approximation samples look normal (coverage
    proxy), its approximation mean passes ``mean_gate``, and for every detail
    modulus ``s_*``: ``mu < s_* < mu + T`` and ``sigma - s_* < T``, where
    ``mu`` and ``sigma`` are the approximation mean and standard deviation.
    Inside kept windows the detail moduli pass through modulus-maxima
    suppression along the joint detail direction; everything else is 0.
    """
    params = params or SelectorParams()
    cA = as_grid(dec.cA, "cA")
    wh, ww = params.window
    sr, sc = params.stride
    if cA.shape[0] < wh or cA.shape[1] < ww:
        raise DimensionError(f"window {params.window} exceeds subband {cA.shape}")
    details = [np.abs(as_grid(b, "subband")) for b in dec.details]

    mu, sigma, views = _window_stats(cA, wh, ww, sr, sc)
    within = np.abs(views - mu[..., None, None]) <= 2.0 * sigma[..., None, None]
    normal = within.mean(axis=(-2, -1)) >= params.coverage
    lo, hi = params.mean_gate
    selected = normal & (mu > lo) & (mu < hi)
    sig_d, mu_d = [], []
    for band in details:
        m_d, s_d, _ = _window_stats(band, wh, ww, sr, sc)
        sig_d.append(s_d)
        mu_d.append(m_d)
        selected &= (s_d > mu) & (s_d < mu + params.T) & (sigma - s_d < params.T)

    _, angle = modulus_highfreq(*dec.details)
    outputs = []
    for band in details:
        maxima = nms(band, angle)
        out = np.zeros_like(band)
        for i, j in zip(*np.nonzero(selected)):
            r, c = i * sr, j * sc
            # window-local suppression zeroes the window rim
            sl = (slice(r + 1, r + wh - 1), slice(c + 1, c + ww - 1))
            out[sl] = np.maximum(out[sl], maxima[sl])
        outputs.append(out)
    return SelectionResult(
        *outputs,
        selected=selected,
        mu=mu,
        sigma=sigma,
        sigma_details=np.stack(sig_d),
        mu_details=np.stack(mu_d),
    )
