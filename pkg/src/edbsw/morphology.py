"""Grayscale non-flat morphology on 3x3 weighted structuring elements.

Erosion and dilation follow the usual umbra definitions::

    erode(g, l)(x)  = min_{d in D} g(x + d) - l(d)
    dilate(g, l)(x) = max_{d in D} g(x - d) + l(d)

with replicate extension at the image border. The anti-noise and refinement
operators work on an 8-bit intensity scale (``[0, 255]``): inputs in
``[0, 1]`` are scaled up and results scaled back down, since weights as
large as 4 or 8 would saturate a unit range.
"""

from dataclasses import dataclass

import numpy as np

from .dwt2d import as_grid
from .errors import ConvergenceError, DimensionError, ParameterError

__all__ = [
    "StructuringElement",
    "MorphConfig",
    "FLAT3",
    "builtin_elements",
    "erode",
    "dilate",
    "opening",
    "anti_noise",
    "refine",
    "reconstruct",
    "weighted_fuse",
    "normalize_max",
]

_OFFSETS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)]


@dataclass(frozen=True)
class StructuringElement:
    """3x3 weights with a participation mask; the centre is ``(1, 1)``."""

    weights: np.ndarray
    domain: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        d = np.array(self.domain, dtype=bool)
        if w.shape != (3, 3) or d.shape != (3, 3):
            raise ParameterError("structuring elements are 3x3")
        if not d.any():
            raise ParameterError("structuring element domain is empty")
        if not np.all(np.isfinite(w)):
            raise ParameterError("structuring element weights must be finite")
        w.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "domain", d)

    def reflected(self):
        return StructuringElement(self.weights[::-1, ::-1], self.domain[::-1, ::-1], self.name + "~")

    @property
    def max_weight(self):
        return float(self.weights[self.domain].max())

    def members(self):
        for dr, dc in _OFFSETS:
            if self.domain[dr + 1, dc + 1]:
                yield dr, dc, float(self.weights[dr + 1, dc + 1])


FLAT3 = StructuringElement(np.zeros((3, 3)), np.ones((3, 3), dtype=bool), "flat3")


@dataclass(frozen=True)
class MorphConfig:
    """``mu`` scales the three anti-noise elements; ``zero_in_domain`` keeps
    zero-weight entries of the printed matrices inside the element domain."""

    mu: float = 2.0
    intensity_scale: tuple = (0.0, 255.0)
    zero_in_domain: bool = True

    def __post_init__(self):
        if not self.mu > 0:
            raise ParameterError(f"mu must be positive, got {self.mu!r}")
        lo, hi = (float(v) for v in self.intensity_scale)
        if not hi > lo:
            raise ParameterError("intensity_scale must be an increasing pair")
        object.__setattr__(self, "intensity_scale", (lo, hi))


_LAMBDA1 = np.array([[0.5, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 1.0, 0.5]])
_LAMBDA2 = np.array([[0.0, 0.5, 0.0], [0.5, 0.5, 0.5], [0.0, 0.5, 0.0]])
_LAMBDA3 = np.array([[0.5, 0.0, 0.5], [0.0, 0.5, 0.0], [0.5, 0.0, 0.5]])
_LAMBDAH = np.array([[-1.0, -1.0, -1.0], [-1.0, 8.0, -1.0], [-1.0, -1.0, -1.0]])


def builtin_elements(cfg=None):
    """The anti-noise elements ``(l1, l2, l3)`` scaled by ``mu`` and the
    Laplacian-shaped refinement element ``lh`` (unscaled)."""
    cfg = cfg or MorphConfig()
    full = np.ones((3, 3), dtype=bool)

    def dom(base):
        return full if cfg.zero_in_domain else base != 0.0

    return (
        StructuringElement(cfg.mu * _LAMBDA1, full, "lambda1"),
        StructuringElement(cfg.mu * _LAMBDA2, dom(_LAMBDA2), "lambda2"),
        StructuringElement(cfg.mu * _LAMBDA3, dom(_LAMBDA3), "lambda3"),
        StructuringElement(_LAMBDAH, full, "lambda_h"),
    )


def _shifted(padded, dr, dc, shape):
    h, w = shape
    return padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]


def _clip(out, clip):
    return out if clip is None else np.clip(out, clip[0], clip[1])


def erode(g, element, clip=(0.0, 255.0)):
    """Weighted erosion; pass ``clip=None`` to skip range clamping."""
    x = as_grid(g)
    padded = np.pad(x, 1, mode="edge")
    out = np.full(x.shape, np.inf)
    for dr, dc, w in element.members():
        np.minimum(out, _shifted(padded, dr, dc, x.shape) - w, out=out)
    return _clip(out, clip)


def dilate(g, element, clip=(0.0, 255.0)):
    """Weighted dilation; pass ``clip=None`` to skip range clamping."""
    x = as_grid(g)
    padded = np.pad(x, 1, mode="edge")
    out = np.full(x.shape, -np.inf)
    for dr, dc, w in element.members():
        np.maximum(out, _shifted(padded, -dr, -dc, x.shape) + w, out=out)
    return _clip(out, clip)


def opening(g, element, clip=(0.0, 255.0)):
    return dilate(erode(g, element, clip), element, clip)


def normalize_max(g, atol=1e-9):
    """Divide by the maximum when it exceeds ``atol``; otherwise return zeros.

    The floor keeps round-off residue (e.g. detail bands of a constant image
    under a truncated bank) from being blown up to full scale.
    """
    x = np.asarray(g, dtype=float)
    peak = x.max() if x.size else 0.0
    return x / peak if peak > atol else np.zeros_like(x)


def anti_noise(g, cfg=None):
    """Multi-structure anti-noise edge map of a ``[0, 1]`` image.

    ``m = erode(dilate(g, l1), l2)``, response ``open(m, l3) - erode(m, l3)``.
    A flat patch yields exactly the largest ``l3`` weight, so that offset is
    removed before mapping back to ``[0, 1]``.
    """
    cfg = cfg or MorphConfig()
    l1, l2, l3, _ = builtin_elements(cfg)
    lo, hi = cfg.intensity_scale
    x = lo + as_grid(g) * (hi - lo)
    clip = cfg.intensity_scale
    m = erode(dilate(x, l1, clip), l2, clip)
    raw = opening(m, l3, clip) - erode(m, l3, clip)
    return np.clip(raw - l3.max_weight, 0.0, None) / (hi - lo)


def refine(g, cfg=None):
    """Morphological gradient with the Laplacian-shaped element, in ``[0, 1]``.

    The constant offset a flat region produces is removed by shifting the
    minimum to 0 before max-normalization.
    """
    cfg = cfg or MorphConfig()
    lh = builtin_elements(cfg)[3]
    lo, hi = cfg.intensity_scale
    x = lo + as_grid(g) * (hi - lo)
    raw = dilate(x, lh, cfg.intensity_scale) - erode(x, lh, cfg.intensity_scale)
    return normalize_max(raw - raw.min())


def reconstruct(marker, mask, element=FLAT3, method="erosion", tol=1e-9, max_iter=None):
    """Iterate ``g <- min(step(g), mask)`` from ``marker`` to a fixed point.

    ``method='erosion'`` uses ``step = erode``; ``method='dilation'`` gives
    classical geodesic reconstruction by dilation (marker grows inside the
    mask). Iteration stops once the largest pointwise change is below
    ``tol``; the cap defaults to ``height * width`` sweeps.

    Raises
    ------
    ConvergenceError
        When the cap is reached first; ``residual`` holds the last change.
    """
    g = as_grid(marker, "marker")
    m = as_grid(mask, "mask")
    if g.shape != m.shape:
        raise DimensionError("marker and mask must share one shape")
    if method not in ("erosion", "dilation"):
        raise ParameterError(f"unknown reconstruction method {method!r}")
    step = erode if method == "erosion" else dilate
    cap = g.size if max_iter is None else int(max_iter)
    change = np.inf
    for _ in range(cap):
        nxt = np.minimum(step(g, element, clip=None), m)
        change = float(np.max(np.abs(nxt - g)))
        g = nxt
        if change < tol:
            return g
    raise ConvergenceError(f"reconstruction did not converge in {cap} sweeps", residual=change)


def weighted_fuse(a, b, alpha):
    """Pointwise ``alpha * a + (1 - alpha) * b``."""
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha!r}")
    a = as_grid(a)
    b = as_grid(b)
    if a.shape != b.shape:
        raise DimensionError("fusion inputs must share one shape")
    if alpha == 1.0:
        return a.copy()
    if alpha == 0.0:
        return b.copy()
    return alpha * a + (1.0 - alpha) * b
