"""One-level separable 2D wavelet transform and dyadic resampling.

Scaling is chosen so that a constant image ``c`` decomposes to ``cA == c``
with all detail subbands zero: analysis filters carry the ``1/2`` of the
sum-2 convention, synthesis filters are applied as stored.

Boundaries are handled by symmetric extension matched to the bank:
whole-sample mirroring for odd symmetric banks (BCSSW), half-sample
mirroring for even symmetric banks (haar, rbio3.5). Both make the
non-expansive transform exactly invertible. Banks without linear phase
(db2, coif1, sym4) have no such extension, so they use periodic extension.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "WaveletDecomposition",
    "as_grid",
    "upsample2",
    "downsample2",
    "dwt2",
    "idwt2",
    "boundary_mode",
]


def as_grid(img, name="image"):
    """Validate and return ``img`` as a finite 2D float array."""
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2D grid, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class WaveletDecomposition:
    """Subbands of a one-level decomposition plus the source shape.

    ``cH`` is high-pass across rows (responds to horizontal edges), ``cV``
    high-pass across columns, ``cD`` high-pass in both directions.
    """

    cA: np.ndarray
    cH: np.ndarray
    cV: np.ndarray
    cD: np.ndarray
    shape: tuple

    def __post_init__(self):
        shapes = {np.shape(b) for b in (self.cA, self.cH, self.cV, self.cD)}
        if len(shapes) != 1:
            raise DimensionError(f"subband shapes disagree: {sorted(shapes)}")
        expected = tuple((s + 1) // 2 for s in self.shape)
        if shapes.pop() != expected:
            raise DimensionError(
                f"subbands must be {expected} for a {tuple(self.shape)} image"
            )

    @property
    def details(self):
        return self.cH, self.cV, self.cD

    def replace(self, **bands):
        fields = {"cA": self.cA, "cH": self.cH, "cV": self.cV, "cD": self.cD}
        fields.update(bands)
        return WaveletDecomposition(shape=self.shape, **fields)


def upsample2(img):
    """Double both axes by bilinear interpolation on the even lattice.

    Output sample ``(2i, 2j)`` is the input sample ``(i, j)``; odd samples
    average their two (or four) lattice neighbours, clamping past the last
    row/column.
    """
    x = as_grid(img)
    return _upsample_axis(_upsample_axis(x, 0), 1)


def _upsample_axis(x, axis):
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    out = np.empty(x.shape[:-1] + (2 * n,))
    out[..., 0::2] = x
    nxt = np.concatenate([x[..., 1:], x[..., -1:]], axis=-1)
    out[..., 1::2] = 0.5 * (x + nxt)
    return np.moveaxis(out, -1, axis)


def downsample2(img):
    """Keep the even-indexed lattice in both axes."""
    x = as_grid(img)
    if min(x.shape) < 2:
        raise DimensionError(f"downsample2 needs both axes >= 2, got {x.shape}")
    return x[0::2, 0::2].copy()


def boundary_mode(bank):
    """Extension used for ``bank``: ``'whole'``, ``'half'`` or ``'periodic'``."""
    return bank.symmetry or "periodic"


def _signal_index(j, n, mode):
    # map arbitrary integer positions onto [0, n) for the extended signal
    if mode == "whole":
        period = 2 * n - 2
        j = np.mod(j, period)
        return np.where(j < n, j, period - j)
    if mode == "half":
        period = 2 * n
        j = np.mod(j, period)
        return np.where(j < n, j, period - 1 - j)
    return np.mod(j, n)


def _coefficient_index(k, m, n, mode, high):
    # index into the stored m coefficients plus a sign, for arbitrary k
    if mode == "whole":
        k = np.mod(k, n - 1)
        mirror = (n - 2 - k) if high else (n - 1 - k)
        return np.where(k < m, k, mirror), np.ones(k.shape)
    if mode == "half":
        k = np.mod(k, n)
        sign = np.where(k < m, 1.0, -1.0 if high else 1.0)
        return np.where(k < m, k, n - 1 - k), sign
    return np.mod(k, m), np.ones(k.shape)


def _analyze_last(x, filt, mode):
    n = x.shape[-1]
    k = np.arange(n // 2)
    pos = 2 * k[:, None] + filt.indices[None, :]
    idx = _signal_index(pos, n, mode)
    return 0.5 * (x[..., idx] @ filt.coeffs)


def _synthesize_last(coef, filt, n, mode, high):
    m = coef.shape[-1]
    out = np.zeros(coef.shape[:-1] + (n,))
    pos = np.arange(n)
    for j, c in zip(filt.indices, filt.coeffs):
        # y[p] += c * u[p - j], where u is the zero-stuffed coefficient sequence
        src = pos - j
        even = np.mod(src, 2) == 0
        if not np.any(even):
            continue
        idx, sign = _coefficient_index(src[even] // 2, m, n, mode, high)
        out[..., even] += c * sign * coef[..., idx]
    return out


def _analyze(x, bank, axis, mode):
    xt = np.moveaxis(x, axis, -1)
    lo = _analyze_last(xt, bank.analysis_low, mode)
    hi = _analyze_last(xt, bank.analysis_high, mode)
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _synthesize(lo, hi, bank, axis, n, mode):
    lo_t = np.moveaxis(lo, axis, -1)
    hi_t = np.moveaxis(hi, axis, -1)
    out = _synthesize_last(lo_t, bank.synthesis_low, n, mode, high=False)
    out += _synthesize_last(hi_t, bank.synthesis_high, n, mode, high=True)
    return np.moveaxis(out, -1, axis)


def _pad_even(x):
    pad = [(0, s % 2) for s in x.shape]
    if any(p[1] for p in pad):
        mode = "reflect" if min(x.shape) > 1 else "edge"
        x = np.pad(x, pad, mode=mode)
    return x


def dwt2(img, bank):
    """One-level decomposition ``img -> (cA, cH, cV, cD)``.

    Rows are filtered first, then columns. Odd dimensions are padded by one
    mirrored row/column.

    Raises
    ------
    DimensionError
        If either image axis is shorter than the longest analysis filter.
    """
    x = as_grid(img)
    if min(x.shape) < bank.max_length:
        raise DimensionError(
            f"image {x.shape} is smaller than the {bank.max_length}-tap analysis filter"
        )
    mode = boundary_mode(bank)
    xp = _pad_even(x)
    lo, hi = _analyze(xp, bank, axis=1, mode=mode)
    cA, cH = _analyze(lo, bank, axis=0, mode=mode)
    cV, cD = _analyze(hi, bank, axis=0, mode=mode)
    return WaveletDecomposition(cA, cH, cV, cD, tuple(x.shape))


def idwt2(dec, bank):
    """Inverse of :func:`dwt2`; exact for perfectly reconstructing banks."""
    mode = boundary_mode(bank)
    bands = [np.asarray(b, dtype=float) for b in (dec.cA, dec.cH, dec.cV, dec.cD)]
    if len({b.shape for b in bands}) != 1:
        raise DimensionError("subbands must share one shape")
    cA, cH, cV, cD = bands
    rows, cols = (2 * s for s in cA.shape)
    lo = _synthesize(cA, cH, bank, axis=0, n=rows, mode=mode)
    hi = _synthesize(cV, cD, bank, axis=0, n=rows, mode=mode)
    out = _synthesize(lo, hi, bank, axis=1, n=cols, mode=mode)
    h, w = dec.shape
    return out[:h, :w]
