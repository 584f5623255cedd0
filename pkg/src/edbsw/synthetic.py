"""Synthetic test scenes with exact edge ground truth."""

import numpy as np

__all__ = ["EDGE_MODES", "square", "disk", "triangle", "edge_mask", "add_gaussian_noise", "add_salt"]


def square(size=128, inset=None, low=0.0, high=1.0):
    """Bright axis-aligned square centred on a dark background."""
    inset = size // 4 if inset is None else inset
    img = np.full((size, size), low, dtype=float)
    img[inset : size - inset, inset : size - inset] = high
    return img


def disk(size=128, radius=None, low=0.0, high=1.0):
    radius = size * 0.3 if radius is None else radius
    yy, xx = np.mgrid[:size, :size]
    c = (size - 1) / 2.0
    img = np.full((size, size), low, dtype=float)
    img[(yy - c) ** 2 + (xx - c) ** 2 <= radius**2] = high
    return img


def triangle(size=128, low=0.0, high=1.0):
    """Right triangle below the anti-diagonal band, giving a 45 degree edge."""
    yy, xx = np.mgrid[:size, :size]
    img = np.full((size, size), low, dtype=float)
    m = size // 6
    img[(yy >= m) & (xx >= m) & (yy < size - m) & (xx + (size - 1 - yy) < size - m)] = high
    return img


EDGE_MODES = ("inner", "outer", "thick")


def edge_mask(img, mode="inner"):
    """Ground-truth edge pixels of a piecewise-constant scene.

    ``inner`` marks pixels brighter than at least one 4-neighbour (the
    one-pixel contour on the bright side of every step), ``outer`` the dark
    side, and ``thick`` both, giving a two-pixel band.
    """
    if mode not in EDGE_MODES:
        raise ValueError(f"mode must be one of {EDGE_MODES}, got {mode!r}")
    x = np.asarray(img, dtype=float)
    mask = np.zeros(x.shape, dtype=bool)
    dv = x[1:, :] - x[:-1, :]
    dh = x[:, 1:] - x[:, :-1]
    if mode in ("inner", "thick"):
        mask[1:, :] |= dv > 0
        mask[:-1, :] |= dv < 0
        mask[:, 1:] |= dh > 0
        mask[:, :-1] |= dh < 0
    if mode in ("outer", "thick"):
        mask[1:, :] |= dv < 0
        mask[:-1, :] |= dv > 0
        mask[:, 1:] |= dh < 0
        mask[:, :-1] |= dh > 0
    return mask.astype(float)


def add_gaussian_noise(img, sigma, seed=0, clip=True):
    rng = np.random.default_rng(seed)
    out = np.asarray(img, dtype=float) + rng.normal(0.0, sigma, np.shape(img))
    return np.clip(out, 0.0, 1.0) if clip else out


def add_salt(img, fraction, seed=0):
    """Set a random ``fraction`` of pixels to 1."""
    rng = np.random.default_rng(seed)
    out = np.array(img, dtype=float)
    out[rng.random(out.shape) < fraction] = 1.0
    return out
