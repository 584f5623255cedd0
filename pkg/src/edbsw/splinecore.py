"""Cubic special spline and the frequency responses derived from it.

The special spline is a five-term combination of shifted cubic B-splines,

    S(t) = 451/3 b(t) - 256/3 [b(t - 1/16) + b(t + 1/16)]
                      + 32/3 [b(t - 1/8) + b(t + 1/8)],

whose Fourier transform is

    S^(w) = (451/3 - 512/3 cos(w/16) + 64/3 cos(w/8)) sinc(w/2)^4.

The weight on the 1/8 shifts is 32/3: that is the value for which the
time-domain combination and its transform agree, the spline integrates to
one, and ``S(k) = delta_k`` on the integers (so it interpolates samples).

All functions accept scalars or arrays and return the same kind.
"""

import warnings
from math import comb

import numpy as np

from .errors import DomainError, ParameterError, SingularityError

__all__ = [
    "SPLINE_SUPPORT",
    "TESTED_L",
    "N_PRIMAL",
    "eval_bspline3",
    "eval_special_spline",
    "eval_spline_ft",
    "eval_P",
    "eval_Q",
    "eval_H",
    "eval_Hstar",
]

SPLINE_SUPPORT = 2.0 + 1.0 / 8.0
# vanishing-moment order of the primal low-pass, fixed by the cos^4 factor
N_PRIMAL = 2
TESTED_L = (4, 5, 6, 7)

_CENTER_WEIGHT = 451.0 / 3.0
_SHIFT16_WEIGHT = -256.0 / 3.0
_SHIFT8_WEIGHT = 32.0 / 3.0
_SINGULAR_TOL = 1e-9


def _as_finite(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _like(arr, template):
    return float(arr) if np.ndim(template) == 0 else arr


def eval_bspline3(t):
    """Centered cubic B-spline from its truncated-power expansion.

    Evaluates ``sum_i (-1)^i / 3! * C(4, i) * (t + 2 - i)_+^3``. Points with
    ``|t| >= 2`` return exactly 0.
    """
    t_arr = _as_finite(t, "t")
    out = np.zeros_like(t_arr)
    inside = np.abs(t_arr) < 2.0
    ti = t_arr[inside]
    acc = np.zeros_like(ti)
    for i in range(5):
        shifted = ti + 2.0 - i
        # unit step is 1 at 0, but 0**3 contributes nothing there anyway
        acc += (-1) ** i / 6.0 * comb(4, i) * np.where(shifted >= 0.0, shifted**3, 0.0)
    out[inside] = acc
    return _like(out, t)


def eval_special_spline(t):
    """The cubic special spline S(t); zero outside ``[-2 - 1/8, 2 + 1/8]``."""
    t_arr = _as_finite(t, "t")
    out = _CENTER_WEIGHT * eval_bspline3(t_arr)
    for shift, weight in ((1.0 / 16.0, _SHIFT16_WEIGHT), (1.0 / 8.0, _SHIFT8_WEIGHT)):
        out = out + weight * (eval_bspline3(t_arr - shift) + eval_bspline3(t_arr + shift))
    out = np.where(np.abs(t_arr) >= SPLINE_SUPPORT, 0.0, out)
    return _like(out, t)


def _sinc(x):
    # sin(x)/x with a Taylor branch near zero
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x**2 / 6.0 + x**4 / 120.0, np.sin(safe) / safe)


def eval_spline_ft(omega):
    """Fourier transform of the special spline (real, even)."""
    w = _as_finite(omega, "omega")
    trig = (451.0 - 512.0 * np.cos(w / 16.0) + 64.0 * np.cos(w / 8.0)) / 3.0
    return _like(trig * _sinc(w / 2.0) ** 4, omega)


def eval_P(y, L):
    """Bezout polynomial ``sum_{n<L} C(L-1+n, n) y^n``."""
    if int(L) != L or L < 1:
        raise DomainError(f"L must be a positive integer, got {L!r}")
    L = int(L)
    y_arr = np.asarray(y, dtype=float)
    acc = np.zeros_like(y_arr)
    # Horner from the top coefficient
    for n in range(L - 1, -1, -1):
        acc = acc * y_arr + comb(L - 1 + n, n)
    return _like(acc, y)


def _q_denominator(w):
    return 451.0 - 512.0 * np.cos(w / 16.0) + 64.0 * np.cos(w / 8.0)


def eval_Q(omega):
    """Ratio factor of the primal low-pass, ``H(w) / cos^4(w/2)``.

    Contains ``cos(w/16)``, so it is 32*pi periodic rather than 2*pi.
    """
    w = _as_finite(omega, "omega")
    den = _q_denominator(w)
    bad = np.abs(den) < _SINGULAR_TOL
    if np.any(bad):
        at = float(np.atleast_1d(w)[np.argmax(np.atleast_1d(bad))])
        raise SingularityError(f"Q denominator vanishes at omega={at!r}", omega=at)
    num = 451.0 - 512.0 * np.cos(w / 8.0) + 64.0 * np.cos(w / 4.0)
    return _like(num / den, omega)


def eval_H(omega):
    """Primal low-pass response ``S^(2w) / S^(w)`` in closed form."""
    w = _as_finite(omega, "omega")
    return _like(np.cos(w / 2.0) ** 4 * eval_Q(w), omega)


def _check_n_star(n_star):
    if int(n_star) != n_star or n_star < 1:
        raise ParameterError(f"N_star must be a positive integer, got {n_star!r}")
    L = N_PRIMAL + int(n_star)
    if L not in TESTED_L:
        warnings.warn(f"L={L} is untested; validated choices are {TESTED_L}", stacklevel=3)
    return int(n_star), L


def eval_Hstar(omega, n_star):
    """Dual low-pass response with ``n_star`` vanishing moments.

    ``cos(w/2)^(2 n_star) * P(sin^2(w/2)) / Q(w)`` with ``L = 2 + n_star``.
    """
    n_star, L = _check_n_star(n_star)
    w = _as_finite(omega, "omega")
    out = np.cos(w / 2.0) ** (2 * n_star) * eval_P(np.sin(w / 2.0) ** 2, L) / eval_Q(w)
    return _like(out, omega)
