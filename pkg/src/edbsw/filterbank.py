"""Two-channel filter banks: the spline-derived BCSSW bank and classical sets.

Conventions
-----------
Every low-pass sequence is normalized so that its taps sum to 2, i.e. the
frequency response ``H(w) = 1/2 sum_n h_n exp(-i n w)`` has ``H(0) = 1``.
High-pass sequences are obtained from the *opposite* low-pass by sign
alternation::

    g*_k = (-1)^k h_{1-k}      (analysis high, indices [1-N2, 1-N1])
    g_k  = (-1)^k h*_{1-k}     (synthesis high, indices [1-L2, 1-L1])

where ``h`` (indices [N1, N2]) is the synthesis low-pass and ``h*``
(indices [L1, L2]) the analysis low-pass. Decomposition correlates with
``h*`` and ``g*``; reconstruction convolves with ``h`` and ``g``.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson

from . import splinecore
from .errors import ConstructionError, ParameterError

__all__ = [
    "Filter",
    "FilterBank",
    "PRReport",
    "PeriodizedQ",
    "STANDARD_NAMES",
    "periodize_response",
    "derive_bcssw",
    "standard_bank",
    "verify_pr",
    "resolve_bank",
    "bank_to_json",
]

PR_SCREEN = 1e-2
FIT_TARGET = 1e-3
DEFAULT_DEGREE = 8
DEFAULT_TAPS = 15
DEFAULT_L = 4
SIMPSON_PANELS = 8192


@dataclass(frozen=True)
class Filter:
    """Finite real sequence ``coeffs[j]`` living at index ``start + j``."""

    coeffs: np.ndarray
    start: int

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "start", int(self.start))

    def __len__(self):
        return len(self.coeffs)

    @property
    def stop(self):
        """Last occupied index (inclusive)."""
        return self.start + len(self.coeffs) - 1

    @property
    def indices(self):
        return np.arange(self.start, self.stop + 1)

    @property
    def center(self):
        return 0.5 * (self.start + self.stop)

    def __getitem__(self, n):
        if self.start <= n <= self.stop:
            return float(self.coeffs[n - self.start])
        return 0.0

    def response(self, omega):
        """``1/2 sum_n c_n exp(-i n w)`` evaluated at ``omega``."""
        w = np.asarray(omega, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(w, self.indices))
        return 0.5 * phase @ self.coeffs

    def is_symmetric(self, tol=0.0):
        return bool(np.all(np.abs(self.coeffs - self.coeffs[::-1]) <= tol))

    def alternated(self):
        """Sign-alternated mirror ``k -> (-1)^k c_{1-k}``."""
        new_start = 1 - self.stop
        ks = np.arange(new_start, new_start + len(self))
        vals = np.array([(-1.0) ** k * self[1 - k] for k in ks])
        return Filter(vals, new_start)


@dataclass(frozen=True)
class FilterBank:
    """Biorthogonal two-channel bank (immutable once built)."""

    name: str
    analysis_low: Filter
    analysis_high: Filter
    synthesis_low: Filter
    synthesis_high: Filter
    normalization: str = "sum2"
    params: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_lows(cls, name, synthesis_low, analysis_low, **params):
        return cls(
            name=name,
            analysis_low=analysis_low,
            analysis_high=synthesis_low.alternated(),
            synthesis_low=synthesis_low,
            synthesis_high=analysis_low.alternated(),
            params=dict(params),
        )

    @property
    def max_length(self):
        return max(len(self.analysis_low), len(self.analysis_high))

    @property
    def symmetry(self):
        """``'whole'``, ``'half'`` or ``None`` depending on low-pass symmetry.

        ``'whole'``: both lows odd-length and symmetric about index 0.
        ``'half'``: both lows even-length and symmetric about index 1/2.
        """
        lows = (self.analysis_low, self.synthesis_low)
        if not all(f.is_symmetric(1e-12) for f in lows):
            return None
        if all(f.center == 0.0 for f in lows):
            return "whole"
        if all(f.center == 0.5 for f in lows):
            return "half"
        return None


@dataclass(frozen=True)
class PRReport:
    grid_size: int
    max_deviation: float
    alias_max: float
    periodization_error: float = 0.0


@dataclass(frozen=True)
class PeriodizedQ:
    """Cosine polynomial ``sum_m coeffs[m] cos(m w)`` fitted to the Q ratio."""

    coeffs: np.ndarray
    max_error: float
    status: str

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        return np.cos(np.multiply.outer(w, np.arange(len(self.coeffs)))) @ self.coeffs


def periodize_response(degree=DEFAULT_DEGREE, grid_size=4096):
    """Least-squares 2*pi periodic cosine fit of the Q ratio over ``[0, pi]``.

    The returned record has ``status == 'warning'`` when the max absolute
    fit error exceeds 1e-3.
    """
    if int(degree) != degree or degree < 0:
        raise ParameterError(f"degree must be a non-negative integer, got {degree!r}")
    w = np.linspace(0.0, np.pi, grid_size)
    target = splinecore.eval_Q(w)
    basis = np.cos(np.outer(w, np.arange(int(degree) + 1)))
    coeffs, *_ = np.linalg.lstsq(basis, target, rcond=None)
    err = float(np.max(np.abs(basis @ coeffs - target)))
    status = "ok" if err <= FIT_TARGET else "warning"
    return PeriodizedQ(coeffs, err, status)


def _cosine_coefficients(response, count):
    # h_n = (2/pi) int_0^pi H(w) cos(n w) dw for an even real response
    w = np.linspace(0.0, np.pi, SIMPSON_PANELS + 1)
    values = response(w)
    return np.array(
        [2.0 / np.pi * simpson(values * np.cos(n * w), x=w) for n in range(count)]
    )


def _symmetric_truncate(half, taps):
    # half[n] for n >= 0 -> centered odd-length sequence, then restore
    # H(0) = 1 and H(pi) = 0 with the minimum-norm correction
    k = taps // 2
    n = np.arange(-k, k + 1)
    vals = half[np.abs(n)]
    constraints = np.vstack([np.ones(taps), (-1.0) ** n])
    residual = np.array([2.0, 0.0]) - constraints @ vals
    vals = vals + constraints.T @ np.linalg.solve(constraints @ constraints.T, residual)
    # exact symmetry survives the correction since both constraint rows are even
    vals = 0.5 * (vals + vals[::-1])
    return Filter(vals, -k)


def _validate_bcssw_args(L, degree, taps):
    if int(L) != L or L < 3:
        raise ParameterError(f"L must be an integer >= 3, got {L!r}")
    if L not in splinecore.TESTED_L:
        warnings.warn(f"L={L} is untested; validated choices are {splinecore.TESTED_L}", stacklevel=3)
    if int(taps) != taps or taps < 5 or taps % 2 == 0:
        raise ParameterError(f"taps must be an odd integer >= 5, got {taps!r}")
    if int(degree) != degree or degree < 0:
        raise ParameterError(f"degree must be a non-negative integer, got {degree!r}")


def derive_bcssw(L=DEFAULT_L, degree=DEFAULT_DEGREE, taps=DEFAULT_TAPS, screen=True):
    """Build the biorthogonal cubic special spline wavelet bank.

    Parameters
    ----------
    L : int
        Total vanishing moments ``N + N*``; the primal side has ``N = 2`` so
        the dual side gets ``L - 2``.
    degree : int
        Degree of the periodizing cosine fit of the Q ratio.
    taps : int
        Odd number of taps kept for both low-pass filters.
    screen : bool
        Raise when the bank fails the biorthogonality screen. Disable only
        to study badly truncated banks.

    Returns
    -------
    (FilterBank, PRReport)

    Raises
    ------
    ConstructionError
        If the truncated bank deviates from perfect reconstruction by more
        than 1e-2 anywhere on the check grid.
    """
    _validate_bcssw_args(L, degree, taps)
    bank, report = _derive_cached(int(L), int(degree), int(taps))
    if screen and report.max_deviation > PR_SCREEN:
        raise ConstructionError(
            f"filter bank failed biorthogonality screen: max deviation "
            f"{report.max_deviation:.3e} > {PR_SCREEN:g}",
            deviation=report.max_deviation,
        )
    return bank, report


@lru_cache(maxsize=64)
def _derive_cached(L, degree, taps):
    n_star = L - splinecore.N_PRIMAL
    fit = periodize_response(degree)
    # rescale so the periodized factor equals 1 at w = 0, as the exact ratio does
    q0 = float(np.sum(fit.coeffs))
    q_tilde = PeriodizedQ(fit.coeffs / q0, fit.max_error, fit.status)

    def h_primal(w):
        return np.cos(w / 2.0) ** (2 * splinecore.N_PRIMAL) * q_tilde(w)

    def h_dual(w):
        return (
            np.cos(w / 2.0) ** (2 * n_star)
            * splinecore.eval_P(np.sin(w / 2.0) ** 2, L)
            / q_tilde(w)
        )

    count = taps // 2 + 1
    synth = _symmetric_truncate(_cosine_coefficients(h_primal, count), taps)
    anal = _symmetric_truncate(_cosine_coefficients(h_dual, count), taps)
    bank = FilterBank.from_lows(
        "bcssw", synth, anal, L=L, taps=taps, degree=degree, fit_status=fit.status
    )
    report = verify_pr(bank)
    return bank, PRReport(report.grid_size, report.max_deviation, report.alias_max, fit.max_error)


def verify_pr(bank, grid_size=4096):
    """Check ``H conj(H*) + H(w+pi) conj(H*(w+pi)) = 1`` on a uniform grid.

    ``alias_max`` is the largest cross term
    ``|H conj(G*) + H(w+pi) conj(G*(w+pi))|``.
    """
    if grid_size < 64:
        raise ParameterError(f"grid_size must be >= 64, got {grid_size}")
    w = np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)
    H = bank.synthesis_low.response
    Hs = bank.analysis_low.response
    Gs = bank.analysis_high.response
    pr = H(w) * np.conj(Hs(w)) + H(w + np.pi) * np.conj(Hs(w + np.pi))
    alias = H(w) * np.conj(Gs(w)) + H(w + np.pi) * np.conj(Gs(w + np.pi))
    return PRReport(
        grid_size=int(grid_size),
        max_deviation=float(np.max(np.abs(pr - 1.0))),
        alias_max=float(np.max(np.abs(alias))),
    )


_SQRT3 = math.sqrt(3.0)
_SQRT2 = math.sqrt(2.0)

# orthonormal tables scaled by sqrt(2) to the sum-2 convention
_ORTHOGONAL = {
    "haar": ((1.0, 1.0), 0),
    "db2": (
        ((1 + _SQRT3) / 4, (3 + _SQRT3) / 4, (3 - _SQRT3) / 4, (1 - _SQRT3) / 4),
        0,
    ),
    "coif1": (
        tuple(
            _SQRT2 * c
            for c in (
                -0.07273261951252645,
                0.3378976624574818,
                0.8525720202116004,
                0.3848648468648578,
                -0.07273261951252645,
                -0.015655728135791993,
            )
        ),
        -2,
    ),
    "sym4": (
        tuple(
            _SQRT2 * c
            for c in (
                0.0322231006040427,
                -0.012603967262037833,
                -0.09921954357684722,
                0.29785779560527736,
                0.8037387518059161,
                0.49761866763201545,
                -0.02963552764599851,
                -0.07576571478927333,
            )
        ),
        -3,
    ),
}

# reverse biorthogonal spline 3.5: short B-spline side analyzes, long side synthesizes
_RBIO35_ANALYSIS = (np.array([1.0, 3.0, 3.0, 1.0]) / 4.0, -1)
_RBIO35_SYNTHESIS = (
    np.array([-5.0, 15.0, 19.0, -97.0, -26.0, 350.0, 350.0, -26.0, -97.0, 19.0, 15.0, -5.0])
    / 256.0,
    -5,
)

STANDARD_NAMES = ("haar", "db2", "coif1", "sym4", "rbio3.5")
STANDARD_TOL = 1e-8


@lru_cache(maxsize=None)
def standard_bank(name):
    """Classical comparison bank under the sum-2 convention.

    Each bundled table is re-verified for perfect reconstruction on load.
    """
    key = str(name).lower()
    if key in _ORTHOGONAL:
        coeffs, start = _ORTHOGONAL[key]
        low = Filter(coeffs, start)
        bank = FilterBank.from_lows(key, low, low)
    elif key == "rbio3.5":
        bank = FilterBank.from_lows(
            key, Filter(*_RBIO35_SYNTHESIS), Filter(*_RBIO35_ANALYSIS)
        )
    else:
        raise LookupError(f"unknown wavelet {name!r}; choose from {STANDARD_NAMES}")
    report = verify_pr(bank)
    if report.max_deviation >= STANDARD_TOL:
        raise ConstructionError(
            f"bundled bank {key} fails PR check ({report.max_deviation:.3e})",
            deviation=report.max_deviation,
        )
    return bank


def resolve_bank(wavelet="bcssw", L=DEFAULT_L, taps=DEFAULT_TAPS, degree=DEFAULT_DEGREE):
    """Return a bank from a name; ``'bcssw'`` builds from ``L, taps, degree``."""
    if isinstance(wavelet, FilterBank):
        return wavelet
    if str(wavelet).lower() == "bcssw":
        return derive_bcssw(L=L, degree=degree, taps=taps)[0]
    return standard_bank(wavelet)


def _fmt(x):
    return format(float(x), ".17g")


def _dump(obj):
    # json with 17 significant digits for every float
    if isinstance(obj, dict):
        return "{" + ", ".join(f'"{k}": {_dump(v)}' for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def bank_to_json(bank, report=None):
    """Serialize a bank to the ``filters`` JSON document (ascending indices)."""
    if report is None:
        report = verify_pr(bank)
    doc = {
        "name": bank.name,
        "L": bank.params.get("L"),
        "taps": bank.params.get("taps", len(bank.synthesis_low)),
        "synthesis_low": list(bank.synthesis_low.coeffs),
        "analysis_low": list(bank.analysis_low.coeffs),
        "synthesis_high": list(bank.synthesis_high.coeffs),
        "analysis_high": list(bank.analysis_high.coeffs),
        "synthesis_low_start": bank.synthesis_low.start,
        "analysis_low_start": bank.analysis_low.start,
        "synthesis_high_start": bank.synthesis_high.start,
        "analysis_high_start": bank.analysis_high.start,
        "pr_max_deviation": report.max_deviation,
        "periodization_error": report.periodization_error,
    }
    return _dump(doc) + "\n"
