"""Biorthogonal cubic special spline wavelets and the EDBSW edge detector."""

from importlib import resources

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConstructionError,
    ConvergenceError,
    DimensionError,
    DomainError,
    EdbswError,
    ParameterError,
    SingularityError,
    StageError,
)
from .filterbank import FilterBank, derive_bcssw, resolve_bank, standard_bank, verify_pr  # noqa: E402
from .dwt2d import WaveletDecomposition, dwt2, idwt2  # noqa: E402
from .pipeline import PipelineConfig, ablate, edbsw_detect  # noqa: E402


def samples_dir():
    """Directory of the bundled synthetic sample images."""
    return resources.files(__name__) / "samples"


__all__ = [
    "__version__",
    "ConstructionError",
    "ConvergenceError",
    "DimensionError",
    "DomainError",
    "EdbswError",
    "ParameterError",
    "SingularityError",
    "StageError",
    "FilterBank",
    "derive_bcssw",
    "resolve_bank",
    "standard_bank",
    "verify_pr",
    "WaveletDecomposition",
    "dwt2",
    "idwt2",
    "PipelineConfig",
    "ablate",
    "edbsw_detect",
    "samples_dir",
]
