"""Exponential FGM-type bivariate copula and the bivariate Rayleigh model built on it."""

__version__ = "0.1.0"

from ._exceptions import (  # noqa: E402
    ConvergenceError,
    DataError,
    DomainError,
    ExpCopulaError,
    ToleranceError,
    TruncationError,
)
from .brd import BrdParams, MomentOrder  # noqa: E402
from .copula import CopulaParams, delta_star  # noqa: E402
from .dependence import DependenceReport  # noqa: E402
from .inference import FitResult, KsReport, ObservationSet  # noqa: E402
from .quadrature import QuadratureSpec  # noqa: E402
from .special import AccuracyBudget  # noqa: E402

__all__ = [
    "AccuracyBudget",
    "BrdParams",
    "ConvergenceError",
    "CopulaParams",
    "DataError",
    "DependenceReport",
    "DomainError",
    "ExpCopulaError",
    "FitResult",
    "KsReport",
    "MomentOrder",
    "ObservationSet",
    "QuadratureSpec",
    "ToleranceError",
    "TruncationError",
    "delta_star",
]
