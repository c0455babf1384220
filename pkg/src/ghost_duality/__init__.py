"""Ghost interference with an entangled Gaussian pair and a which-path detector.

Closed-form Gaussian machinery lives in :mod:`ghost_duality.gaussian_core`,
the slit/detector pipeline and pattern analysis in
:mod:`ghost_duality.experiment`, an independent grid-based rebuild in
:mod:`ghost_duality.numeric_oracle` and the command-line front end in
:mod:`ghost_duality.io_cli`.
"""

from .errors import (
    ConfigError,
    DomainError,
    GhostDualityError,
    PreconditionError,
    RegimeError,
    ResolutionError,
)
from .experiment import DetectorModel, Geometry, Pattern
from .gaussian_core import BipartiteGaussianState, GaussianPacket, make_epr

__version__ = "0.1.0"

__all__ = [
    "BipartiteGaussianState",
    "ConfigError",
    "DetectorModel",
    "DomainError",
    "GaussianPacket",
    "Geometry",
    "GhostDualityError",
    "Pattern",
    "PreconditionError",
    "RegimeError",
    "ResolutionError",
    "make_epr",
]
