"""KP tau-functions from almost intertwining matrix triples."""

from ._core import BACKEND
from .errors import (
    AimError,
    DegenerateSpectrum,
    DimensionMismatch,
    ExpmOverflow,
    IllConditioned,
    PreconditionError,
    SingularTau,
)
from .tau import hirota_residual, soliton_sum_tau, tau, tau_hat
from .times import TimeVector
from .triples import SpectralSolitonData, Triple, make_rng, soliton_triple

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AimError",
    "DegenerateSpectrum",
    "DimensionMismatch",
    "ExpmOverflow",
    "IllConditioned",
    "PreconditionError",
    "SingularTau",
    "SpectralSolitonData",
    "TimeVector",
    "Triple",
    "hirota_residual",
    "make_rng",
    "soliton_sum_tau",
    "soliton_triple",
    "tau",
    "tau_hat",
]
