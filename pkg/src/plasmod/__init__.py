"""Quasi-static plasmon resonance and photothermal heating toolkit."""

__version__ = "0.1.0"

from .drude import DrudeParams, IncidentLight, lossless_frequency_for, permittivity
from .errors import PlasmodError

__all__ = [
    "DrudeParams",
    "IncidentLight",
    "PlasmodError",
    "lossless_frequency_for",
    "permittivity",
]
