"""Drude dispersion for metal permittivity, and its lossless inversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import NoRealFrequency


@dataclass(frozen=True)
class DrudeParams:
    """
    Parameters of eps(w) = eps0 * (1 - omega_p**2 / (w * (w + i*tau))).

    Attributes
    ----------
    eps0 : float
        Permittivity of the surrounding matrix (sets the overall scale).
    omega_p : float
        Bulk plasma frequency, rad/s.
    tau : float
        Loss width, rad/s. Zero gives the lossless model.
    """

    eps0: float
    omega_p: float
    tau: float = 0.0

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError(f"eps0 must be positive, got {self.eps0}")
        if not self.omega_p > 0:
            raise ValueError(f"omega_p must be positive, got {self.omega_p}")
        if not self.tau >= 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")

    def with_tau(self, tau: float) -> "DrudeParams":
        return replace(self, tau=tau)


@dataclass(frozen=True)
class IncidentLight:
    """Monochromatic illumination: angular frequency and propagation speed."""

    omega: float
    speed: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.speed > 0:
            raise ValueError(f"speed must be positive, got {self.speed}")

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi * self.speed / self.omega

    @classmethod
    def from_wavelength(cls, wavelength: float, speed: float) -> "IncidentLight":
        return cls(omega=2.0 * math.pi * speed / wavelength, speed=speed)


def permittivity(p: DrudeParams, omega: float) -> complex:
    """Drude permittivity at angular frequency ``omega`` (rationalized form).

    The imaginary part is non-negative for every ``omega > 0``.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    denom = omega * omega + p.tau * p.tau
    wp2 = p.omega_p * p.omega_p
    re = p.eps0 * (1.0 - wp2 / denom)
    im = p.eps0 * wp2 * p.tau / (omega * denom)
    return complex(re, im)


def lossless_frequency_for(p: DrudeParams, eps_target: float) -> float:
    """Positive frequency at which the lossless model equals ``eps_target``.

    Raises NoRealFrequency when ``eps_target >= eps0``: the lossless Drude
    permittivity approaches ``eps0`` from below and never reaches it.
    """
    if not eps_target < p.eps0:
        raise NoRealFrequency(
            f"target permittivity {eps_target} is not below eps0={p.eps0}"
        )
    return p.omega_p / math.sqrt(1.0 - eps_target / p.eps0)
