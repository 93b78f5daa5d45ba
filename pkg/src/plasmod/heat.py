"""
Photothermal heating of a spherical nanoparticle.

Absorbed power density inside the particle is ``Q = omega Im(eps1) |E2|^2 / (8 pi)``,
uniform over the particle because the interior field is. The steady-state
temperature rise solves ``sigma_np Lap T + Q = 0`` inside and ``Lap T = 0``
outside, giving a parabola ``A - Q r^2 / (6 sigma_np)`` inside and ``B / r``
outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeLoss


@dataclass(frozen=True)
class HeatScene:
    sigma_matrix: float
    sigma_np: float
    r_np: float
    q: float

    def __post_init__(self):
        if not self.sigma_matrix > 0:
            raise ValueError(f"sigma_matrix must be positive, got {self.sigma_matrix}")
        if not self.sigma_np > 0:
            raise ValueError(f"sigma_np must be positive, got {self.sigma_np}")
        if not self.r_np > 0:
            raise ValueError(f"r_np must be positive, got {self.r_np}")
        if not self.q >= 0:
            raise ValueError(f"heat intensity must be non-negative, got {self.q}")

    @property
    def v_np(self) -> float:
        return 4.0 * math.pi / 3.0 * self.r_np**3


@dataclass(frozen=True)
class TemperatureProfile:
    a_coeff: float
    b_coeff: float
    scene: HeatScene

    def continuity_residual(self) -> float:
        s = self.scene
        inside = self.a_coeff - s.q * s.r_np**2 / (6.0 * s.sigma_np)
        outside = self.b_coeff / s.r_np
        return abs(inside - outside) / max(abs(outside), abs(inside), np.finfo(float).tiny)

    def flux_residual(self) -> float:
        s = self.scene
        inside = s.sigma_np * (s.q * s.r_np / (3.0 * s.sigma_np))
        outside = s.sigma_matrix * self.b_coeff / s.r_np**2
        return abs(inside - outside) / max(abs(outside), abs(inside), np.finfo(float).tiny)


def heat_intensity(omega: float, eps1: complex, e2_magnitude_sq: float) -> float:
    """Volumetric heat source from light dissipation inside the particle."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    loss = complex(eps1).imag
    if loss < 0:
        raise NegativeLoss(f"Im(eps1) = {loss} < 0 describes gain, not dissipation")
    if e2_magnitude_sq < 0:
        raise ValueError("|E2|^2 must be non-negative")
    return omega * loss * e2_magnitude_sq / (8.0 * math.pi)


def steady_profile(scene: HeatScene) -> TemperatureProfile:
    """Steady temperature coefficients from continuity of T and of sigma dT/dr."""
    b = scene.r_np**3 * scene.q / (3.0 * scene.sigma_matrix)
    # continuity at r_np; reduces to Q r^2 (2 sigma_np + sigma_0) / (6 sigma_0 sigma_np)
    a = b / scene.r_np + scene.q * scene.r_np**2 / (6.0 * scene.sigma_np)
    return TemperatureProfile(a_coeff=a, b_coeff=b, scene=scene)


def temperature_at(profile: TemperatureProfile, r) -> np.ndarray | float:
    """Temperature rise at radius ``r`` (scalar or array); interior for ``r <= r_np``."""
    s = profile.scene
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative")
    inside = profile.a_coeff - s.q * r_arr**2 / (6.0 * s.sigma_np)
    safe_r = np.where(r_arr > 0, r_arr, 1.0)
    outside = profile.b_coeff / safe_r
    t = np.where(r_arr <= s.r_np, inside, outside)
    return float(t) if t.ndim == 0 else t


def exterior_point_source(scene: HeatScene, r) -> np.ndarray | float:
    """Exterior temperature written as a point source of total power V_NP * Q."""
    return scene.v_np * scene.q / (4.0 * math.pi * scene.sigma_matrix) / np.asarray(r, dtype=float)
