"""
Quasi-static response of a single spherical nanoparticle.

A sphere of radius ``r_np`` and permittivity ``eps_particle`` sits in a lossless
host of permittivity ``eps_matrix`` and is driven by a uniform field ``E0``.
The potential is ``E2 . x`` inside and ``E0 . x + E1 . x / |x|^3`` outside.

The module also carries the dipole far-field machinery: the free-space
dyadic Green function built from the Helmholtz fundamental solution
``-exp(ik|x|) / (4 pi |x|)``, its curl, and the sphere polarization tensors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .drude import DrudeParams, permittivity
from .errors import EigenvalueHit, ExactResonanceSingularity, SourceSingularity

# Neumann-Poincare eigenvalue of a ball on the l=1 harmonics.
BALL_NP_EIGENVALUE = 1.0 / 6.0


def _vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class SphereScene:
    r_np: float
    eps_matrix: complex
    eps_particle: complex
    e0: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0], dtype=complex))

    def __post_init__(self):
        if not self.r_np > 0:
            raise ValueError(f"r_np must be positive, got {self.r_np}")
        eps_m = complex(self.eps_matrix)
        if not (eps_m.real > 0 and eps_m.imag == 0):
            raise ValueError(f"host permittivity must be real and positive, got {eps_m}")
        object.__setattr__(self, "eps_matrix", eps_m)
        object.__setattr__(self, "eps_particle", complex(self.eps_particle))
        object.__setattr__(self, "e0", _vec3(self.e0))

    @property
    def volume(self) -> float:
        return 4.0 * math.pi / 3.0 * self.r_np**3


@dataclass(frozen=True)
class SphereResponse:
    e2: np.ndarray
    e1: np.ndarray
    lambda_eps: complex


def contrast(inner: complex, outer: complex) -> complex:
    """Contrast (inner + outer) / (2 (inner - outer)); infinite without contrast."""
    inner, outer = complex(inner), complex(outer)
    if inner == outer:
        return complex(math.inf, 0.0)
    return (inner + outer) / (2.0 * (inner - outer))


def _denominator(s: SphereScene) -> complex:
    den = 2.0 * s.eps_matrix + s.eps_particle
    if abs(den) == 0.0:
        raise ExactResonanceSingularity(
            f"2*eps_matrix + eps_particle vanishes (eps_particle={s.eps_particle})"
        )
    return den


def sphere_response(s: SphereScene) -> SphereResponse:
    den = _denominator(s)
    e2 = (3.0 * s.eps_matrix / den) * s.e0
    e1 = ((s.eps_matrix - s.eps_particle) / den) * s.r_np**3 * s.e0
    return SphereResponse(e2=e2, e1=e1, lambda_eps=contrast(s.eps_particle, s.eps_matrix))


def transmission_residuals(s: SphereScene, resp: SphereResponse) -> tuple[float, float]:
    """Max residual of potential and flux continuity at ``r = r_np``.

    Both are evaluated per Cartesian direction, scaled by ``|E0|``.
    """
    r = s.r_np
    potential = r * s.e0 + resp.e1 / r**2 - r * resp.e2
    flux = s.eps_matrix * (s.e0 - 2.0 * resp.e1 / r**3) - s.eps_particle * resp.e2
    scale = max(np.max(np.abs(s.e0)), np.finfo(float).tiny)
    return (
        float(np.max(np.abs(potential)) / (r * scale)),
        float(np.max(np.abs(flux)) / (abs(s.eps_matrix) * scale)),
    )


def sphere_energy(s: SphereScene) -> float:
    """Field energy inside the particle, |3 eps0 / (2 eps0 + eps1)|^2 |E0|^2 V."""
    amp = abs(3.0 * s.eps_matrix / _denominator(s)) ** 2
    return amp * s.volume * float(np.sum(np.abs(s.e0) ** 2))


def resonance_blowup_scan(
    p: DrudeParams, omega: float, r_np: float, e0, tau_grid
) -> list[tuple[float, float]]:
    """``(tau, tau * energy)`` for each loss width in a strictly decreasing grid."""
    taus = [float(t) for t in tau_grid]
    if any(t <= 0 for t in taus):
        raise ValueError("tau_grid entries must be positive")
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau_grid must be strictly decreasing")
    out = []
    for tau in taus:
        eps1 = permittivity(p.with_tau(tau), omega)
        scene = SphereScene(r_np=r_np, eps_matrix=p.eps0, eps_particle=eps1, e0=e0)
        out.append((tau, tau * sphere_energy(scene)))
    return out


def resonance_wavelength(p: DrudeParams, speed: float) -> float:
    """Incident wavelength at which the Drude sphere resonates: 2 pi v sqrt(3) / omega_p."""
    if not speed > 0:
        raise ValueError(f"speed must be positive, got {speed}")
    return 2.0 * math.pi * speed * math.sqrt(3.0) / p.omega_p


# --- spherical-harmonic bookkeeping ----------------------------------------

_Y_NORM = math.sqrt(4.0 * math.pi / 3.0)


def driving_coefficients(e0) -> np.ndarray:
    """Coefficients ``a0m`` (m = -1, 0, 1) with ``E0 . x = r sum_m a0m Y_1^m``.

    Uses orthonormal complex harmonics with the Condon-Shortley phase, so
    ``sum |a0m|^2 = (4 pi / 3) |E0|^2``.
    """
    ex, ey, ez = _vec3(e0)
    return _Y_NORM * np.array(
        [(ex + 1j * ey) / math.sqrt(2.0), ez, (-ex + 1j * ey) / math.sqrt(2.0)]
    )


def field_from_coefficients(a) -> np.ndarray:
    """Inverse of ``driving_coefficients``."""
    am, a0, ap = np.asarray(a, dtype=complex)
    ex = (am - ap) / math.sqrt(2.0)
    ey = (am + ap) / (1j * math.sqrt(2.0))
    return np.array([ex, ey, a0]) / _Y_NORM


# --- polarization tensors and far field -------------------------------------


@dataclass(frozen=True)
class PolarizationTensors:
    m_e: np.ndarray
    m_h: np.ndarray


def _ball_tensor(lam: complex, volume: float, label: str) -> np.ndarray:
    if cmath.isinf(lam):
        return np.zeros((3, 3), dtype=complex)
    if abs(lam - BALL_NP_EIGENVALUE) < 1e-14:
        raise EigenvalueHit(f"{label} contrast {lam} coincides with the ball eigenvalue 1/6")
    return volume / (lam - BALL_NP_EIGENVALUE) * np.eye(3, dtype=complex)


def sphere_polarization_tensors(
    s: SphereScene, mu_contrast: complex = complex(math.inf, 0.0)
) -> PolarizationTensors:
    """Electric and magnetic polarization tensors of the sphere.

    On a ball the Neumann-Poincare operator acts on the l=1 subspace as 1/6,
    so each tensor is ``V / (lambda - 1/6)`` times the identity. An infinite
    contrast (no material jump) yields the zero tensor.
    """
    lam_e = contrast(s.eps_particle, s.eps_matrix)
    return PolarizationTensors(
        m_e=_ball_tensor(lam_e, s.volume, "electric"),
        m_h=_ball_tensor(complex(mu_contrast), s.volume, "magnetic"),
    )


@dataclass(frozen=True)
class GreenParams:
    k: complex
    mu_matrix: float = 1.0
    mu_particle: float = 1.0
    source: np.ndarray = field(default_factory=lambda: np.zeros(3))
    delta: float = 1.0
    eps_matrix: float = 1.0

    def __post_init__(self):
        if not abs(self.k) > 0:
            raise ValueError("wavenumber must be nonzero")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "k", complex(self.k))
        object.__setattr__(self, "source", np.asarray(self.source, dtype=float).reshape(3))


def _offset(g: GreenParams, x) -> tuple[np.ndarray, float]:
    d = np.asarray(x, dtype=float).reshape(3) - g.source
    r = float(np.linalg.norm(d))
    if r <= 1e-12:
        raise SourceSingularity(f"field point {x} coincides with the source")
    return d, r


def helmholtz_fundamental(k: complex, d) -> complex:
    r = float(np.linalg.norm(d))
    return -cmath.exp(1j * k * r) / (4.0 * math.pi * r)


def _radial_derivatives(k: complex, r: float) -> tuple[complex, complex, complex]:
    """Gamma, dGamma/dr and d2Gamma/dr2 for Gamma = -exp(ikr) / (4 pi r)."""
    e = cmath.exp(1j * k * r) / (4.0 * math.pi)
    ikr = 1j * k * r
    f0 = -e / r
    f1 = -e * (ikr - 1.0) / r**2
    f2 = -e * (ikr * ikr - 2.0 * ikr + 2.0) / r**3
    return f0, f1, f2


def helmholtz_gradient(k: complex, d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    r = float(np.linalg.norm(d))
    _, f1, _ = _radial_derivatives(k, r)
    return f1 * d / r


def helmholtz_hessian(k: complex, d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    r = float(np.linalg.norm(d))
    _, f1, f2 = _radial_derivatives(k, r)
    u = d / r
    uu = np.outer(u, u)
    return f2 * uu + (f1 / r) * (np.eye(3) - uu)


def dyadic_green(g: GreenParams, x) -> np.ndarray:
    """eps0 * (Gamma_k I + Hess(Gamma_k) / k^2) evaluated at ``x - source``."""
    d, _ = _offset(g, x)
    gamma = helmholtz_fundamental(g.k, d)
    return g.eps_matrix * (gamma * np.eye(3) + helmholtz_hessian(g.k, d) / g.k**2)


def curl_dyadic_green(g: GreenParams, x) -> np.ndarray:
    """Matrix ``C`` with ``C p = curl(G p)`` for constant ``p``.

    The Hessian part of ``G`` is curl-free, leaving ``eps0 * grad(Gamma) x p``.
    """
    d, _ = _offset(g, x)
    gx, gy, gz = helmholtz_gradient(g.k, d)
    cross = np.array([[0, -gz, gy], [gz, 0, -gx], [-gy, gx, 0]], dtype=complex)
    return g.eps_matrix * cross


def far_field_scattered(
    s: SphereScene,
    g: GreenParams,
    pt: PolarizationTensors,
    e_in_at_z,
    h_in_at_z,
    x,
    omega: float,
) -> np.ndarray:
    """Leading-order (delta^3) scattered electric field of a small inclusion at ``x``."""
    if complex(g.eps_matrix) != s.eps_matrix:
        raise ValueError("GreenParams.eps_matrix must match the scene host permittivity")
    e_in = _vec3(e_in_at_z)
    h_in = _vec3(h_in_at_z)
    d3 = g.delta**3
    electric = -d3 * omega**2 * g.mu_matrix * (dyadic_green(g, x) @ (pt.m_e @ e_in))
    magnetic = -d3 * (1j * omega * g.mu_matrix / s.eps_matrix) * (
        curl_dyadic_green(g, x) @ (pt.m_h @ h_in)
    )
    return electric + magnetic
