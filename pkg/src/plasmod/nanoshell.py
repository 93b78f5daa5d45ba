"""
Concentric nanoshell (dielectric / metal / dielectric / metal / host).

Regions are numbered from the core outwards, region ``j`` spanning
``r_{j-1} < r <= r_j``. Dielectric regions 1, 3, 5 share ``eps_core`` and metal
regions 2, 4 share ``eps_shell``. In region ``j`` the l=1 potential is
``sum_m (a_jm r + b_jm r^-2) Y_1^m`` with ``b_1m = 0`` and ``a_5m = a0m``.

Eliminating the transmission conditions leaves a 4x4 system ``P d = -a0 e``
for the jumps ``d_j = a_{j+1} - a_j``. Under the two-material pattern
``P = lambda1 I - K`` where ``K`` depends on radius ratios only, so resonant
contrasts are the eigenvalues of ``K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .drude import DrudeParams, lossless_frequency_for, permittivity
from .errors import (
    DegenerateInterface,
    HypothesisViolated,
    NoRealFrequency,
    PlasmodError,
    ResonantSingularity,
    SingularMatrix,
)
from .sphere import driving_coefficients

E_VEC = np.array([1.0, -1.0, 1.0, -1.0])
E4_VEC = np.ones(4)
XI = np.tril(np.ones((4, 4)))
OVERLAP_ATOL = 1e-10


@dataclass(frozen=True)
class ConcentricStructure:
    radii: tuple[float, float, float, float]
    eps_core: complex = 1.0
    eps_shell: complex | None = None

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if len(radii) != 4:
            raise ValueError(f"a concentric nanoshell needs 4 radii, got {len(radii)}")
        if not (0 < radii[0] < radii[1] < radii[2] < radii[3]):
            raise ValueError(f"radii must satisfy 0 < r1 < r2 < r3 < r4, got {radii}")
        core = complex(self.eps_core)
        if not (core.real > 0 and core.imag == 0):
            raise ValueError(f"core permittivity must be real and positive, got {core}")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "eps_core", core)
        if self.eps_shell is not None:
            object.__setattr__(self, "eps_shell", complex(self.eps_shell))

    def with_shell(self, eps_shell: complex) -> "ConcentricStructure":
        return ConcentricStructure(self.radii, self.eps_core, eps_shell)

    @property
    def region_eps(self) -> list[complex]:
        if self.eps_shell is None:
            raise ValueError("structure has no shell permittivity")
        c, s = self.eps_core, self.eps_shell
        return [c, s, c, s, c]


@dataclass(frozen=True)
class ShellMatrices:
    p_mat: np.ndarray
    k_mat: np.ndarray
    xi_mat: np.ndarray
    upsilon_mat: np.ndarray
    f_mat: np.ndarray
    lambdas: np.ndarray
    e_vec: np.ndarray = field(default_factory=lambda: E_VEC.copy())
    e4_vec: np.ndarray = field(default_factory=lambda: E4_VEC.copy())


@dataclass(frozen=True)
class Mode:
    lambda1: float
    eps_ratio: float
    eigenvector: np.ndarray
    e_overlap: float
    upsilon_overlap: float


@dataclass(frozen=True)
class ModeSet:
    modes: list[Mode]
    k_mat: np.ndarray

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([m.lambda1 for m in self.modes])

    @property
    def eps_ratios(self) -> np.ndarray:
        return np.array([m.eps_ratio for m in self.modes])


@dataclass(frozen=True)
class CoefficientSet:
    """Per-region coefficients, shape (4, 3): rows are regions, columns m = -1, 0, 1.

    ``a_coeffs`` holds a_1..a_4 and ``b_coeffs`` holds b_2..b_5.
    """

    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    a0: np.ndarray


def _radii(s) -> np.ndarray:
    if isinstance(s, ConcentricStructure):
        return np.array(s.radii)
    return np.array(ConcentricStructure(tuple(s)).radii)


def _cube_ratios(r: np.ndarray) -> np.ndarray:
    """rho[i, j] = (r_i / r_j)^3."""
    return (r[:, None] / r[None, :]) ** 3


def coupling_matrix(s) -> np.ndarray:
    """The real 4x4 matrix ``K``; depends on radius ratios only."""
    rho = _cube_ratios(_radii(s))
    return np.array(
        [
            [0.0, 1.0, 1.0, 1.0],
            [2 * rho[0, 1], 1.0, -1.0, -1.0],
            [-2 * rho[0, 2], -2 * rho[1, 2], 0.0, 1.0],
            [2 * rho[0, 3], 2 * rho[1, 3], 2 * rho[2, 3], 1.0],
        ]
    )


def interface_contrasts(eps) -> np.ndarray:
    """lambda_j = (2 eps_{j+1} + eps_j) / (eps_{j+1} - eps_j) for each interface."""
    eps = np.asarray(eps, dtype=complex)
    scale = np.max(np.abs(eps))
    jumps = eps[1:] - eps[:-1]
    bad = np.flatnonzero(np.abs(jumps) < 1e-14 * scale)
    if bad.size:
        raise DegenerateInterface(f"no permittivity jump at interface(s) {list(bad + 1)}")
    return (2 * eps[1:] + eps[:-1]) / jumps


def f_matrix(radii) -> np.ndarray:
    """Maps ``P^-1 e`` to (a_2, a_4, b_2, b_4) / a0 after adding (1, 1, 0, 0)."""
    r3 = np.asarray(radii, dtype=float) ** 3
    return np.array(
        [
            [0.0, 1.0, 1.0, 1.0],
            [0.0, 0.0, 0.0, 1.0],
            [r3[0], 0.0, 0.0, 0.0],
            [r3[0], r3[1], r3[2], 0.0],
        ]
    )


def assemble_matrices(s: ConcentricStructure) -> ShellMatrices:
    r = _radii(s)
    lam = interface_contrasts(s.region_eps)
    rho = _cube_ratios(r)
    p = np.array(
        [
            [lam[0], -1, -1, -1],
            [-2 * rho[0, 1], -lam[1], 1, 1],
            [2 * rho[0, 2], 2 * rho[1, 2], lam[2], -1],
            [-2 * rho[0, 3], -2 * rho[1, 3], -2 * rho[2, 3], -lam[3]],
        ],
        dtype=complex,
    )
    k = coupling_matrix(r)
    scale = max(1.0, abs(lam[0]))
    assert abs(lam[0] - lam[2]) <= 1e-12 * scale and abs(lam[0] + lam[1] - 1) <= 1e-12 * scale
    assert np.max(np.abs(p - (lam[0] * np.eye(4) - k))) <= 1e-12 * scale
    return ShellMatrices(
        p_mat=p,
        k_mat=k,
        xi_mat=XI.copy(),
        upsilon_mat=np.diag(r**3),
        f_mat=f_matrix(r),
        lambdas=lam,
    )


def resonance_quartic_coeffs(s) -> np.ndarray:
    """Characteristic polynomial det(lambda I - K), highest degree first.

    The lambda^2 coefficient includes the -2 (r2/r3)^3 term; dropping it
    gives roots that no longer match the eigenvalues of ``K``.
    """
    r = _radii(s)
    rho = _cube_ratios(r)
    c2 = (
        -2 * rho[0, 1] + 2 * rho[0, 2] - 2 * rho[0, 3]
        - 2 * rho[1, 2] + 2 * rho[1, 3] - 2 * rho[2, 3] + 1
    )
    c1 = 2 * rho[0, 1] - 2 * rho[0, 2] + 2 * rho[0, 3] + 2 * rho[1, 2] - 2 * rho[1, 3] + 2 * rho[2, 3]
    c0 = 4 * rho[0, 1] * rho[2, 3]
    return np.array([1.0, -2.0, c2, c1, c0])


def ratio_from_lambda(lam: float) -> float:
    """eps_shell / eps_core at which lambda1 takes the value ``lam``."""
    return (lam + 1.0) / (lam - 2.0)


def lambda_from_ratio(ratio: complex) -> complex:
    return (2.0 * ratio + 1.0) / (ratio - 1.0)


def resonance_modes(s) -> ModeSet:
    """Resonant contrasts of the shell, ascending in lambda1.

    Overlaps use radii normalized by the outermost radius so every column
    is invariant under uniform rescaling.
    """
    r = _radii(s)
    k = coupling_matrix(r)
    u1 = (r[0] / r[3]) ** 3
    modes = []
    for lam, vec in numerics.eig_real(k):
        if abs(lam.imag) > 1e-9 * numerics.inf_norm(k):
            raise PlasmodError(f"K has a complex eigenvalue {lam}")
        v = vec.real
        modes.append(
            Mode(
                lambda1=lam.real,
                eps_ratio=ratio_from_lambda(lam.real),
                eigenvector=v,
                e_overlap=float(v @ E_VEC),
                upsilon_overlap=float(u1 * v[0]),
            )
        )
    return ModeSet(modes=modes, k_mat=k)


def _p_inverse_e(s: ConcentricStructure) -> np.ndarray:
    mats = assemble_matrices(s)
    try:
        return numerics.solve_linear(mats.p_mat, E_VEC)
    except SingularMatrix as exc:
        raise ResonantSingularity(
            f"P is singular at eps_shell={s.eps_shell}: exact lossless resonance"
        ) from exc


def shell_coefficients(s: ConcentricStructure, a0=None) -> CoefficientSet:
    """
    Potential coefficients in every region for driving coefficients ``a0``.

    Parameters
    ----------
    s : ConcentricStructure
        Must carry ``eps_shell``.
    a0 : array_like, shape (3,), optional
        Driving coefficients for m = -1, 0, 1. Defaults to a unit field
        along z.

    Returns
    -------
    CoefficientSet
        ``b = a0 Xi Upsilon P^-1 e`` and ``a = a0 (e4 + Xi^T P^-1 e)``.
    """
    a0 = driving_coefficients((0, 0, 1)) if a0 is None else np.asarray(a0, dtype=complex)
    x = _p_inverse_e(s)
    r3 = np.array(s.radii) ** 3
    b_unit = XI @ (r3 * x)
    a_unit = E4_VEC + XI.T @ x
    return CoefficientSet(
        a_coeffs=np.outer(a_unit, a0),
        b_coeffs=np.outer(b_unit, a0),
        a0=a0,
    )


def _shell_weights(r: np.ndarray) -> np.ndarray:
    return np.array(
        [
            (r[1] ** 3 - r[0] ** 3) / 3.0,
            (r[3] ** 3 - r[2] ** 3) / 3.0,
            (r[0] ** -5 - r[1] ** -5) / 5.0,
            (r[2] ** -5 - r[3] ** -5) / 5.0,
        ]
    )


def shell_energy_paper(s: ConcentricStructure, coeffs: CoefficientSet) -> float:
    """Metal-shell energy with the radial weights (r^3)/3 and (r^-5)/5."""
    w = _shell_weights(np.array(s.radii))
    a, b = coeffs.a_coeffs, coeffs.b_coeffs
    sums = [
        np.sum(np.abs(a[1]) ** 2),
        np.sum(np.abs(a[3]) ** 2),
        np.sum(np.abs(b[0]) ** 2),
        np.sum(np.abs(b[2]) ** 2),
    ]
    return float(w @ np.array(sums))


def f_functions(s: ConcentricStructure) -> np.ndarray:
    """(a_2, a_4, b_2, b_4) per unit driving coefficient: ``F P^-1 e + (1, 1, 0, 0)``."""
    return f_matrix(s.radii) @ _p_inverse_e(s) + np.array([1.0, 1.0, 0.0, 0.0])


def shell_energy_from_f(s: ConcentricStructure, a0=None) -> float:
    a0 = driving_coefficients((0, 0, 1)) if a0 is None else np.asarray(a0, dtype=complex)
    w = _shell_weights(np.array(s.radii))
    return float(w @ np.abs(f_functions(s)) ** 2 * np.sum(np.abs(a0) ** 2))


def shell_energy_quadrature(
    s: ConcentricStructure,
    coeffs: CoefficientSet,
    integrand: str = "field",
    nodes: int = 64,
) -> float:
    """Gauss-Legendre integral of |grad u|^2 ("field") or |u|^2 ("potential") over the metal shells.

    Angular integrals are exact through orthonormality of the Y_1^m.
    """
    if integrand not in ("field", "potential"):
        raise ValueError(f"integrand must be 'field' or 'potential', got {integrand!r}")
    if nodes < 64:
        raise ValueError("at least 64 radial nodes are required")
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = np.array(s.radii)
    total = 0.0
    for region, (lo, hi) in ((1, (r[0], r[1])), (3, (r[2], r[3]))):
        rr = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        ww = 0.5 * (hi - lo) * w
        a = coeffs.a_coeffs[region][:, None]
        b = coeffs.b_coeffs[region - 1][:, None]
        g = a * rr + b * rr**-2
        if integrand == "potential":
            dens = np.abs(g) ** 2 * rr**2
        else:
            dg = a - 2.0 * b * rr**-3
            dens = np.abs(dg) ** 2 * rr**2 + 2.0 * np.abs(g) ** 2
        total += float(np.sum(dens @ ww))
    return total


@dataclass(frozen=True)
class ModeFrequency:
    mode: Mode
    omega: float | None

    @property
    def eligible(self) -> bool:
        return self.omega is not None


def mode_frequencies(s, p: DrudeParams, eps_core: float | None = None) -> list[ModeFrequency]:
    """Lossless Drude frequency exciting each mode; ``omega`` is None when none exists."""
    if eps_core is None:
        eps_core = _core_of(s)
    out = []
    for mode in resonance_modes(s).modes:
        try:
            omega = lossless_frequency_for(p, mode.eps_ratio * eps_core)
        except NoRealFrequency:
            omega = None
        out.append(ModeFrequency(mode=mode, omega=omega))
    return out


def _core_of(s) -> float:
    if isinstance(s, ConcentricStructure):
        return s.eps_core.real
    return 1.0


def shell_energy_scan(
    s, p: DrudeParams, omega: float, tau_grid, a0=None, eps_core: float | None = None
) -> list[tuple[float, float]]:
    """``(tau, tau * energy)`` with the metal shells following the Drude model."""
    if eps_core is None:
        eps_core = _core_of(s)
    taus = [float(t) for t in tau_grid]
    if any(t <= 0 for t in taus):
        raise ValueError("tau_grid entries must be positive")
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau_grid must be strictly decreasing")
    base = ConcentricStructure(tuple(_radii(s)), eps_core)
    out = []
    for tau in taus:
        shell = base.with_shell(permittivity(p.with_tau(tau), omega))
        energy = shell_energy_paper(shell, shell_coefficients(shell, a0))
        out.append((tau, tau * energy))
    return out


def check_excitable(mode: Mode, radii) -> None:
    """Raise HypothesisViolated unless the uniform drive couples to ``mode``."""
    r = np.asarray(radii, dtype=float)
    f_overlaps = f_matrix(r / r[-1]) @ mode.eigenvector
    if abs(mode.e_overlap) <= OVERLAP_ATOL or np.all(np.abs(f_overlaps) <= OVERLAP_ATOL):
        raise HypothesisViolated(
            f"mode lambda1={mode.lambda1:.6g} has e-overlap {mode.e_overlap:.3e} "
            f"and max f-overlap {np.max(np.abs(f_overlaps)):.3e}"
        )


def resonance_blowup_shell(
    s, p: DrudeParams, mode_index: int, tau_grid, a0=None, eps_core: float | None = None
) -> list[tuple[float, float]]:
    """Drive the shell at the lossless frequency of one mode and shrink the loss."""
    if eps_core is None:
        eps_core = _core_of(s)
    freqs = mode_frequencies(s, p, eps_core)
    chosen = freqs[mode_index]
    check_excitable(chosen.mode, _radii(s))
    if chosen.omega is None:
        raise NoRealFrequency(
            f"mode {mode_index} needs eps_shell={chosen.mode.eps_ratio * eps_core:.6g}, "
            f"not reachable below eps0={p.eps0}"
        )
    return shell_energy_scan(s, p, chosen.omega, tau_grid, a0, eps_core)
