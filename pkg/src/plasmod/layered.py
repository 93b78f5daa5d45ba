"""
Brute-force l=1 solver for N concentric layers.

The transmission conditions at every interface are written out as one dense
linear system and solved directly, with no elimination tricks. This serves as
an independent check on the nanoshell formulas and handles any number of
layers.

Unknowns, innermost region first: ``a_1``, then ``(a_j, b_j)`` for every
intermediate region, then ``b_N``. Regularity fixes ``b_1 = 0`` and
``a_N = a0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import ResonantSingularity, SingularMatrix


@dataclass(frozen=True)
class LayeredSphere:
    radii: tuple[float, ...]
    eps: tuple[complex, ...]

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        eps = tuple(complex(e) for e in self.eps)
        if not radii:
            raise ValueError("need at least one interface")
        if radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError(f"radii must be positive and strictly increasing, got {radii}")
        if len(eps) != len(radii) + 1:
            raise ValueError(f"{len(radii)} interfaces need {len(radii) + 1} permittivities, got {len(eps)}")
        if not eps[-1].real > 0:
            raise ValueError(f"host permittivity must have positive real part, got {eps[-1]}")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "eps", eps)

    @property
    def n_regions(self) -> int:
        return len(self.eps)


@dataclass(frozen=True)
class LayeredSolution:
    """Coefficients per region, shape (N, 3) with columns m = -1, 0, 1."""

    a: np.ndarray
    b: np.ndarray


def _unknown_index(n: int) -> tuple[dict[int, int], dict[int, int]]:
    a_idx, b_idx = {0: 0}, {}
    k = 1
    for j in range(1, n - 1):
        a_idx[j] = k
        b_idx[j] = k + 1
        k += 2
    b_idx[n - 1] = k
    return a_idx, b_idx


def system_matrix(radii, eps) -> tuple[np.ndarray, np.ndarray]:
    """Dense transmission system in radii scaled by the outermost interface.

    Returns ``(M, c)`` such that ``M x = a0 * c``; the ``b`` unknowns are
    divided by the cube of the outermost radius.
    """
    radii = np.asarray(radii, dtype=float)
    rho = radii / radii[-1]
    eps = np.asarray(eps, dtype=complex)
    n = eps.size
    size = 2 * (n - 1)
    a_idx, b_idx = _unknown_index(n)
    m = np.zeros((size, size), dtype=complex)
    c = np.zeros(size, dtype=complex)

    def put(row, kind, region, coef):
        if kind == "a":
            if region == n - 1:
                c[row] -= coef
            else:
                m[row, a_idx[region]] += coef
        elif region != 0:
            m[row, b_idx[region]] += coef

    for j in range(n - 1):
        r = rho[j]
        inner, outer = j, j + 1
        row = 2 * j
        put(row, "a", outer, r)
        put(row, "b", outer, r**-2)
        put(row, "a", inner, -r)
        put(row, "b", inner, -(r**-2))
        row += 1
        put(row, "a", outer, eps[outer])
        put(row, "b", outer, -2.0 * eps[outer] * r**-3)
        put(row, "a", inner, -eps[inner])
        put(row, "b", inner, 2.0 * eps[inner] * r**-3)
    return m, c


def direct_solve(ls: LayeredSphere, a0) -> LayeredSolution:
    """Solve the raw transmission conditions for driving coefficients ``a0`` (per m)."""
    a0 = np.atleast_1d(np.asarray(a0, dtype=complex))
    n = ls.n_regions
    m, c = system_matrix(ls.radii, ls.eps)
    a_idx, b_idx = _unknown_index(n)
    scale = ls.radii[-1] ** 3
    a = np.zeros((n, a0.size), dtype=complex)
    b = np.zeros((n, a0.size), dtype=complex)
    for col, drive in enumerate(a0):
        try:
            x = numerics.solve_linear(m, drive * c)
        except SingularMatrix as exc:
            raise ResonantSingularity(f"transmission system singular for eps={ls.eps}") from exc
        for j, k in a_idx.items():
            a[j, col] = x[k]
        for j, k in b_idx.items():
            b[j, col] = x[k] * scale
        a[n - 1, col] = drive
    return LayeredSolution(a=a, b=b)


def transmission_residuals(ls: LayeredSphere, sol: LayeredSolution) -> np.ndarray:
    """Relative residual of each transmission equation in physical units.

    Shape (2 (N-1), n_m): potential rows at even indices, flux rows at odd.
    Each residual is divided by the largest term entering its equation.
    """
    out = []
    for j, r in enumerate(ls.radii):
        ei, eo = ls.eps[j], ls.eps[j + 1]
        ai, bi, ao, bo = sol.a[j], sol.b[j], sol.a[j + 1], sol.b[j + 1]
        pot_terms = [ao * r, bo * r**-2, ai * r, bi * r**-2]
        flux_terms = [eo * ao, 2 * eo * bo * r**-3, ei * ai, 2 * ei * bi * r**-3]
        pot = pot_terms[0] + pot_terms[1] - pot_terms[2] - pot_terms[3]
        flux = flux_terms[0] - flux_terms[1] - flux_terms[2] + flux_terms[3]
        for res, terms in ((pot, pot_terms), (flux, flux_terms)):
            scale = np.max(np.abs(terms), axis=0)
            out.append(np.abs(res) / np.where(scale > 0, scale, 1.0))
    return np.array(out)


def alternating_eps(n_regions: int, metal: complex, dielectric: complex = 1.0) -> list[complex]:
    """Region permittivities alternating metal / dielectric, with a dielectric host."""
    return [metal if (n_regions - 1 - j) % 2 else dielectric for j in range(n_regions)]


def _det_sign_grid(radii, ratios: np.ndarray, eps_dielectric: float) -> np.ndarray:
    n = len(radii) + 1
    mats = np.stack(
        [system_matrix(radii, alternating_eps(n, q * eps_dielectric, eps_dielectric))[0].real for q in ratios]
    )
    return np.linalg.det(mats)


def mode_count_scan(
    radii,
    eps_dielectric: float = 1.0,
    bracket: tuple[float, float] = (-100.0, -0.01),
    n_grid: int = 10_000,
    tol: float = 1e-10,
) -> list[float]:
    """
    Lossless metal/host permittivity ratios at which the alternating structure resonates.

    Scans ``eps_metal / eps_dielectric`` over ``bracket`` on a geometric grid
    for sign changes of the system determinant, then bisects each bracket to
    ``tol`` (relative). Returns the ratios in ascending order.
    """
    lo, hi = bracket
    if not (lo < hi < 0):
        raise ValueError(f"bracket must be negative and ordered, got {bracket}")
    radii = [float(r) for r in radii]
    ratios = -np.geomspace(-lo, -hi, n_grid)
    dets = _det_sign_grid(radii, ratios, eps_dielectric)
    signs = np.sign(dets)

    def det(q):
        return _det_sign_grid(radii, np.array([q]), eps_dielectric)[0]

    roots = []
    for i in np.flatnonzero(signs[:-1] * signs[1:] <= 0):
        left, right = ratios[i], ratios[i + 1]
        f_left = dets[i]
        if f_left == 0:
            roots.append(float(left))
            continue
        while abs(right - left) > tol * abs(left):
            mid = 0.5 * (left + right)
            f_mid = det(mid)
            if np.sign(f_mid) == np.sign(f_left):
                left, f_left = mid, f_mid
            else:
                right = mid
        roots.append(float(0.5 * (left + right)))
    # a grid point landing on a root registers in two adjacent cells
    roots.sort()
    deduped = [q for k, q in enumerate(roots) if k == 0 or abs(q - roots[k - 1]) > 10 * tol * abs(q)]
    return deduped
