"""
Small dense linear algebra kernel.

Everything here works on matrices of at most 64x64 entries, which covers the
4x4 shell matrices and the 2(N-1) square transmission systems of the layered
solver with plenty of room.

Provides

- ``solve_linear``: Gaussian elimination with partial pivoting (complex).
- ``eig_real``: eigenpairs of a real nonsymmetric matrix by Householder
  reduction to Hessenberg form followed by Francis double-shift QR, with
  eigenvectors from inverse iteration.
- ``poly_roots``: polynomial roots as eigenvalues of the companion matrix.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateLeadingCoefficient, NoConvergence, SingularMatrix

MAX_DIM = 64
PIVOT_RTOL = 1e-14
QR_ITERATIONS_PER_EIGENVALUE = 60


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Validate and copy ``a`` into a 2-D complex or real array."""
    arr = np.array(a)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    rows, cols = arr.shape
    if not (1 <= rows <= MAX_DIM and 1 <= cols <= MAX_DIM):
        raise ValueError(f"matrix shape {arr.shape} outside 1..{MAX_DIM}")
    if square and rows != cols:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(float)
    return arr


def inf_norm(a: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(a), axis=1)))


def solve_linear(a, b) -> np.ndarray:
    """
    Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Real or complex coefficient matrix.
    b : array_like, shape (n,)
        Right-hand side.

    Returns
    -------
    x : ndarray, shape (n,), complex

    Raises
    ------
    SingularMatrix
        If a pivot falls below ``1e-14 * ||A||_inf``.
    """
    lu = as_matrix(a).astype(complex)
    n = lu.shape[0]
    x = np.array(b, dtype=complex).reshape(-1)
    if x.shape[0] != n:
        raise ValueError(f"rhs length {x.shape[0]} does not match matrix size {n}")

    threshold = PIVOT_RTOL * inf_norm(lu)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= threshold:
            raise SingularMatrix(
                f"pivot {abs(lu[p, k]):.3e} in column {k} below {threshold:.3e}"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = lu[k + 1:, k] / lu[k, k]
        lu[k + 1:, k:] -= np.outer(factors, lu[k, k:])
        x[k + 1:] -= factors * x[k]

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Householder reduction to upper Hessenberg form (similarity transform)."""
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        col = h[k + 1:, k]
        alpha = np.linalg.norm(col)
        if alpha == 0.0:
            continue
        v = col.copy()
        v[0] += math.copysign(alpha, v[0]) if v[0] != 0 else alpha
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _hqr(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    ``a`` is overwritten.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])

    nn = n - 1
    t = 0.0
    max_its = QR_ITERATIONS_PER_EIGENVALUE
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            if its == max_its:
                raise NoConvergence(
                    f"QR iteration did not converge after {max_its} sweeps"
                )
            if its in (10, 20):
                # exceptional shift breaks cycles
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1

            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1

            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0

            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                for i in range(l, min(nn, k + 3) + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return wr + 1j * wi


def _lu_solve_unguarded(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Partial-pivot solve that replaces exact zero pivots by a tiny value.

    Inverse iteration deliberately factors a near-singular matrix.
    """
    lu = m.copy()
    x = b.copy()
    n = lu.shape[0]
    tiny = np.finfo(float).eps * max(inf_norm(lu), np.finfo(float).tiny)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            x[[k, p]] = x[[p, k]]
        if lu[k, k] == 0:
            lu[k, k] = tiny
        factors = lu[k + 1:, k] / lu[k, k]
        lu[k + 1:, k:] -= np.outer(factors, lu[k, k:])
        x[k + 1:] -= factors * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    mags = np.abs(v)
    first = int(np.argmax(mags > 1e-10 * mags.max()))
    return v * (abs(v[first]) / v[first])


def _eigenvector(a: np.ndarray, lam: complex, scale: float) -> np.ndarray:
    n = a.shape[0]
    shifted = a.astype(complex) - (lam + 1e-13 * scale) * np.eye(n)
    v = np.ones(n, dtype=complex) + 0.1j * np.arange(n)
    best, best_res = v, math.inf
    for _ in range(4):
        v = _lu_solve_unguarded(shifted, v)
        v /= np.linalg.norm(v)
        res = np.max(np.abs(a @ v - lam * v))
        if res < best_res:
            best, best_res = v, res
    return _normalize_phase(best)


def eig_real(a) -> list[tuple[complex, np.ndarray]]:
    """
    Eigenpairs of a real square matrix.

    Returns a list of ``(eigenvalue, eigenvector)`` sorted by ascending real
    part, then imaginary part. Eigenvectors have unit Euclidean norm and their
    first nonzero component is real and positive.
    """
    arr = as_matrix(a)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValueError("eig_real requires a matrix with zero imaginary parts")
        arr = arr.real.copy()
    n = arr.shape[0]
    if n == 1:
        return [(complex(arr[0, 0]), np.ones(1, dtype=complex))]

    values = _hqr(_hessenberg(arr))
    order = sorted(range(n), key=lambda i: (values[i].real, values[i].imag))
    scale = max(inf_norm(arr), np.finfo(float).tiny)
    return [(complex(values[i]), _eigenvector(arr, complex(values[i]), scale)) for i in order]


def companion(coeffs) -> np.ndarray:
    """Companion matrix of a polynomial given highest degree first."""
    c = np.asarray(coeffs, dtype=float)
    n = c.size - 1
    mat = np.zeros((n, n))
    mat[0, :] = -c[1:] / c[0]
    if n > 1:
        mat[1:, :-1] = np.eye(n - 1)
    return mat


def poly_roots(coeffs) -> list[complex]:
    """
    Roots of a real polynomial (highest degree first), sorted ascending by
    real part then imaginary part.

    Raises
    ------
    DegenerateLeadingCoefficient
        If ``|c[0]| < 1e-14 * max|c|``.
    """
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    if c.size < 2 or c.size > 17:
        raise ValueError(f"degree must be between 1 and 16, got {c.size - 1}")
    if abs(c[0]) < 1e-14 * np.max(np.abs(c)):
        raise DegenerateLeadingCoefficient(
            f"leading coefficient {c[0]!r} is negligible relative to {np.max(np.abs(c))!r}"
        )
    roots = np.linalg.eigvals(companion(c))
    return sorted((complex(z) for z in roots), key=lambda z: (z.real, z.imag))


def polyval(coeffs, z: complex) -> complex:
    acc = 0j
    for c in coeffs:
        acc = acc * z + c
    return acc
