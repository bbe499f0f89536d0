"""Small dense linear-algebra kernel.

Matrices are plain float ``numpy.ndarray`` objects. The systems in this
package are tiny (tens of rows at most), so a pivoted elimination with an
explicit singularity threshold is preferred over LAPACK: it gives a
predictable :class:`SingularMatrix` contract instead of silently returning
garbage for nearly singular input.
"""

import numpy as np

from .errors import NegativeEntry, SingularMatrix, ValidationError

PIVOT_RTOL = 1e-12
RIDGE = 1e-12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array (a 1-D input becomes a column)."""
    m = np.array(a, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"{name} must be non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} contains non-finite entries", code="VALIDATION_FINITE")
    return m


def as_vector(x, name: str = "vector", size: int | None = None) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} contains non-finite entries", code="VALIDATION_FINITE")
    if size is not None and v.size != size:
        raise ValidationError(f"{name} has length {v.size}, expected {size}", code="VALIDATION_SHAPE")
    return v


def solve_linear(a, rhs) -> np.ndarray:
    """Solve ``a @ x = rhs`` by Gaussian elimination with partial pivoting.

    ``rhs`` may be a vector or an ``n x m`` matrix; the result has the same
    shape as ``rhs``. Raises :class:`SingularMatrix` when the best available
    pivot is below ``1e-12`` times the largest magnitude in its column of the
    original matrix.
    """
    a = as_matrix(a, "a")
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValidationError(f"a must be square, got shape {a.shape}", code="VALIDATION_SHAPE")
    rhs_arr = np.asarray(rhs, dtype=float)
    vector_rhs = rhs_arr.ndim == 1
    b = as_matrix(rhs_arr, "rhs")
    if b.shape[0] != n:
        raise ValidationError(f"rhs has {b.shape[0]} rows, expected {n}", code="VALIDATION_SHAPE")

    scale = np.abs(a).max(axis=0)
    u = a.copy()
    x = b.copy()
    for col in range(n):
        piv = col + int(np.argmax(np.abs(u[col:, col])))
        if scale[col] == 0.0 or abs(u[piv, col]) < PIVOT_RTOL * scale[col]:
            raise SingularMatrix(f"pivot in column {col} is numerically zero")
        if piv != col:
            u[[col, piv]] = u[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        factors = u[col + 1:, col] / u[col, col]
        u[col + 1:, col:] -= np.outer(factors, u[col, col:])
        x[col + 1:] -= np.outer(factors, x[col])

    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - u[row, row + 1:] @ x[row + 1:]) / u[row, row]
    return x[:, 0] if vector_rhs else x


def inverse(a) -> np.ndarray:
    a = as_matrix(a, "a")
    return solve_linear(a, np.eye(a.shape[0]))


def spectral_radius_upper_bound(s) -> float:
    """Maximum absolute row sum of a nonnegative square matrix.

    For nonnegative matrices this bounds the spectral radius from above.
    """
    s = as_matrix(s, "s")
    if s.shape[0] != s.shape[1]:
        raise ValidationError(f"s must be square, got shape {s.shape}", code="VALIDATION_SHAPE")
    if np.any(s < 0):
        raise NegativeEntry("spectral-radius bound requires a nonnegative matrix")
    return float(s.sum(axis=1).max())


def frobenius_norm(a) -> float:
    a = as_matrix(a, "a")
    return float(np.sqrt(np.sum(a * a)))


def kronecker(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def least_squares(a, rhs) -> np.ndarray:
    """Minimise ``||a @ lam - rhs||_2`` through the normal equations.

    A ridge of ``1e-12`` is added once if the normal matrix is singular.
    Returns a vector when ``rhs`` is a vector.
    """
    a = as_matrix(a, "a")
    rhs_arr = np.asarray(rhs, dtype=float)
    vector_rhs = rhs_arr.ndim == 1
    b = as_matrix(rhs_arr, "rhs")
    if b.shape[0] != a.shape[0]:
        raise ValidationError(
            f"rhs has {b.shape[0]} rows, expected {a.shape[0]}", code="VALIDATION_SHAPE"
        )
    normal = a.T @ a
    atb = a.T @ b
    try:
        lam = solve_linear(normal, atb)
    except SingularMatrix:
        lam = solve_linear(normal + RIDGE * np.eye(normal.shape[0]), atb)
    return lam[:, 0] if vector_rhs else lam


def rank(a, rtol: float = 1e-10) -> int:
    """Numerical rank by row reduction with full column scan."""
    u = as_matrix(a, "a").copy()
    rows, cols = u.shape
    tol = rtol * max(1.0, float(np.abs(u).max()))
    r = 0
    for col in range(cols):
        if r == rows:
            break
        piv = r + int(np.argmax(np.abs(u[r:, col])))
        if abs(u[piv, col]) <= tol:
            continue
        u[[r, piv]] = u[[piv, r]]
        u[r + 1:] -= np.outer(u[r + 1:, col] / u[r, col], u[r])
        r += 1
    return r
