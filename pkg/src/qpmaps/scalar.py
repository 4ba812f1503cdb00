"""Dual exact/float scalars and the small amount of linear algebra built on them.

Matrix entries are either :class:`fractions.Fraction` (exact) or ``float``.
Matrices are stored as read-only numpy ``object`` arrays so that products of
exact matrices stay exact while mixed products degrade to floats.
"""
import re
from fractions import Fraction
from numbers import Integral, Real

import numpy as np

from .errors import DimensionMismatch, SingularC

TOL_STRUCT = 1e-12
COND_LIMIT = 1e12

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def to_scalar(value):
    """Convert ``value`` to a Fraction (exact) or a float.

    Integers, Fractions and rational strings such as ``"-3/4"`` are exact;
    Python and numpy floats stay floats.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (Integral, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise ValueError(f"not a rational literal: {value!r}")
        frac = Fraction(text)
        return frac
    if isinstance(value, (Real, np.floating)):
        return float(value)
    raise TypeError(f"unsupported entry type {type(value).__name__}")


def _freeze(arr):
    arr.flags.writeable = False
    return arr


def vector(values, length=None):
    vals = [to_scalar(v) for v in values]
    if length is not None and len(vals) != length:
        raise DimensionMismatch(f"expected a vector of length {length}, got {len(vals)}")
    out = np.empty(len(vals), dtype=object)
    out[:] = vals
    return _freeze(out)


def matrix(rows, shape=None):
    """Build a read-only object matrix; ``shape`` is checked when given."""
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        rows = rows.tolist()
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else (shape[1] if shape else 0)
    if any(len(r) != ncols for r in rows):
        raise DimensionMismatch("ragged matrix rows")
    if shape is not None and (nrows, ncols) != tuple(shape):
        raise DimensionMismatch(f"expected shape {tuple(shape)}, got {(nrows, ncols)}")
    out = np.empty((nrows, ncols), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = to_scalar(v)
    return _freeze(out)


def identity(n):
    return matrix([[int(i == j) for j in range(n)] for i in range(n)])


def is_exact(arr):
    return all(isinstance(v, Fraction) for v in np.asarray(arr, dtype=object).flat)


def is_zero(value, tol=TOL_STRUCT):
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= tol


def equal(a, b, tol=TOL_STRUCT):
    return is_zero(a - b, tol)


def all_zero(values, tol=TOL_STRUCT):
    return all(is_zero(v, tol) for v in np.asarray(values, dtype=object).flat)


def rows_equal(r1, r2, tol=TOL_STRUCT):
    return all(equal(a, b, tol) for a, b in zip(r1, r2))


def as_float(arr):
    return np.asarray(arr, dtype=object).astype(float)


def product(a, b):
    """Matrix product that keeps exact entries exact (result is read-only)."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    shape = a.shape[:-1] + b.shape[1:]
    out = np.empty(shape, dtype=object)
    if a.shape[-1] == 0:
        out[...] = Fraction(0)
    elif out.size:
        out[...] = a @ b
    return _freeze(out)


def _gauss_jordan_inverse(C):
    n = C.shape[0]
    aug = [list(C[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularC("C is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return matrix([row[n:] for row in aug])


def inverse(C, cond_limit=COND_LIMIT):
    """Inverse of a square matrix, exact for all-rational input.

    Float matrices are inverted with LAPACK and rejected when the 2-norm
    condition number exceeds ``cond_limit``.
    """
    C = np.asarray(C, dtype=object)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatch("C must be square")
    if is_exact(C):
        return _gauss_jordan_inverse(C)
    Cf = as_float(C)
    cond = np.linalg.cond(Cf)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularC(f"C is singular or ill-conditioned (cond={cond:.3g})")
    return matrix(np.linalg.inv(Cf))


def determinant(C):
    C = np.asarray(C, dtype=object)
    if is_exact(C):
        n = C.shape[0]
        rows = [list(r) for r in C]
        det = Fraction(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                rows[col], rows[piv] = rows[piv], rows[col]
                det = -det
            p = rows[col][col]
            det *= p
            for r in range(col + 1, n):
                f = rows[r][col] / p
                if f:
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
        return det
    return float(np.linalg.det(as_float(C)))


def nullspace(M, tol=TOL_STRUCT):
    """Basis of ``{v : M v = 0}`` by reduced row echelon form.

    Exact for all-rational ``M``; otherwise partial pivoting with pivots
    below ``tol`` (relative to the largest entry) treated as zero. Each basis
    vector has its first nonzero component equal to 1.
    """
    M = np.asarray(M, dtype=object)
    nrows, ncols = M.shape
    exact = is_exact(M)
    if exact:
        rows = [list(r) for r in M]
        small = lambda v: v == 0  # noqa: E731
    else:
        rows = [[float(v) for v in r] for r in M]
        scale = max((abs(v) for r in rows for v in r), default=0.0) or 1.0
        small = lambda v: abs(v) <= tol * scale  # noqa: E731
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        cand = range(r, nrows)
        piv = max(cand, key=lambda i: abs(rows[i][c])) if not exact else next(
            (i for i in cand if rows[i][c] != 0), None)
        if piv is None or small(rows[piv][c]):
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(nrows):
            if i != r and not small(rows[i][c]):
                f = rows[i][c]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [zero] * ncols
        v[free] = one
        for row, pc in enumerate(pivots):
            v[pc] = -rows[row][free]
        lead = next(x for x in v if not (x == 0 if exact else abs(x) <= tol))
        basis.append(vector([x / lead for x in v]))
    return basis
