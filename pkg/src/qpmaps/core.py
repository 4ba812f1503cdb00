"""QP map data model, validation, log-space iteration and map constructors.

A QP map acts on the open positive orthant by

    x_i(t+1) = x_i(t) * exp(lambda_i + sum_j A_ij * Q_j(x(t))),
    Q_j(x) = prod_k x_k ** B_jk.

States are kept in log-coordinates ``u = ln x`` throughout, where one step
reads ``u' = u + lambda + A @ exp(B @ u)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import scalar as sc
from .errors import (DimensionMismatch, DuplicateBRows, InvalidParameter, NonFiniteState,
                     OverflowGuard, ZeroColumnInA, ZeroRowInB)

#: Largest admissible |exponent| passed to ``exp``; configurable per call.
EXP_LIMIT = 700.0


@dataclass(frozen=True, eq=False)
class QPMap:
    """The triple (lambda, A, B) of a quasipolynomial map.

    Entries are ``Fraction`` (exact) or ``float``. Build instances with
    :func:`validate` or :func:`qpmap`; the constructor checks only shapes.
    """

    lam: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        n = self.lam.shape[0]
        if self.A.shape[0] != n or self.B.shape[1] != n or self.A.shape[1] != self.B.shape[0]:
            raise DimensionMismatch(
                f"inconsistent shapes lambda{self.lam.shape}, A{self.A.shape}, B{self.B.shape}")

    @property
    def n(self):
        return self.lam.shape[0]

    @property
    def m(self):
        return self.A.shape[1]

    @cached_property
    def M(self):
        """The n x (m+1) matrix (lambda | A)."""
        out = np.empty((self.n, self.m + 1), dtype=object)
        out[:, 0] = self.lam
        out[:, 1:] = self.A
        out.flags.writeable = False
        return out

    @cached_property
    def exact(self):
        """True when every entry is an exact rational."""
        return sc.is_exact(self.lam) and sc.is_exact(self.A) and sc.is_exact(self.B)

    @cached_property
    def lam_f(self):
        return sc.as_float(self.lam)

    @cached_property
    def A_f(self):
        return sc.as_float(self.A).reshape(self.n, self.m)

    @cached_property
    def B_f(self):
        return sc.as_float(self.B).reshape(self.m, self.n)

    @cached_property
    def lam_sum_f(self):
        # summed before conversion so that exact cancellations stay exact
        return float(sum(self.lam, Fraction(0)))

    @cached_property
    def A_colsum_f(self):
        return np.array([float(sum(self.A[:, j], Fraction(0))) for j in range(self.m)])

    def __eq__(self, other):
        if not isinstance(other, QPMap):
            return NotImplemented
        return (self.lam.shape == other.lam.shape and self.A.shape == other.A.shape
                and bool(np.all(self.lam == other.lam)) and bool(np.all(self.A == other.A))
                and bool(np.all(self.B == other.B)))

    __hash__ = None

    def to_dict(self):
        """JSON-ready representation; exact entries become ``"p/q"`` strings."""
        enc = lambda v: (str(v) if isinstance(v, Fraction) else float(v))  # noqa: E731
        return {
            "n": self.n,
            "m": self.m,
            "lambda": [enc(v) for v in self.lam],
            "A": [[enc(v) for v in row] for row in self.A],
            "B": [[enc(v) for v in row] for row in self.B],
        }

    def __repr__(self):
        d = self.to_dict()
        return f"QPMap(n={self.n}, m={self.m}, lambda={d['lambda']}, A={d['A']}, B={d['B']})"


def validate(n, m, lam, A, B, *, tol=0.0):
    """Check raw matrices against the QP map invariants and build a :class:`QPMap`.

    Raises DimensionMismatch, ZeroColumnInA, ZeroRowInB or DuplicateBRows.
    Float entries are compared with ``tol`` (exact zero by default).
    """
    if n < 1 or m < 0:
        raise DimensionMismatch(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    lam = sc.vector(lam, n)
    A = sc.matrix(A, (n, m)) if m else np.empty((n, 0), dtype=object)
    if m:
        B = sc.matrix(B, (m, n))
    else:
        if B is not None and len(B):
            raise DimensionMismatch("B must be empty when m = 0")
        B = np.empty((0, n), dtype=object)
    for j in range(m):
        if sc.all_zero(A[:, j], tol):
            raise ZeroColumnInA(j)
    for j in range(m):
        if sc.all_zero(B[j], tol):
            raise ZeroRowInB(j)
    for j in range(m):
        for k in range(j + 1, m):
            if sc.rows_equal(B[j], B[k], tol):
                raise DuplicateBRows(j, k)
    return QPMap(lam, A, B)


def qpmap(lam, A, B, **kw):
    """Shorthand for :func:`validate` that infers n and m from the inputs."""
    n = len(lam)
    m = len(B) if B is not None else 0
    if m == 0 and A is not None and len(A) and len(A[0]):
        m = len(A[0])
    return validate(n, m, lam, A if m else [[]] * n, B if m else None, **kw)


def _check_exponents(z, exp_limit):
    if z.size and np.max(np.abs(z)) > exp_limit:
        raise OverflowGuard(f"quasimonomial exponent {np.max(np.abs(z)):.4g} exceeds {exp_limit}")


def eval_quasimonomials(qp, u, *, exp_limit=EXP_LIMIT):
    """Quasimonomials Q_j = exp((B u)_j) at log-state ``u``.

    ``u`` may be a single state of shape (n,) or a batch (..., n).
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != qp.n:
        raise DimensionMismatch(f"state has length {u.shape[-1]}, map has n={qp.n}")
    z = u @ qp.B_f.T
    _check_exponents(z, exp_limit)
    return np.exp(z)


def step(qp, u, *, exp_limit=EXP_LIMIT):
    """One application of the map in log-coordinates."""
    u = np.asarray(u, dtype=float)
    Q = eval_quasimonomials(qp, u, exp_limit=exp_limit)
    out = u + qp.lam_f + Q @ qp.A_f.T
    if not np.all(np.isfinite(out)):
        raise NonFiniteState("step produced a non-finite log-state")
    return out


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Orbit ``u[t]`` for t = 0..T in log-coordinates."""

    u: np.ndarray
    qp: QPMap | None = field(default=None, repr=False)

    @property
    def T(self):
        return self.u.shape[0] - 1

    @property
    def x(self):
        return np.exp(self.u)

    def __len__(self):
        return self.u.shape[0]

    def __getitem__(self, t):
        return self.u[t]


def iterate(qp, u0, T, *, exp_limit=EXP_LIMIT):
    """Iterate ``T`` steps from log-state ``u0``.

    Errors from :func:`step` are re-raised with the failing time index.
    """
    if T < 1:
        raise InvalidParameter("T must be >= 1")
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (qp.n,):
        raise DimensionMismatch(f"initial state has shape {u0.shape}, expected ({qp.n},)")
    if not np.all(np.isfinite(u0)):
        raise NonFiniteState("initial state is not finite")
    out = np.empty((T + 1, qp.n))
    out[0] = u0
    for t in range(T):
        try:
            out[t + 1] = step(qp, out[t], exp_limit=exp_limit)
        except OverflowGuard as exc:
            raise OverflowGuard(str(exc), t=t) from exc
        except NonFiniteState as exc:
            raise NonFiniteState(str(exc), t=t) from exc
    out.flags.writeable = False
    return Trajectory(out, qp)


def canonicalize(qp, *, tol=0.0, log=None):
    """Bring a dimension-consistent map into a form satisfying all invariants.

    Duplicate B rows are merged by summing their A columns, all-zero B rows
    (constant quasimonomials) are folded into lambda, and all-zero A columns
    are dropped with their B row. The mapping on the positive orthant is
    unchanged. Each change is appended to ``log`` as a tuple when given.
    """
    note = log.append if log is not None else (lambda _: None)
    lam = list(qp.lam)
    cols = [list(qp.A[:, j]) for j in range(qp.m)]
    rows = [list(qp.B[j]) for j in range(qp.m)]

    merged_cols, merged_rows = [], []
    for j, (col, row) in enumerate(zip(cols, rows)):
        for k, prev in enumerate(merged_rows):
            if sc.rows_equal(prev, row, tol):
                merged_cols[k] = [a + b for a, b in zip(merged_cols[k], col)]
                note(("merge", j, k))
                break
        else:
            merged_cols.append(col)
            merged_rows.append(row)

    keep_cols, keep_rows = [], []
    for k, (col, row) in enumerate(zip(merged_cols, merged_rows)):
        if sc.all_zero(row, tol):
            lam = [l + a for l, a in zip(lam, col)]
            note(("fold", k))
        elif sc.all_zero(col, tol):
            note(("drop", k))
        else:
            keep_cols.append(col)
            keep_rows.append(row)

    n = qp.n
    A = [[c[i] for c in keep_cols] for i in range(n)]
    return validate(n, len(keep_rows), lam, A, keep_rows or None, tol=tol)


def is_lotka_volterra(qp):
    return qp.m == qp.n and bool(np.all(qp.B == sc.identity(qp.n)))


def make_example1(lambda1, lambda2, a13):
    """Three-dimensional conservative LV map with a single active quasimonomial x3."""
    l1, l2, a = (sc.to_scalar(v) for v in (lambda1, lambda2, a13))
    if a == 0:
        raise InvalidParameter("A13 must be nonzero")
    return validate(3, 1, [l1, l2, -l1 - l2], [[a], [-a], [0]], [[0, 0, 1]])


def make_example2(lambda1, lambda2, a13, a14, a24):
    """Three-dimensional conservative QP map with quasimonomials x3 and x1*x2*x3."""
    l1, l2, a13, a14, a24 = (sc.to_scalar(v) for v in (lambda1, lambda2, a13, a14, a24))
    if a13 == 0:
        raise InvalidParameter("A13 must be nonzero")
    if a14 == 0 and a24 == 0:
        raise InvalidParameter("A14 and A24 both zero leave an all-zero A column")
    return validate(3, 2, [l1, l2, -l1 - l2],
                    [[a13, a14], [-a13, a24], [0, -a14 - a24]],
                    [[0, 0, 1], [1, 1, 1]])


# ---------------------------------------------------------------- random maps

PROFILES = ("unconstrained", "thm1_conservative", "example1_family", "example2_family",
            "lv", "symplectic", "thm5_necessary", "thm5_damped")

_SYMPLECTIC_RE = re.compile(r"^symplectic\((\d+)\)$")


def _grid(rng, lo, hi, den, size=None, nonzero=False):
    """Rationals k/den in [lo, hi] as an object array (or a single Fraction)."""
    klo, khi = int(np.ceil(lo * den)), int(np.floor(hi * den))
    choices = [k for k in range(klo, khi + 1) if not (nonzero and k == 0)]
    if not choices:
        raise InvalidParameter(f"no admissible grid values in [{lo}, {hi}]")
    picks = rng.choice(choices, size=size)
    if size is None:
        return Fraction(int(picks), den)
    out = np.empty(np.shape(picks), dtype=object)
    out.flat[:] = [Fraction(int(k), den) for k in np.ravel(picks)]
    return out


def _distinct_rows(rng, m, n, lo, hi, den, max_tries=1000):
    rows = []
    for _ in range(max_tries):
        if len(rows) == m:
            return rows
        row = list(_grid(rng, lo, hi, den, size=n))
        if any(row) and row not in rows:
            rows.append(row)
    raise InvalidParameter(f"could not draw {m} distinct nonzero rows in [{lo}, {hi}]")


def _nonzero_columns(rng, n, m, lo, hi, den):
    A = _grid(rng, lo, hi, den, size=(n, m))
    for j in range(m):
        while not any(A[:, j]):
            A[:, j] = _grid(rng, lo, hi, den, size=n)
    return A


def random_map(seed, n=None, m=None, entry_range=(-1, 1), profile="unconstrained", *,
               s=None, b_range=None, nonneg_b=False, denominator=8):
    """Seeded random QP map with rational entries on the grid ``k / denominator``.

    Profiles build their structural conditions exactly:

    ``unconstrained``      any valid map.
    ``thm1_conservative``  n = 2, lambda_1 + lambda_2 = 0, A columns (a, -a), B rows (b, b).
    ``example1_family``    :func:`make_example1` with random parameters.
    ``example2_family``    :func:`make_example2` with random parameters.
    ``lv``                 m = n and B the identity.
    ``symplectic``         n = 2s (pass ``s`` or ``profile="symplectic(s)"``);
                           B is non-negative unless ``b_range`` says otherwise.
    ``thm5_necessary``     sum(lambda) = 0 and every A column sums to zero.
    ``thm5_damped``        as ``thm5_necessary``, built from a damped LV core
                           ``-c I + c/(n-1) (1 - I)`` with c n/(n-1) <= 3/4,
                           plus ``m`` small extra quasimonomials with exponents
                           in [0, 1/2]; orbits started near x = 1 stay bounded.
    """
    match = _SYMPLECTIC_RE.match(profile)
    if match:
        profile, s = "symplectic", int(match.group(1))
    if profile not in PROFILES:
        raise InvalidParameter(f"unknown profile {profile!r}")
    rng = np.random.default_rng(seed)
    lo, hi = entry_range
    if hi <= lo:
        raise InvalidParameter("entry_range must be a non-empty interval")
    den = denominator
    if b_range is None:
        # symplectic maps get non-negative exponents so the n-dimensional test applies
        b_range = (0, hi) if nonneg_b or profile == "symplectic" else (lo, hi)
    blo, bhi = b_range
    g = lambda size=None, nonzero=False: _grid(rng, lo, hi, den, size, nonzero)  # noqa: E731

    if profile == "example1_family":
        return make_example1(g(), g(), g(nonzero=True))
    if profile == "example2_family":
        a14, a24 = g(), g()
        while a14 == 0 and a24 == 0:
            a14, a24 = g(), g()
        return make_example2(g(), g(), g(nonzero=True), a14, a24)

    if profile == "symplectic":
        if s is None:
            s = n // 2 if n else 1
        if s < 1 or (n is not None and n != 2 * s):
            raise InvalidParameter("symplectic profile needs n = 2s with s >= 1")
        n = 2 * s
    if profile == "thm1_conservative" and n not in (None, 2):
        raise InvalidParameter("thm1_conservative requires n = 2")
    if profile == "thm1_conservative":
        n = 2
    if n is None:
        n = 3
    if profile == "lv":
        if m not in (None, n):
            raise InvalidParameter("lv profile requires m = n")
        m = n
    if m is None:
        m = int(rng.integers(1, 4))

    if profile == "thm5_damped":
        if n < 2:
            raise InvalidParameter("thm5_damped requires n >= 2")
        small = (lo / 16, hi / 16)
        lam = _grid(rng, *small, den * 16, size=n)
        lam[-1] = -sum(lam[:-1], Fraction(0))
        c = Fraction(int(rng.integers(3, 7)), 8) * Fraction(n - 1, n)
        core_A = [[-c if i == j else c / (n - 1) for j in range(n)] for i in range(n)]
        extra = _grid(rng, *small, den * 16, size=(n - 1, m))
        extra = np.vstack([extra, [-sum(extra[:, j], Fraction(0)) for j in range(m)]])
        rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for _ in range(1000):
            if len(rows) == n + m:
                break
            row = list(_grid(rng, 0, Fraction(1, 2), den, size=n))
            if any(row) and row not in rows:
                rows.append(row)
        keep = [j for j in range(m) if any(extra[:, j])]
        A = [core_A[i] + [extra[i, j] for j in keep] for i in range(n)]
        B = rows[:n] + [rows[n + j] for j in keep]
        return validate(n, len(B), list(lam), A, B)

    if profile == "unconstrained":
        lam = g(size=n)
        A = _nonzero_columns(rng, n, m, lo, hi, den)
        B = _distinct_rows(rng, m, n, blo, bhi, den)
    elif profile == "lv":
        lam = g(size=n)
        A = _nonzero_columns(rng, n, n, lo, hi, den)
        B = np.eye(n, dtype=int).tolist()
    elif profile == "thm5_necessary":
        lam = g(size=n)
        lam[-1] = -sum(lam[:-1], Fraction(0))
        A = _nonzero_columns(rng, n - 1, m, lo, hi, den) if n > 1 else None
        if A is None:
            raise InvalidParameter("thm5_necessary requires n >= 2")
        A = np.vstack([A, [-sum(A[:, j], Fraction(0)) for j in range(m)]])
        B = _distinct_rows(rng, m, n, blo, bhi, den)
    elif profile == "thm1_conservative":
        l1 = g()
        lam = [l1, -l1]
        a = g(size=m, nonzero=True)
        A = [list(a), [-v for v in a]]
        values = [b for b in (Fraction(k, den) for k in range(int(np.ceil(blo * den)),
                                                                int(np.floor(bhi * den)) + 1))
                  if b != 0]
        if len(values) < m:
            raise InvalidParameter("b_range too narrow for m distinct rows")
        b = rng.choice(len(values), size=m, replace=False)
        B = [[values[k], values[k]] for k in b]
    else:  # symplectic
        lam_top = g(size=s)
        lam = list(lam_top) + [-v for v in lam_top]
        A = np.full((n, m), Fraction(0), dtype=object)
        B = np.full((m, n), Fraction(0), dtype=object)
        values = [Fraction(k, den) for k in range(int(np.ceil(blo * den)),
                                                  int(np.floor(bhi * den)) + 1) if k != 0]
        slots = [(i, b) for i in range(s) for b in values]
        if len(slots) < m:
            raise InvalidParameter("not enough distinct (index, exponent) pairs for m")
        for p, k in enumerate(rng.choice(len(slots), size=m, replace=False)):
            i, b = slots[k]
            a = g(nonzero=True)
            A[i, p], A[s + i, p] = a, -a
            B[p, i] = B[p, s + i] = b
    return validate(n, m, list(lam), np.asarray(A, dtype=object).tolist(),
                    np.asarray(B, dtype=object).tolist())
