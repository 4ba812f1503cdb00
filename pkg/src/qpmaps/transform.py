"""Quasimonomial transformations (QMTs) x_i = prod_j y_j ** C_ij.

In log-coordinates a QMT is the linear change ``u_x = C @ u_y``; on maps it
acts by ``lambda' = C^-1 lambda``, ``A' = C^-1 A``, ``B' = B C``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import scalar as sc
from .core import EXP_LIMIT, QPMap, canonicalize, iterate
from .errors import DimensionMismatch, InvalidParameter


@dataclass(frozen=True, eq=False)
class QMT:
    C: np.ndarray
    C_inv: np.ndarray

    @property
    def n(self):
        return self.C.shape[0]

    @property
    def exact(self):
        return sc.is_exact(self.C)

    def __eq__(self, other):
        return isinstance(other, QMT) and bool(np.all(self.C == other.C))

    __hash__ = None

    def to_dict(self):
        enc = lambda v: (str(v) if isinstance(v, Fraction) else float(v))  # noqa: E731
        return {"C": [[enc(v) for v in row] for row in self.C]}


def qmt(C, *, cond_limit=sc.COND_LIMIT):
    """Build a QMT, raising :class:`SingularC` when ``C`` is not invertible."""
    C = sc.matrix(C)
    return QMT(C, sc.inverse(C, cond_limit=cond_limit))


def qmt_from_inverse(C_inv):
    """Build a QMT from the matrix of its inverse, as reductions specify it."""
    T = qmt(C_inv)
    return QMT(T.C_inv, T.C)


def identity_qmt(n):
    I = sc.identity(n)
    return QMT(I, I)


def _snap(arr, scale, tol):
    """Zero float entries that are rounding residue of exact cancellations."""
    out = np.array(arr, dtype=object)
    for idx, v in np.ndenumerate(out):
        if not isinstance(v, Fraction) and abs(v) <= tol * scale:
            out[idx] = 0.0
    return out


def apply_qmt(qp, T, *, tol=sc.TOL_STRUCT, log=None):
    """Transformed map (C^-1 lambda, C^-1 A, B C), canonicalized.

    Exact when map and QMT are rational. For float inputs, entries below
    ``tol`` times the magnitude of their operands are set to zero before
    canonicalization. Canonicalization events are appended to ``log``.
    """
    if T.n != qp.n:
        raise DimensionMismatch(f"QMT has n={T.n}, map has n={qp.n}")
    M = sc.product(T.C_inv, qp.M)
    B = sc.product(qp.B, T.C) if qp.m else qp.B
    exact = qp.exact and T.exact
    if not exact:
        cscale = float(np.max(np.abs(sc.as_float(T.C_inv)))) or 1.0
        mscale = float(np.max(np.abs(sc.as_float(qp.M)), initial=0.0)) or 1.0
        M = _snap(M, cscale * mscale * qp.n, tol)
        bscale = float(np.max(np.abs(sc.as_float(qp.B)), initial=0.0)) or 1.0
        B = _snap(B, bscale * float(np.max(np.abs(sc.as_float(T.C)))) * qp.n, tol)
    raw = QPMap(sc.vector(M[:, 0]), sc.matrix(M[:, 1:].tolist(), (qp.n, qp.m))
                if qp.m else qp.A, sc.matrix(B.tolist(), (qp.m, qp.n)) if qp.m else qp.B)
    return canonicalize(raw, log=log)


def transform_state(T, u_y):
    """Log-state in x-coordinates of the y-state ``u_y``: ``C @ u_y``."""
    u_y = np.asarray(u_y, dtype=float)
    if u_y.shape[-1] != T.n:
        raise DimensionMismatch("state and QMT dimensions differ")
    return u_y @ sc.as_float(T.C).T


def inverse_transform_state(T, u_x):
    """Log-state in y-coordinates of the x-state ``u_x``: ``C^-1 @ u_x``."""
    u_x = np.asarray(u_x, dtype=float)
    if u_x.shape[-1] != T.n:
        raise DimensionMismatch("state and QMT dimensions differ")
    return u_x @ sc.as_float(T.C_inv).T


def compose(T1, T2):
    """QMT equal to applying ``T2`` first and then ``T1``.

    ``apply_qmt(apply_qmt(qp, T2), T1) == apply_qmt(qp, compose(T1, T2))``;
    the composite matrix is ``C2 @ C1``.
    """
    if T1.n != T2.n:
        raise DimensionMismatch("QMTs of different dimension")
    return QMT(sc.product(T2.C, T1.C), sc.product(T1.C_inv, T2.C_inv))


@dataclass(frozen=True, eq=False)
class ClassInvariant:
    """The product B @ M = (B lambda | B A), shared by every map in a QMT class."""

    BM: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, ClassInvariant) and self.BM.shape == other.BM.shape
                and bool(np.all(self.BM == other.BM)))

    __hash__ = None

    def matches(self, other, tol=0.0):
        """Entrywise equality up to ``tol * max(1, |entry|)``; exact when ``tol`` is 0."""
        if self.BM.shape != other.BM.shape:
            return False
        if tol == 0.0:
            return self == other
        a, b = sc.as_float(self.BM), sc.as_float(other.BM)
        return bool(np.all(np.abs(a - b) <= tol * np.maximum(1.0, np.abs(a))))


def class_invariant(qp):
    if qp.m == 0:
        return ClassInvariant(np.empty((0, 1), dtype=object))
    return ClassInvariant(sc.product(qp.B, qp.M))


def check_conjugacy(qp, T, u0, steps, *, exp_limit=EXP_LIMIT):
    """Largest ``|u_x(t) - C u_y(t)|_inf`` over ``steps`` iterations.

    ``u0`` is the initial x-state; the transformed map starts from its
    pull-back ``C^-1 u0``.
    """
    if steps < 1:
        raise InvalidParameter("steps must be >= 1")
    image = apply_qmt(qp, T)
    tx = iterate(qp, u0, steps, exp_limit=exp_limit)
    ty = iterate(image, inverse_transform_state(T, u0), steps, exp_limit=exp_limit)
    return float(np.max(np.abs(tx.u - transform_state(T, ty.u))))
