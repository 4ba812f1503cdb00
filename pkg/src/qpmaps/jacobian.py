"""Jacobian of a QP map in x-coordinates, its determinant, and checks on it.

With phi_i = lambda_i + (A Q)_i and K = A diag(Q) B the Jacobian is

    J_ij = exp(phi_i) * (delta_ij + x_i K_ij / x_j),

so ``det J = exp(sum_i phi_i) * det(I + K)`` (the x-scaling is a similarity).
The determinant is always evaluated in that factored form, which keeps the
exponential growth out of the LU factorization.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import scalar as sc
from .core import EXP_LIMIT, eval_quasimonomials
from .errors import ConditionTwoViolated, DimensionMismatch, IndexOutOfRange, OverflowGuard, WrongDimension


@dataclass(frozen=True)
class JacobianEval:
    J: np.ndarray
    det: float
    K: np.ndarray
    Q: np.ndarray
    phi: np.ndarray


def _phi_sum(qp, Q, exp_limit):
    s = qp.lam_sum_f + Q @ qp.A_colsum_f
    if np.any(np.abs(s) > exp_limit):
        raise OverflowGuard(f"sum of exponents {np.max(np.abs(s)):.4g} exceeds {exp_limit}")
    return s


def analytic_jacobian(qp, u, *, exp_limit=EXP_LIMIT):
    """Exact-formula Jacobian at the log-state ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (qp.n,):
        raise DimensionMismatch(f"state has shape {u.shape}, expected ({qp.n},)")
    x = np.exp(u)
    Q = eval_quasimonomials(qp, u, exp_limit=exp_limit)
    phi = qp.lam_f + qp.A_f @ Q
    if np.any(np.abs(phi) > exp_limit):
        raise OverflowGuard(f"exponent {np.max(np.abs(phi)):.4g} exceeds {exp_limit}")
    K = (qp.A_f * Q) @ qp.B_f
    J = np.exp(phi)[:, None] * (np.eye(qp.n) + x[:, None] * K / x[None, :])
    det = float(np.exp(_phi_sum(qp, Q, exp_limit)) * np.linalg.det(np.eye(qp.n) + K))
    return JacobianEval(J, det, K, Q, phi)


def jacobian_det(qp, u, *, exp_limit=EXP_LIMIT):
    """Determinant of the Jacobian at one state (n,) or a batch (N, n)."""
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    U = np.atleast_2d(u)
    Q = eval_quasimonomials(qp, U, exp_limit=exp_limit)
    K = np.einsum("is,ns,sj->nij", qp.A_f, Q, qp.B_f)
    det = np.exp(_phi_sum(qp, Q, exp_limit)) * np.linalg.det(np.eye(qp.n) + K)
    return float(det[0]) if single else det


def jacobian_det_masked(qp, U, *, exp_limit=EXP_LIMIT):
    """Batch determinant that flags, instead of raising on, out-of-range points.

    Returns ``(det, ok)``; ``det`` is NaN where ``ok`` is False.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    Z = U @ qp.B_f.T
    ok = np.all(np.abs(Z) <= exp_limit, axis=1) if qp.m else np.ones(len(U), dtype=bool)
    Q = np.exp(np.where(ok[:, None], Z, 0.0))
    s = qp.lam_sum_f + Q @ qp.A_colsum_f
    ok &= np.abs(s) <= exp_limit
    K = np.einsum("is,ns,sj->nij", qp.A_f, Q, qp.B_f)
    with np.errstate(all="ignore"):
        det = np.exp(np.where(ok, s, 0.0)) * np.linalg.det(np.eye(qp.n) + K)
    ok &= np.isfinite(det)
    return np.where(ok, det, np.nan), ok


def _forward(qp, x, exp_limit):
    u = np.log(x)
    Q = eval_quasimonomials(qp, u, exp_limit=exp_limit)
    return x * np.exp(qp.lam_f + qp.A_f @ Q)


def fd_jacobian(qp, u, h=1e-6, *, exp_limit=EXP_LIMIT):
    """Central finite-difference Jacobian in x-coordinates.

    Step for column j is ``h * max(1, x_j)``, capped at ``x_j / 2`` to stay
    inside the positive orthant.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.exp(np.asarray(u, dtype=float))
    J = np.empty((qp.n, qp.n))
    for j in range(qp.n):
        hj = min(h * max(1.0, x[j]), x[j] / 2)
        xp, xm = x.copy(), x.copy()
        xp[j] += hj
        xm[j] -= hj
        J[:, j] = (_forward(qp, xp, exp_limit) - _forward(qp, xm, exp_limit)) / (2 * hj)
    return J


def compute_omega(qp, i, j, k, l):
    """det[[A_ik, A_il], [A_jk, A_jl]] * det[[B_ki, B_kj], [B_li, B_lj]] (0-based, i<j, k<l)."""
    if not (0 <= i < j < qp.n and 0 <= k < l < qp.m):
        raise IndexOutOfRange(f"need 0 <= i < j < {qp.n} and 0 <= k < l < {qp.m}, "
                              f"got ({i}, {j}, {k}, {l})")
    A, B = qp.A, qp.B
    return (A[i, k] * A[j, l] - A[i, l] * A[j, k]) * (B[k, i] * B[l, j] - B[k, j] * B[l, i])


def linear_coefficient(qp, s):
    """Coefficient of Q_s in the expanded determinant: sum_i A_is B_si."""
    return sum((qp.A[i, s] * qp.B[s, i] for i in range(qp.n)), Fraction(0))


def quadratic_coefficient(qp, k, l):
    """Coefficient of Q_k Q_l: sum over state pairs i<j of Omega_ijkl."""
    return sum((compute_omega(qp, i, j, k, l) for i, j in combinations(range(qp.n), 2)),
               Fraction(0))


@dataclass(frozen=True)
class Delta3Expansion:
    """det J = exp(lambda_sum) * (1 + sum_s lin_s Q_s + sum_{k<l} quad_kl Q_k Q_l)."""

    lambda_sum: object
    linear_coeffs: tuple
    quadratic_coeffs: dict
    constant: object = Fraction(1)

    def evaluate(self, qp, u, *, exp_limit=EXP_LIMIT):
        Q = eval_quasimonomials(qp, np.atleast_2d(np.asarray(u, dtype=float)), exp_limit=exp_limit)
        poly = float(self.constant) + Q @ np.array([float(c) for c in self.linear_coeffs])
        for (k, l), c in self.quadratic_coeffs.items():
            poly = poly + float(c) * Q[:, k] * Q[:, l]
        out = np.exp(float(self.lambda_sum)) * poly
        return float(out[0]) if np.ndim(u) == 1 else out


def delta3_expansion(qp, *, tol=sc.TOL_STRUCT):
    """Quasipolynomial expansion of det J for n = 3.

    Requires every column of A to sum to zero; otherwise the cubic
    determinant term and the exponential prefactor do not simplify and
    :class:`ConditionTwoViolated` is raised.
    """
    if qp.n != 3:
        raise WrongDimension(f"the expansion is for n = 3, got n = {qp.n}")
    for s in range(qp.m):
        if not sc.is_zero(sum(qp.A[:, s], Fraction(0)), tol):
            raise ConditionTwoViolated(f"column {s} of A does not sum to zero")
    return Delta3Expansion(
        lambda_sum=sum(qp.lam, Fraction(0)),
        linear_coeffs=tuple(linear_coefficient(qp, s) for s in range(qp.m)),
        quadratic_coeffs={(k, l): quadratic_coefficient(qp, k, l)
                          for k, l in combinations(range(qp.m), 2)},
    )
