"""Closed-form solution in dimension 2 and reduction of conservative maps by one dimension.

Both rest on the invariant prod_i x_i of maps whose lambda and A columns sum
to zero: a QMT turns that product into a coordinate that never moves, and
freezing it leaves an (n-1)-dimensional QP map on each level set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import scalar as sc
from .classify import Verdict, check_thm1
from .core import EXP_LIMIT, QPMap, Trajectory, canonicalize, iterate
from .errors import ConditionsNotMet, DimensionMismatch, InvalidParameter, NotConservative2D, OverflowGuard
from .transform import apply_qmt, inverse_transform_state, qmt_from_inverse, transform_state


@dataclass(frozen=True)
class ClosedForm2D:
    """x_1(t) = x_1(0) k**t, x_2(t) = x_2(0) k**-t, stored with ``log_k = ln k``."""

    log_k: float
    u0: np.ndarray

    @property
    def k(self):
        return float(np.exp(self.log_k))

    def at(self, t):
        """Log-state(s) at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        return self.u0 + np.multiply.outer(t, np.array([self.log_k, -self.log_k]))

    def describe(self):
        x1, x2 = np.exp(self.u0)
        return (f"x1(t) = {x1:.17g} * k**t, x2(t) = {x2:.17g} * k**(-t), "
                f"k = exp({self.log_k:.17g}) = {self.k:.17g}")


def solve_2d(qp, u0, *, tol=sc.TOL_STRUCT, exp_limit=EXP_LIMIT):
    """Closed-form orbit of a conservative two-dimensional map from log-state ``u0``.

    ``k = exp(lambda_1 + sum_j A_1j (x_1(0) x_2(0)) ** B_j1)``; k depends on
    the level set of x_1 x_2, so it is bound to ``u0``.
    """
    if check_thm1(qp, tol=tol).verdict is not Verdict.CONSERVATIVE:
        raise NotConservative2D("map does not satisfy the two-dimensional criterion")
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (2,):
        raise DimensionMismatch("u0 must have length 2")
    z = qp.B_f[:, 0] * (u0[0] + u0[1])
    if z.size and np.max(np.abs(z)) > exp_limit:
        raise OverflowGuard("quasimonomial exponent out of range")
    log_k = float(qp.lam_f[0] + qp.A_f[0] @ np.exp(z))
    return ClosedForm2D(log_k, u0)


def leaf_qmt(n):
    """QMT whose inverse is the identity with its last row replaced by ones.

    Its last y-coordinate is prod_i x_i.
    """
    C_inv = [[int(i == j) for j in range(n)] for i in range(n - 1)] + [[1] * n]
    return qmt_from_inverse(C_inv)


@dataclass(frozen=True, eq=False)
class ReductionResult:
    source: QPMap
    qmt: object
    transformed: QPMap
    log_constant: float
    reduced_map: QPMap
    lift_data: dict = field(default_factory=dict)

    @property
    def constant_coordinate(self):
        """Value of y_n = prod_i x_i(0)."""
        return float(np.exp(self.log_constant))

    def initial_state(self, u0):
        """Reduced log-state corresponding to the full x-state ``u0``."""
        return inverse_transform_state(self.qmt, u0)[:-1]


def reduce_conservative(qp, u0, *, tol=sc.TOL_STRUCT):
    """Reduce a map with sum(lambda) = 0 and zero A column sums to n-1 dimensions.

    Returns the (n-1)-dimensional map on the level set through ``u0`` with
    rescaled coefficients ``A~_ij = A_ij * y_n(0) ** B'_jn``. Raises
    :class:`ConditionsNotMet` naming the failing condition(s).
    """
    if qp.n < 2:
        raise InvalidParameter("reduction needs n >= 2")
    failed = []
    if not sc.is_zero(sum(qp.lam, Fraction(0)), tol):
        failed.append("1")
    if any(not sc.is_zero(sum(qp.A[:, j], Fraction(0)), tol) for j in range(qp.m)):
        failed.append("2")
    if failed:
        raise ConditionsNotMet(failed)
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (qp.n,):
        raise DimensionMismatch(f"u0 must have length {qp.n}")

    n = qp.n
    T = leaf_qmt(n)
    image = apply_qmt(qp, T, tol=tol)
    if not sc.all_zero(image.M[n - 1], tol * max(1.0, float(np.max(np.abs(qp.lam_f), initial=0.0)),
                                                   float(np.max(np.abs(qp.A_f), initial=0.0)))):
        raise ConditionsNotMet(["last row of the transformed (lambda | A) is not zero"])
    log_c = float(np.sum(u0))
    last = image.B[:, n - 1] if image.m else ()
    factors = [Fraction(1) if (log_c == 0.0 or b == 0) else float(np.exp(float(b) * log_c))
               for b in last]
    A_red = [[image.A[i, j] * factors[j] for j in range(image.m)] for i in range(n - 1)]
    B_red = image.B[:, : n - 1] if image.m else np.empty((0, n - 1), dtype=object)
    raw = QPMap(sc.vector(image.lam[: n - 1]),
                sc.matrix(A_red, (n - 1, image.m)) if image.m else np.empty((n - 1, 0), dtype=object),
                sc.matrix(B_red.tolist(), (image.m, n - 1)) if image.m else B_red)
    events = []
    reduced = canonicalize(raw, log=events)
    lift = {"last_column_exponents": tuple(last), "canonicalize": tuple(events)}
    return ReductionResult(qp, T, image, log_c, reduced, lift)


def lift_trajectory(red, reduced_traj):
    """Full n-dimensional orbit from an orbit of the reduced map."""
    u = np.asarray(reduced_traj.u if isinstance(reduced_traj, Trajectory) else reduced_traj, dtype=float)
    if u.ndim != 2 or u.shape[1] != red.reduced_map.n:
        raise DimensionMismatch(f"expected states of length {red.reduced_map.n}")
    u_y = np.hstack([u, np.full((u.shape[0], 1), red.log_constant)])
    return Trajectory(transform_state(red.qmt, u_y), red.source)


class CoordinateKind(str, Enum):
    CONSTANT = "CONSTANT"
    GEOMETRIC = "GEOMETRIC"
    COUPLED = "COUPLED"


@dataclass(frozen=True, eq=False)
class CoordinateAnalysis:
    """Coordinate-by-coordinate structure of a transformed map.

    CONSTANT coordinates never move. GEOMETRIC coordinates follow
    ``y_i(t) = y_i(0) * mu_i ** t`` with ``ln mu_i = log_rates[i]``. COUPLED
    coordinates form the residual subsystem; ``effective_lambda[i]`` absorbs
    every quasimonomial that depends on constant coordinates only, and the
    remaining terms (time dependent in general) are listed in
    ``residual_terms[i]`` as ``(A'_ij, j)``.
    """

    qmt: object
    transformed: QPMap
    u0: np.ndarray
    kinds: tuple
    log_rates: dict
    effective_lambda: dict
    residual_terms: dict

    def indices(self, kind):
        return tuple(i for i, k in enumerate(self.kinds) if k is CoordinateKind(kind))

    @property
    def residual(self):
        return self.indices(CoordinateKind.COUPLED)

    def rate(self, i):
        return float(np.exp(self.log_rates[i]))

    def simulate(self, steps, *, exp_limit=EXP_LIMIT):
        """Iterate the decomposition: frozen constants, closed-form geometric
        coordinates, and the residual coordinates stepped explicitly."""
        qp = self.transformed
        out = np.empty((steps + 1, qp.n))
        out[0] = self.u0
        const = list(self.indices(CoordinateKind.CONSTANT))
        geo = list(self.indices(CoordinateKind.GEOMETRIC))
        res = list(self.residual)
        for t in range(steps):
            cur, nxt = out[t], out[t + 1]
            nxt[const] = self.u0[const]
            for i in geo:
                nxt[i] = self.u0[i] + (t + 1) * self.log_rates[i]
            for i in res:
                acc = self.effective_lambda[i]
                for a, j in self.residual_terms[i]:
                    z = float(qp.B_f[j] @ cur)
                    if abs(z) > exp_limit:
                        raise OverflowGuard("quasimonomial exponent out of range", t=t)
                    acc += a * np.exp(z)
                nxt[i] = cur[i] + acc
        return Trajectory(out, qp)


def reduce_with_qmt(qp, T, u0, *, tol=sc.TOL_STRUCT):
    """Apply a user-chosen QMT and classify the transformed coordinates.

    ``u0`` is the initial x-state; constants and rates are evaluated at its
    pull-back ``C^-1 u0``.
    """
    image = apply_qmt(qp, T, tol=tol)
    u_y = inverse_transform_state(T, np.asarray(u0, dtype=float))
    n, m = image.n, image.m
    const = {i for i in range(n) if sc.all_zero(image.M[i], tol)}
    const_only = [all(sc.is_zero(image.B[j, k], tol) for k in range(n) if k not in const)
                  for j in range(m)]
    frozen = [float(np.exp(image.B_f[j] @ u_y)) if const_only[j] else None for j in range(m)]

    kinds, rates, eff, terms = [], {}, {}, {}
    for i in range(n):
        if i in const:
            kinds.append(CoordinateKind.CONSTANT)
            continue
        active = [j for j in range(m) if not sc.is_zero(image.A[i, j], tol)]
        lam_eff = float(image.lam_f[i]) + sum(image.A_f[i, j] * frozen[j]
                                              for j in active if const_only[j])
        coupled = [(float(image.A_f[i, j]), j) for j in active if not const_only[j]]
        if coupled:
            kinds.append(CoordinateKind.COUPLED)
            eff[i] = float(lam_eff)
            terms[i] = tuple(coupled)
        else:
            kinds.append(CoordinateKind.GEOMETRIC)
            rates[i] = float(lam_eff)
    return CoordinateAnalysis(T, image, u_y, tuple(kinds), rates, eff, terms)
