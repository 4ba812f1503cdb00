"""Conservativity classification of QP maps and quasimonomial first integrals.

Every structural condition is a polynomial identity in the matrix entries.
Exact (rational) entries are compared exactly; float entries use ``tol``.
Witness indices are 0-based.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import scalar as sc
from .core import EXP_LIMIT, canonicalize
from .errors import InvalidParameter, OddDimension, OverflowGuard, WrongDimension
from .jacobian import compute_omega, jacobian_det_masked, linear_coefficient, quadratic_coefficient

log = logging.getLogger(__name__)

__all__ = [
    "Verdict", "Orientation", "Condition", "ClassificationReport", "IntegralBasis",
    "OracleVerdict", "OracleResult", "check_dim1", "check_thm1", "is_B_nondegenerate",
    "is_B_nonnegative", "compute_omega", "check_thm3", "check_thm5_necessary",
    "check_symplectic", "classify", "find_integrals", "sampling_oracle",
]


class Verdict(str, Enum):
    CONSERVATIVE = "Conservative"
    NOT_CONSERVATIVE = "NotConservative"
    NECESSARY_HOLD = "NecessaryConditionsHold"
    INDETERMINATE = "Indeterminate"


class Orientation(str, Enum):
    PRESERVING = "Preserving"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Condition:
    id: str
    holds: bool
    witness: tuple | None = None
    value: object = None


@dataclass(frozen=True)
class ClassificationReport:
    test: str
    verdict: Verdict
    orientation: Orientation
    conditions: tuple = ()
    hypotheses: tuple = ()

    def condition(self, cid):
        return next(c for c in self.conditions if c.id == cid)

    @property
    def failed(self):
        return tuple(c.id for c in self.conditions if not c.holds)

    @property
    def all_hold(self):
        return all(c.holds for c in self.conditions)

    def to_dict(self):
        enc = lambda v: (None if v is None else str(v) if isinstance(v, Fraction) else v)  # noqa: E731
        return {
            "test": self.test,
            "verdict": self.verdict.value,
            "orientation": self.orientation.value,
            "conditions": [{"id": c.id, "holds": c.holds,
                            "witness": list(c.witness) if c.witness is not None else None,
                            "value": enc(c.value) if not isinstance(c.value, float) else c.value}
                           for c in self.conditions],
            "hypotheses": [{"id": h, "holds": ok} for h, ok in self.hypotheses],
        }


def _report(test, conditions, hypotheses=(), *, on_success=Verdict.CONSERVATIVE):
    conditions = tuple(conditions)
    hypotheses = tuple(hypotheses)
    if not all(ok for _, ok in hypotheses):
        verdict = Verdict.INDETERMINATE
    elif all(c.holds for c in conditions):
        verdict = on_success
    else:
        verdict = Verdict.NOT_CONSERVATIVE
    orientation = Orientation.PRESERVING if verdict is Verdict.CONSERVATIVE else Orientation.UNKNOWN
    return ClassificationReport(test, verdict, orientation, conditions, hypotheses)


def _first_failure(cid, items, tol):
    """Condition that holds when every (witness, value) in ``items`` is zero."""
    for witness, value in items:
        if not sc.is_zero(value, tol):
            return Condition(cid, False, witness, value)
    return Condition(cid, True)


def _fsum(values):
    return sum(values, Fraction(0))


def _lambda_sum(qp, tol):
    return _first_failure("1", [((), _fsum(qp.lam))], tol)


def _column_sums(qp, tol):
    return _first_failure("2", (((j,), _fsum(qp.A[:, j])) for j in range(qp.m)), tol)


def check_dim1(qp, *, tol=sc.TOL_STRUCT):
    """For n = 1 only the identity map is conservative."""
    if qp.n != 1:
        raise WrongDimension(f"check_dim1 needs n = 1, got {qp.n}")
    c = canonicalize(qp, tol=tol)
    return _report("dim1", [
        _first_failure("lambda_zero", [((), c.lam[0])], tol),
        Condition("no_quasimonomials", c.m == 0, None if c.m == 0 else (c.m,)),
    ])


def check_thm1(qp, *, tol=sc.TOL_STRUCT):
    """Complete criterion for n = 2.

    Conservative iff lambda_1 + lambda_2 = 0, A_1i + A_2i = 0 and
    B_i1 = B_i2 for every quasimonomial i; the determinant is then +1.
    """
    if qp.n != 2:
        raise WrongDimension(f"check_thm1 needs n = 2, got {qp.n}")
    return _report("thm1", [
        _lambda_sum(qp, tol),
        _column_sums(qp, tol),
        _first_failure("3", (((i,), qp.B[i, 0] - qp.B[i, 1]) for i in range(qp.m)), tol),
    ])


def is_B_nonnegative(qp, *, tol=sc.TOL_STRUCT):
    return all(v >= 0 or sc.is_zero(v, tol) for v in qp.B.flat)


def is_B_nondegenerate(qp, *, tol=sc.TOL_STRUCT):
    """Whether no B row is the sum of two others and no two disjoint row pairs share a sum.

    Returns ``(ok, witness)``. The witness is ``("sum", i, j, k)`` for
    ``B_i = B_j + B_k`` or ``("pair", i, j, k, l)`` for ``B_i + B_j = B_k + B_l``.
    """
    if qp.n != 3:
        raise WrongDimension(f"non-degeneracy is defined for n = 3, got {qp.n}")
    B = qp.B
    m = qp.m
    for i in range(m):
        for j, k in combinations((r for r in range(m) if r != i), 2):
            if sc.rows_equal(B[i], B[j] + B[k], tol):
                return False, ("sum", i, j, k)
    for i, j, k, l in combinations(range(m), 4):
        for (a, b), (c, d) in (((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k))):
            if sc.rows_equal(B[a] + B[b], B[c] + B[d], tol):
                return False, ("pair", a, b, c, d)
    return True, None


def _thm3_conditions(qp, tol):
    return [
        _lambda_sum(qp, tol),
        _column_sums(qp, tol),
        _first_failure("3", (((i,), linear_coefficient(qp, i)) for i in range(qp.m)), tol),
        _first_failure("4", (((k, l), quadratic_coefficient(qp, k, l))
                             for k, l in combinations(range(qp.m), 2)), tol),
    ]


def check_thm3(qp, *, tol=sc.TOL_STRUCT):
    """Criterion for n = 3 under non-negative, non-degenerate B.

    Outside those hypotheses the verdict is Indeterminate; the conditions are
    still evaluated and reported.
    """
    if qp.n != 3:
        raise WrongDimension(f"check_thm3 needs n = 3, got {qp.n}")
    nondeg, _ = is_B_nondegenerate(qp, tol=tol)
    hypotheses = [("B_nonnegative", is_B_nonnegative(qp, tol=tol)), ("B_nondegenerate", nondeg)]
    return _report("thm3", _thm3_conditions(qp, tol), hypotheses)


def check_thm5_necessary(qp, *, tol=sc.TOL_STRUCT):
    """Necessary conditions sum(lambda) = 0 and zero A column sums, any n.

    Dimensions 1-3 are delegated to the complete classifiers. When the n = 3
    classifier is Indeterminate but B is non-negative, the necessary
    conditions are used instead.
    """
    if qp.n == 1:
        return check_dim1(qp, tol=tol)
    if qp.n == 2:
        return check_thm1(qp, tol=tol)
    if qp.n == 3:
        rep = check_thm3(qp, tol=tol)
        if rep.verdict is not Verdict.INDETERMINATE or not is_B_nonnegative(qp, tol=tol):
            return rep
    hypotheses = [("B_nonnegative", is_B_nonnegative(qp, tol=tol))]
    return _report("thm5", [_lambda_sum(qp, tol), _column_sums(qp, tol)], hypotheses,
                   on_success=Verdict.NECESSARY_HOLD)


def check_symplectic(qp, *, tol=sc.TOL_STRUCT):
    """Symplecticity conditions (a)-(d) for an even-dimensional map, n = 2s.

    A map meeting all four is conservative with determinant +1. When any
    fails the verdict is Indeterminate with the ``symplectic`` hypothesis
    false: a non-symplectic map may still be conservative.
    """
    if qp.n % 2:
        raise OddDimension(f"symplectic conditions need even n, got {qp.n}")
    s, m, A, B = qp.n // 2, qp.m, qp.A, qp.B
    conds = [
        _first_failure("a", (((i, j), A[i, j] + A[s + i, j])
                             for i in range(s) for j in range(m)), tol),
        _first_failure("b", (((i,), qp.lam[i] + qp.lam[s + i]) for i in range(s)), tol),
        _first_failure("c", (((i, j, p), v) for i in range(s) for j in range(s) if i != j
                             for p in range(m)
                             for v in (A[i, p] * B[p, j], A[i, p] * B[p, s + j])), tol),
        _first_failure("d", (((i, p), A[i, p] * (B[p, i] - B[p, s + i]))
                             for i in range(s) for p in range(m)), tol),
    ]
    ok = all(c.holds for c in conds)
    return ClassificationReport("symplectic", Verdict.CONSERVATIVE if ok else Verdict.INDETERMINATE,
                                Orientation.PRESERVING if ok else Orientation.UNKNOWN,
                                tuple(conds), (("symplectic", ok),))


def classify(qp, *, tol=sc.TOL_STRUCT):
    """Strongest applicable classifier for the map's dimension."""
    return check_thm5_necessary(qp, tol=tol)


@dataclass(frozen=True)
class IntegralBasis:
    """Exponent vectors c with c^T (lambda | A) = 0; each prod_i x_i ** c_i is invariant."""

    exponent_vectors: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.exponent_vectors)

    def __iter__(self):
        return iter(self.exponent_vectors)

    def spans(self, c, *, tol=sc.TOL_STRUCT):
        """Whether ``c`` lies in the span of the basis."""
        c = sc.vector(c)
        if not self.exponent_vectors:
            return sc.all_zero(c, tol)
        stacked = np.array([list(v) for v in self.exponent_vectors] + [list(c)], dtype=object)
        # c is in the span iff adding it leaves the rank unchanged
        rank = lambda mat: mat.shape[0] - len(sc.nullspace(mat.T, tol))  # noqa: E731
        return rank(stacked) == len(self.exponent_vectors)

    def log_values(self, u):
        """ln I_k = c_k . u for every basis vector, at one state or a trajectory."""
        u = np.asarray(u, dtype=float)
        C = np.array([[float(v) for v in c] for c in self.exponent_vectors]).reshape(-1, u.shape[-1])
        return u @ C.T


def find_integrals(qp, *, tol=sc.TOL_STRUCT):
    """Basis of the quasimonomial first integrals ``prod_i x_i ** c_i``.

    These are exactly the c with c . lambda = 0 and c^T A = 0, because then
    c . u changes by c . (lambda + A Q) = 0 at every step.
    """
    return IntegralBasis(tuple(sc.nullspace(qp.M.T, tol)))


class OracleVerdict(str, Enum):
    CONSISTENT = "ConsistentWithConservative"
    NOT_CONSERVATIVE = "NotConservative"


@dataclass(frozen=True)
class OracleResult:
    verdict: OracleVerdict
    max_deviation: float
    npoints: int
    skipped: int = 0


def sampling_oracle(qp, seed, npoints, *, box=2.0, threshold=1e-6, exp_limit=EXP_LIMIT,
                    max_draws=None):
    """Probabilistic conservativity check from sampled Jacobian determinants.

    Draws log-uniform states in ``[e^-box, e^box]^n`` and reports
    NotConservative when some ``||det J| - 1|`` exceeds ``threshold``.
    Points where an exponent overflows are skipped and redrawn.
    """
    if npoints < 1:
        raise InvalidParameter("npoints must be >= 1")
    rng = np.random.default_rng(seed)
    max_draws = max_draws or 100 * npoints
    dets, drawn = [], 0
    while sum(map(len, dets)) < npoints and drawn < max_draws:
        need = npoints - sum(map(len, dets))
        U = rng.uniform(-box, box, size=(need, qp.n))
        drawn += need
        det, ok = jacobian_det_masked(qp, U, exp_limit=exp_limit)
        dets.append(det[ok])
    det = np.concatenate(dets)
    if det.size == 0:
        raise OverflowGuard("every sampled point overflowed")
    if drawn > det.size:
        log.info("sampling oracle redrew %d points outside the exponent range", drawn - det.size)
    dev = float(np.max(np.abs(np.abs(det) - 1.0)))
    verdict = OracleVerdict.NOT_CONSERVATIVE if dev > threshold else OracleVerdict.CONSISTENT
    return OracleResult(verdict, dev, int(det.size), drawn - int(det.size))
