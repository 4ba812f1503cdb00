import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qpmaps as q
from qpmaps.errors import (DimensionMismatch, DuplicateBRows, InvalidParameter, OverflowGuard,
                           ZeroColumnInA, ZeroRowInB)


class TestValidate:
    def test_valid_map(self):
        qp = q.validate(2, 1, [0, 0], [[1], [-1]], [[1, 1]])
        assert (qp.n, qp.m) == (2, 1)
        assert qp.exact

    def test_float_entries_reported_inexact(self):
        assert not q.validate(2, 1, [0.0, 0], [[1], [-1]], [[1, 1]]).exact

    def test_zero_column(self):
        with pytest.raises(ZeroColumnInA) as err:
            q.validate(2, 1, [0, 0], [[0], [0]], [[1, 1]])
        assert err.value.column == 0

    def test_zero_row(self):
        with pytest.raises(ZeroRowInB) as err:
            q.validate(2, 2, [0, 0], [[1, 1], [1, 1]], [[1, 0], [0, 0]])
        assert err.value.row == 1

    def test_duplicate_rows(self):
        with pytest.raises(DuplicateBRows) as err:
            q.validate(3, 2, [0, 0, 0], [[1, 1], [0, 1], [0, 0]], [[0, 0, 1], [0, 0, 1]])
        assert err.value.pair == (0, 1)

    @pytest.mark.parametrize("args", [
        (2, 1, [0], [[1], [1]], [[1, 1]]),
        (2, 1, [0, 0], [[1, 2], [1, 2]], [[1, 1]]),
        (2, 1, [0, 0], [[1], [1]], [[1, 1, 1]]),
    ])
    def test_dimension_mismatch(self, args):
        with pytest.raises(DimensionMismatch):
            q.validate(*args)

    def test_m_zero_allowed(self):
        qp = q.validate(1, 0, [0.2], [[]], None)
        assert qp.m == 0 and qp.M.shape == (1, 1)


class TestQuasimonomials:
    def test_unit_third_coordinate(self):
        qp = q.qpmap([0, 0, 0], [[1], [0], [0]], [[0, 0, 1]])
        assert q.eval_quasimonomials(qp, [3.1, -2.0, 0.0]).tolist() == [1.0]

    def test_product(self):
        qp = q.qpmap([0, 0], [[1], [-1]], [[1, 1]])
        assert q.eval_quasimonomials(qp, np.log([2, 3]))[0] == pytest.approx(6, rel=1e-15)

    def test_example2_unit_point(self, example2):
        assert q.eval_quasimonomials(example2, np.zeros(3)).tolist() == [1.0, 1.0]

    def test_overflow_guard(self):
        qp = q.qpmap([0], [[1]], [[1]])
        with pytest.raises(OverflowGuard):
            q.eval_quasimonomials(qp, [701.0])
        q.eval_quasimonomials(qp, [701.0], exp_limit=705)


class TestStep:
    def test_pure_scaling(self):
        qp = q.validate(1, 0, [0.2], [[]], None)
        assert q.step(qp, [0.0]).tolist() == [0.2]

    def test_m_zero_is_exact_addition(self, rng):
        qp = q.validate(3, 0, [0.1, -0.7, 1e-3], [[]] * 3, None)
        u = rng.normal(size=3)
        assert np.array_equal(q.step(qp, u), u + np.array([0.1, -0.7, 1e-3]))

    def test_example1_from_unit_point(self):
        qp = q.make_example1(0.1, -0.05, 0.7)
        x = np.exp(q.step(qp, np.zeros(3)))
        expected = [math.exp(0.8), math.exp(-0.75), math.exp(-0.05)]
        np.testing.assert_allclose(x, expected, rtol=1e-15)
        assert np.prod(x) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.5])
    def test_scalar_identity(self, c):
        qp = q.qpmap([0], [[1]], [[1]])
        # x' = x * exp(x) evaluated directly in x-space
        assert q.step(qp, [math.log(c)])[0] == pytest.approx(math.log(c * math.exp(c)), rel=1e-14)


class TestIterate:
    def test_identity_map_constant(self):
        qp = q.validate(1, 0, [0], [[]], None)
        traj = q.iterate(qp, [0.7], 10)
        assert len(traj) == 11 and np.all(traj.u == 0.7)

    def test_thm1_map_growth(self, thm1_map):
        traj = q.iterate(thm1_map, [0.0, 0.0], 5)
        x1, x2 = 1.0, 1.0
        for t in range(1, 6):
            q1 = (x1 * x2) ** 2
            x1, x2 = x1 * math.exp(0.3 + 1.5 * q1), x2 * math.exp(-0.3 - 1.5 * q1)
            assert traj.x[t, 0] == pytest.approx(x1, rel=1e-12)
            assert traj.x[t, 0] == pytest.approx(math.exp(1.8 * t), rel=1e-12)

    def test_example1_product_conserved(self, rng):
        qp = q.make_example1(0.1, -0.05, 0.7)
        u0 = rng.uniform(-1, 1, 3)
        s = q.iterate(qp, u0, 100).u.sum(axis=1)
        assert np.max(np.abs(s - s[0])) <= 1e-10

    def test_errors_carry_time_index(self):
        qp = q.qpmap([0], [[1]], [[1]])
        with pytest.raises(OverflowGuard) as err:
            q.iterate(qp, [1.0], 50)
        assert err.value.t is not None and err.value.t > 0

    def test_rejects_zero_steps(self):
        with pytest.raises(InvalidParameter):
            q.iterate(q.qpmap([0], [[1]], [[1]]), [0.0], 0)

    def test_deterministic(self, example2):
        a = q.iterate(example2, [0.1, 0.2, -0.3], 30)
        b = q.iterate(example2, [0.1, 0.2, -0.3], 30)
        assert np.array_equal(a.u, b.u)


def _raw(lam, A, B):
    from qpmaps import scalar as sc
    n, m = len(lam), len(B)
    return q.QPMap(sc.vector(lam), sc.matrix(A, (n, m)), sc.matrix(B, (m, n)))


class TestCanonicalize:
    def test_merge_duplicates(self):
        out = q.canonicalize(_raw([0, 0], [[1, 2], [3, 4]], [[1, 0], [1, 0]]))
        assert out.B.tolist() == [[1, 0]] and out.A.tolist() == [[3], [7]]

    def test_fold_zero_row(self):
        log = []
        out = q.canonicalize(_raw([F(1), F(2)], [[5, 1], [6, 1]], [[0, 0], [1, 1]]), log=log)
        assert out.lam.tolist() == [6, 8] and out.m == 1
        assert ("fold", 0) in log

    def test_drop_zero_column(self):
        out = q.canonicalize(_raw([0, 0], [[0, 1], [0, 1]], [[1, 0], [1, 1]]))
        assert out.B.tolist() == [[1, 1]]

    def test_zero_state_column_kept(self):
        qp = q.qpmap([0, F(3, 10)], [[0], [F(3, 2)]], [[2, 0]])
        assert q.canonicalize(qp) == qp

    def test_merge_to_zero_then_drop(self):
        out = q.canonicalize(_raw([0, 0], [[1, -1], [2, -2]], [[1, 1], [1, 1]]))
        assert out.m == 0


def _messy_maps():
    """Dimension-consistent maps with duplicate/zero rows and zero columns."""
    small = st.integers(-2, 2).map(lambda k: F(k, 2))
    return st.integers(1, 3).flatmap(lambda n: st.integers(0, 5).flatmap(lambda m: st.tuples(
        st.lists(small, min_size=n, max_size=n),
        st.lists(st.lists(small, min_size=m, max_size=m), min_size=n, max_size=n),
        st.lists(st.lists(st.integers(0, 1).map(F), min_size=n, max_size=n), min_size=m, max_size=m),
    ))).filter(lambda t: len(t[2]) > 0)


@settings(max_examples=100, deadline=None)
@given(_messy_maps(), st.lists(st.floats(-1, 1), min_size=20 * 3, max_size=20 * 3))
def test_canonicalize_preserves_mapping_and_is_idempotent(raw, flat):
    lam, A, B = raw
    qp = _raw(lam, A, B)
    c = q.canonicalize(qp)
    assert q.canonicalize(c) == c
    U = np.array(flat).reshape(20, 3)[:, : qp.n]
    naive = U + qp.lam_f + np.exp(U @ qp.B_f.T) @ qp.A_f.T
    np.testing.assert_allclose(q.step(c, U), naive, rtol=0, atol=1e-12)


class TestLotkaVolterra:
    def test_identity_b(self):
        qp = q.random_map(0, n=3, profile="lv")
        assert q.is_lotka_volterra(qp)

    def test_example1_not_lv(self, example1):
        assert not q.is_lotka_volterra(example1)

    def test_m_zero(self):
        assert not q.is_lotka_volterra(q.validate(2, 0, [0, 0], [[]] * 2, None))


class TestConstructors:
    def test_example1_matrices(self):
        qp = q.make_example1(F(1, 10), F(-1, 20), F(7, 10))
        assert qp.lam.tolist() == [F(1, 10), F(-1, 20), F(-1, 20)]
        assert qp.A.tolist() == [[F(7, 10)], [F(-7, 10)], [0]]
        assert qp.B.tolist() == [[0, 0, 1]]

    def test_example2_matrices(self, example2):
        assert example2.lam.tolist() == [F(1, 10), F(1, 5), F(-3, 10)]
        assert example2.A.tolist() == [[F(1, 2), F(3, 10)], [F(-1, 2), F(-1, 10)], [0, F(-1, 5)]]
        assert example2.B.tolist() == [[0, 0, 1], [1, 1, 1]]

    def test_example1_zero_coefficient(self):
        with pytest.raises(InvalidParameter):
            q.make_example1(0.1, 0.2, 0)

    def test_example2_zero_column(self):
        with pytest.raises(InvalidParameter):
            q.make_example2(0.1, 0.2, 0.5, 0, 0)


class TestRandomMap:
    @pytest.mark.parametrize("profile", ["unconstrained", "thm1_conservative", "example1_family",
                                         "example2_family", "lv", "symplectic(2)", "thm5_necessary",
                                         "thm5_damped"])
    def test_deterministic_in_seed(self, profile):
        assert q.random_map(11, profile=profile) == q.random_map(11, profile=profile)

    def test_lv_2d_not_conservative(self):
        qp = q.random_map(1, n=2, profile="lv")
        assert q.check_thm1(qp).verdict is q.Verdict.NOT_CONSERVATIVE

    def test_thm1_profile_unit_determinant(self):
        qp = q.random_map(7, profile="thm1_conservative")
        U = np.random.default_rng(7).uniform(-2, 2, size=(100, 2))
        assert np.max(np.abs(q.jacobian_det(qp, U) - 1)) <= 1e-12

    def test_symplectic_profile_meets_necessary_conditions(self):
        qp = q.random_map(3, profile="symplectic(2)")
        assert qp.n == 4
        assert sum(qp.lam) == 0
        assert all(sum(qp.A[:, j]) == 0 for j in range(qp.m))

    def test_impossible_profile(self):
        with pytest.raises(InvalidParameter):
            q.random_map(0, n=3, profile="thm1_conservative")
        with pytest.raises(InvalidParameter):
            q.random_map(0, profile="nonsense")
