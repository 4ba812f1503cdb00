import math
from fractions import Fraction as F

import numpy as np
import pytest

import qpmaps as q
from qpmaps import CoordinateKind as K
from qpmaps.errors import ConditionsNotMet, NotConservative2D

C2 = [[1, -1, -1], [0, 1, 0], [0, 0, 1]]


class TestSolve2D:
    def test_first_example(self, thm1_map):
        cf = q.solve_2d(thm1_map, [0.0, 0.0])
        assert cf.log_k == pytest.approx(1.8, abs=1e-15)
        u = q.iterate(thm1_map, [0.0, 0.0], 5).u
        assert np.exp(cf.at(5)[0]) == pytest.approx(math.exp(9), rel=1e-12)
        assert np.exp(u[5, 0]) == pytest.approx(math.exp(9), rel=1e-12)

    def test_second_example(self):
        qp = q.qpmap([0, 0], [[1], [-1]], [[1, 1]])
        cf = q.solve_2d(qp, [0.0, 0.0])
        assert cf.k == pytest.approx(math.e, rel=1e-15)
        assert np.exp(q.iterate(qp, [0.0, 0.0], 3).u[3, 1]) == pytest.approx(math.exp(-3), rel=1e-12)

    def test_unit_k_is_constant(self):
        # lambda1 + A11 * (x1 x2) ** B11 = 0.5 - 0.5 * 1 = 0 at x1 x2 = 1
        qp = q.qpmap([F(1, 2), F(-1, 2)], [[F(-1, 2)], [F(1, 2)]], [[3, 3]])
        cf = q.solve_2d(qp, [0.4, -0.4])
        assert cf.log_k == 0.0
        u = q.iterate(qp, [0.4, -0.4], 10).u
        assert np.all(np.abs(u - u[0]) <= 1e-15)

    def test_not_conservative(self):
        with pytest.raises(NotConservative2D):
            q.solve_2d(q.qpmap([0, 0], [[0, 1], [1, 0]], [[1, 0], [0, 1]]), [0.0, 0.0])

    def test_matches_iteration(self, rng):
        for seed in range(30):
            qp = q.random_map(seed, profile="thm1_conservative")
            u0 = rng.uniform(-0.5, 0.5, 2)
            cf = q.solve_2d(qp, u0)
            u = q.iterate(qp, u0, 30).u
            t = np.arange(31)
            assert np.all(np.abs(u - cf.at(t)) <= 1e-9 * np.maximum(1, np.abs(t * cf.log_k))[:, None])

    def test_describe(self, thm1_map):
        assert "k**t" in q.solve_2d(thm1_map, [0.0, 0.0]).describe()


class TestReduceConservative:
    def test_unit_leaf(self, example1):
        u0 = np.array([0.5, -0.25, -0.25])
        red = q.reduce_conservative(example1, u0)
        rm = red.reduced_map
        assert rm.n == 2 and rm.exact
        assert list(rm.lam) == [F(1, 10), F(-1, 20)]
        assert rm.A.tolist() == [[F(7, 10)], [F(-7, 10)]]
        assert rm.B.tolist() == [[-1, -1]]
        assert red.constant_coordinate == pytest.approx(1.0)

    def test_rescaled_leaf(self, example1):
        c = 2.5
        u0 = np.array([0.2, 0.1, math.log(c) - 0.3])
        red = q.reduce_conservative(example1, u0)
        assert red.lift_data["last_column_exponents"] == (1,)
        assert red.reduced_map.A_f[:, 0] == pytest.approx([0.7 * c, -0.7 * c], rel=1e-14)
        assert red.constant_coordinate == pytest.approx(c, rel=1e-14)

    def test_example2_rescaling(self, example2):
        u0 = np.array([0.2, 0.1, 0.4])
        red = q.reduce_conservative(example2, u0)
        c = math.exp(0.7)
        # B' = B C: (0,0,1) -> (-1,-1,1), (1,1,1) -> (0,0,1)
        assert red.lift_data["last_column_exponents"] == (1, 1)
        # the second quasimonomial loses its x-dependence and folds into lambda
        rm = red.reduced_map
        assert rm.m == 1 and red.lift_data["canonicalize"] == (("fold", 1),)
        assert np.allclose(rm.lam_f, [0.1 + 0.3 * c, 0.2 - 0.1 * c], rtol=1e-14)
        assert np.allclose(rm.A_f[:, 0], [0.5 * c, -0.5 * c], rtol=1e-14)

    def test_two_dimensional(self, thm1_map):
        u0 = np.array([0.2, -0.5])
        red = q.reduce_conservative(thm1_map, u0)
        rm = red.reduced_map
        assert rm.n == 1 and rm.m == 0
        assert float(rm.lam_f[0]) == pytest.approx(q.solve_2d(thm1_map, u0).log_k, rel=1e-14)

    def test_conditions_not_met(self):
        with pytest.raises(ConditionsNotMet) as exc:
            q.reduce_conservative(q.qpmap([1, 0, 0], [[1], [-1], [1]], [[1, 0, 0]]), np.zeros(3))
        assert tuple(exc.value.failed) == ("1", "2")

    @pytest.mark.parametrize("which", ["example1", "example2"])
    def test_lift_round_trip(self, which, request):
        qp = request.getfixturevalue(which)
        u0 = np.array([0.3, -0.2, 0.25])
        red = q.reduce_conservative(qp, u0)
        lifted = q.lift_trajectory(red, q.iterate(red.reduced_map, red.initial_state(u0), 100))
        direct = q.iterate(qp, u0, 100)
        assert np.max(np.abs(lifted.u - direct.u)) <= 1e-8

    def test_lift_two_dimensional_product(self, thm1_map):
        u0 = np.array([0.2, -0.5])
        red = q.reduce_conservative(thm1_map, u0)
        lifted = q.lift_trajectory(red, q.iterate(red.reduced_map, red.initial_state(u0), 40))
        assert np.all(np.abs(lifted.u.sum(axis=1) - u0.sum()) <= 1e-12)

    def test_leaf_invariance(self, rng):
        for seed in range(30):
            qp = q.random_map(seed, n=3 + seed % 3, profile="thm5_damped")
            u0 = rng.uniform(-0.5, 0.5, qp.n)
            s = q.iterate(qp, u0, 200).u.sum(axis=1)
            assert np.max(np.abs(s - s[0])) <= 1e-10

    def test_reduced_map_need_not_be_conservative(self):
        found = False
        for seed in range(20):
            qp = q.random_map(seed, profile="example2_family")
            red = q.reduce_conservative(qp, np.array([0.1, 0.2, 0.3]))
            if q.check_thm1(red.reduced_map).verdict is q.Verdict.NOT_CONSERVATIVE:
                found = True
                break
        assert found


class TestReduceWithQMT:
    def test_example3(self, example1):
        u0 = np.array([0.2, -0.3, 0.4])
        an = q.reduce_with_qmt(example1, q.qmt(C2), u0)
        img = an.transformed
        assert img.lam.tolist() == [0, F(-1, 20), F(-1, 20)]
        assert img.A.tolist() == [[0], [F(-7, 10)], [0]]
        assert img.B.tolist() == [[0, 0, 1]]
        assert an.kinds == (K.CONSTANT, K.COUPLED, K.GEOMETRIC)
        assert an.rate(2) == pytest.approx(math.exp(-0.1 + 0.05), rel=1e-14)
        assert an.effective_lambda[1] == pytest.approx(-0.05)
        assert an.residual_terms[1] == ((-0.7, 0),)

    def test_example4(self, example2):
        u0 = np.array([0.2, -0.3, 0.4])
        an = q.reduce_with_qmt(example2, q.qmt(C2), u0)
        w1 = math.exp(u0.sum())
        assert an.kinds == (K.CONSTANT, K.COUPLED, K.GEOMETRIC)
        assert an.rate(2) == pytest.approx(math.exp(-0.1 - 0.2 - (0.3 - 0.1) * w1), rel=1e-13)
        assert an.effective_lambda[1] == pytest.approx(0.2 - 0.1 * w1, rel=1e-13)

    @pytest.mark.parametrize("which", ["example1", "example2"])
    def test_simulate_matches_iteration(self, which, request):
        qp = request.getfixturevalue(which)
        an = q.reduce_with_qmt(qp, q.qmt(C2), np.array([0.2, -0.3, 0.4]))
        full = q.iterate(an.transformed, an.u0, 100).u
        assert np.max(np.abs(an.simulate(100).u - full)) <= 1e-8

    def test_identity_flags_nothing(self):
        qp = q.random_map(3, n=3, m=3)
        an = q.reduce_with_qmt(qp, q.identity_qmt(3), np.zeros(3))
        assert an.kinds == (K.COUPLED,) * 3
