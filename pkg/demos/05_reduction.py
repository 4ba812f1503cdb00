"""
Reducing a conservative map by one dimension
============================================

When sum(lambda) = 0 and every column of A sums to zero, prod_i x_i is
invariant. A QMT makes it a coordinate; freezing it leaves an
(n-1)-dimensional QP map whose orbits lift back to the original ones.
"""
from fractions import Fraction as F

import numpy as np

import qpmaps as q

qp = q.random_map(7, n=4, profile="thm5_damped")
u0 = np.array([0.2, -0.1, 0.05, 0.3])
red = q.reduce_conservative(qp, u0)
print("reduced map:", red.reduced_map)
print("leaf value prod x_i(0) =", red.constant_coordinate)

lifted = q.lift_trajectory(red, q.iterate(red.reduced_map, red.initial_state(u0), 100))
print("lift vs direct iteration:", np.max(np.abs(lifted.u - q.iterate(qp, u0, 100).u)))

# a hand-picked QMT can do better on the three-dimensional examples:
# one coordinate constant, one geometric, one driven
ex = q.make_example2(F(1, 10), F(1, 5), F(1, 2), F(3, 10), F(-1, 10))
an = q.reduce_with_qmt(ex, q.qmt([[1, -1, -1], [0, 1, 0], [0, 0, 1]]), np.array([0.2, -0.3, 0.4]))
for i, kind in enumerate(an.kinds):
    extra = f" rate {an.rate(i):.6f}" if i in an.log_rates else ""
    print(f"w{i + 1}: {kind.value}{extra}")
