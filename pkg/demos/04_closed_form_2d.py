"""
Closed-form orbits in dimension two
===================================

A conservative 2-d map keeps x1*x2 fixed, so on each level set it is a
pure scaling: x1(t) = x1(0) k**t and x2(t) = x2(0) k**-t.
"""
import numpy as np

import qpmaps as q

qp = q.qpmap([0.3, -0.3], [[1.5], [-1.5]], [[2, 2]])
u0 = np.log([1.0, 1.0])
sol = q.solve_2d(qp, u0)
print(sol.describe())

steps = 10
iterated = q.iterate(qp, u0, steps).x
closed = np.exp(sol.at(np.arange(steps + 1)))
print("max relative difference:", np.max(np.abs(iterated / closed - 1)))

# k depends on the level set through x1(0)*x2(0)
for p in (0.5, 1.0, 2.0):
    print(f"x1 x2 = {p}: k = {q.solve_2d(qp, np.log([p, 1.0])).k:.6f}")
