"""
Iterating a QP map and finding its first integrals
===================================================

A QP map is stored as (lambda, A, B) and iterated in log coordinates
u = ln x, so the state never leaves the positive orthant.
"""
from fractions import Fraction as F

import numpy as np

import qpmaps as q

# the three-dimensional LV map with a single active quasimonomial x3
qp = q.make_example1(F(1, 10), F(-1, 20), F(7, 10))
print(qp)

traj = q.iterate(qp, np.zeros(3), 20)
print("x(20) =", traj.x[-1])

# exponent vectors c with c^T M = 0 give invariants prod_i x_i**c_i
basis = q.find_integrals(qp)
for c in basis:
    print("integral exponents:", [str(v) for v in c])

# the product x1*x2*x3 stays at its initial value
print("max |prod x - 1| over the orbit:", np.max(np.abs(np.prod(traj.x, axis=1) - 1)))
