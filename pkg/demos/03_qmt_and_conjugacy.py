"""
Quasimonomial transformations
=============================

x = y**C maps (lambda, A, B) to (C^-1 lambda, C^-1 A, B C). The product
B M is shared by the whole class, and orbits correspond one to one.
"""
from fractions import Fraction as F

import numpy as np

import qpmaps as q

qp = q.random_map(4, n=3, profile="thm5_damped")
T = q.qmt([[1, F(1, 2), 0], [0, 1, -1], [1, 0, 1]])
image = q.apply_qmt(qp, T)
print("original: ", qp)
print("transformed:", image)

print("B M preserved exactly:", q.class_invariant(image) == q.class_invariant(qp))
dev = q.check_conjugacy(qp, T, np.array([0.2, -0.1, 0.3]), 100)
print(f"orbit correspondence over 100 steps: max deviation {dev:.2e}")

# conservativity is not a class property: the image of a conservative map
# under a generic QMT usually fails the test
cons = q.random_map(1, profile="thm1_conservative")
print(q.check_thm1(cons).verdict.value, "->",
      q.check_thm1(q.apply_qmt(cons, q.qmt([[2, 1], [1, 1]]))).verdict.value)
