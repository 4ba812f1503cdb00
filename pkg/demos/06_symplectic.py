"""
Symplectic QP maps
==================

For n = 2s the conditions (a)-(d) on (lambda, A, B) make the map
symplectic, hence volume preserving.
"""
import numpy as np

import qpmaps as q

for s in (1, 2, 3):
    qp = q.random_map(s, profile=f"symplectic({s})")
    rep = q.check_symplectic(qp)
    orc = q.sampling_oracle(qp, seed=s, npoints=200)
    print(f"s = {s}: conditions hold: {rep.all_hold}; necessary test: "
          f"{q.check_thm5_necessary(qp).verdict.value}; max |det J - 1| = {orc.max_deviation:.1e}")

# breaking condition (b) alone is reported with a witness
qp = q.random_map(5, profile="symplectic(2)")
bad = q.validate(4, qp.m, [qp.lam[0] + 1] + list(qp.lam[1:]), qp.A.tolist(), qp.B.tolist())
rep = q.check_symplectic(bad)
print("failed:", rep.failed, "witness:", rep.condition("b").witness)
print("det J at the origin:", q.analytic_jacobian(bad, np.zeros(4)).det)
