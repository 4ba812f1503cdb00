"""
Classifying conservativity
==========================

The structural tests read the answer off (lambda, A, B). The sampling
oracle checks det J = 1 numerically and is used as an independent check.
"""
import numpy as np

import qpmaps as q

cases = {
    "2-d conservative": q.random_map(9, profile="thm1_conservative"),
    "2-d Lotka-Volterra": q.random_map(3, n=2, profile="lv"),
    "3-d example family": q.random_map(1, profile="example2_family"),
    "3-d Lotka-Volterra": q.random_map(5, n=3, profile="lv"),
    "4-d symplectic": q.random_map(2, profile="symplectic(2)"),
}

for name, qp in cases.items():
    rep = q.classify(qp)
    orc = q.sampling_oracle(qp, seed=0, npoints=200)
    print(f"{name:20s} {rep.test:6s} {rep.verdict.value:24s} oracle: {orc.verdict.value}"
          f" (max |det J - 1| = {orc.max_deviation:.1e})")
    for cond in rep.failed:
        c = rep.condition(cond)
        print(f"{'':20s} condition ({c.id}) fails at {c.witness}, value {c.value}")

# the determinant itself, analytic and by finite differences
qp = cases["3-d Lotka-Volterra"]
u = np.array([0.1, -0.2, 0.3])
print("analytic det J:", q.analytic_jacobian(qp, u).det)
print("finite-difference det J:", np.linalg.det(q.fd_jacobian(qp, u)))
