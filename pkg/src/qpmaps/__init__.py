"""Quasipolynomial maps: iteration, quasimonomial transformations, conservativity
classification, first integrals, closed-form 2-d solutions and dimensional reduction."""

from .classify import (ClassificationReport, Condition, IntegralBasis, OracleResult, OracleVerdict,
                       Orientation, Verdict, check_dim1, check_symplectic, check_thm1, check_thm3,
                       check_thm5_necessary, classify, compute_omega, find_integrals,
                       is_B_nondegenerate, is_B_nonnegative, sampling_oracle)
from .core import (EXP_LIMIT, QPMap, Trajectory, canonicalize, eval_quasimonomials, is_lotka_volterra,
                   iterate, make_example1, make_example2, qpmap, random_map, step, validate)
from .errors import *  # noqa: F401,F403
from .io import (FileFormatError, dumps_map, load_map, load_qmt, map_from_dict, qmt_from_dict,
                 read_trajectory_csv, save_map, save_trajectory_csv, write_trajectory_csv)
from .jacobian import (Delta3Expansion, JacobianEval, analytic_jacobian, delta3_expansion, fd_jacobian,
                       jacobian_det)
from .reduce import (ClosedForm2D, CoordinateAnalysis, CoordinateKind, ReductionResult, leaf_qmt,
                     lift_trajectory, reduce_conservative, reduce_with_qmt, solve_2d)
from .scalar import TOL_STRUCT
from .transform import (QMT, ClassInvariant, apply_qmt, check_conjugacy, class_invariant, compose,
                        identity_qmt, inverse_transform_state, qmt, qmt_from_inverse, transform_state)

__version__ = "0.1.0"
