"""Order of smoothness of linear operators between finite-dimensional
polyhedral and l_p spaces, with exact arithmetic in Q(sqrt2)."""

from .errors import (
    Disagreement,
    KSmoothError,
    NonFiniteAttainment,
    NotOnSphere,
    ParseError,
    Unsupported,
    ZeroOperator,
)
from .numeric import QSqrt2, SQRT2, get_eps, rank, scalar_parse, scalar_print, set_eps, tolerance
from .operators import AttainmentSet, Operator, attainment_ext, normalize, op_norm
from .order import (
    SmoothnessReport,
    TensorFunctional,
    crosscheck,
    exposed_nsmooth_check,
    ext_J_operator,
    oracle_order,
    smoothness_order,
    smoothness_order_rank,
    sum_rule,
    two_dim_classify,
)
from .problem import Problem, load_problem
from .smoothness import bj_orthogonal, duality_map, same_segment_interior, supporting_face, vector_order
from .spaces import Space, dual_norm, ext_points, l1, linf, lp, norm, polyhedral

__version__ = "0.1.0"
