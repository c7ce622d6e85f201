"""Exact-arithmetic toolkit for polyptych lattices."""

from .errors import (
    BadBasis,
    BadParams,
    DimensionMismatch,
    IncompatibleFans,
    ManifestError,
    NegativeScalar,
    NoDualRegistered,
    NotACone,
    NotAPoint,
    NotCompact,
    OriginNotInterior,
    ParamMismatch,
    PlypError,
    TieError,
    UnboundedError,
    UnknownChart,
    VerificationFailure,
)
from .polyhedra import (
    ClassicalFan,
    ClassicalPolytope,
    HPolyhedron,
    RationalCone,
    TropExpr,
    common_refinement,
    is_bounded,
    is_totally_unimodular,
    lattice_points,
    lex_min_member,
    minimal_min_representation,
    solve_vertices,
    strict_feasible,
)
from .lattice import (
    Element,
    PLCone,
    PLFan,
    PLMap,
    PolyptychLattice,
    add_in_chart,
    chart,
    pl_fan,
    product_lattice,
    scale,
    upsilon,
    validate_lattice,
)
from .points import (
    Point,
    SElem,
    combine_points,
    evaluate,
    extend_from_cone,
    is_linear_on_chart,
    is_point,
    point_eval_hom,
    restrict_to_cone,
    semialg_oplus,
    semialg_star,
    verify_point,
)
from .polytopes import (
    PLHalfSpace,
    PLPolytope,
    build_polytope,
    dual_polytope,
    is_chart_gorenstein_fano,
    is_integral,
    p_conv,
    pl_lattice_points,
    scale_polytope,
    support_function,
    vertices,
)
from .duality import DualPair, induced_pl_on_points, pair_eval, register_dual_pair, verify_dual_pair
from .families import (
    a1_example,
    a1_point,
    mdr_dual_pair,
    mdr_element,
    mdr_gf_polytope,
    mdr_key,
    mdr_lattice,
    mdr_phi,
    mdr_phi_inv,
    mdr_point,
    mdr_tu_matrix,
    trivial_lattice,
)
from .detrop import (
    AlgebraElement,
    ValuationValue,
    alg_mul,
    boxplus,
    circledast,
    coordinate_valuations,
    full_rank_valuation,
    get_context,
    level_space,
    no_body_check,
    parse_expression,
    support,
    valuate,
)

__version__ = "0.1.0"
