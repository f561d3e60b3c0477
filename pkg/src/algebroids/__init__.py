"""Exact symbolic metric-connection geometry on local pre-Leibniz
algebroids over a coordinate chart.

All arithmetic happens in the fraction field of multivariate polynomials
over the rationals, so every identity verdict is exact: a check passes iff
its residual expands to the zero polynomial.
"""

from .calculus import (
    associator,
    check_bianchi_algebraic,
    check_bianchi_differential,
    check_cartan_structure,
    check_magic_and_derivations,
    check_ricci,
    check_square_laws,
    e_exterior_derivative,
    exterior_derivative_raw,
    leibniz_derivative,
    seeded_sections,
)
from .catalog import (
    ExampleBundle,
    HigherMetricValue,
    make_example,
    specialized_admissibility,
)
from .connection import (
    Connection,
    check_anholonomy_decomposition,
    Metric,
    bracket_from_connection,
    check_admissible,
    check_equivalent_connections,
    covariant_derivative,
    curvature,
    difference_tensor,
    is_admissible,
    locality_contraction,
    modified_anholonomy,
    modified_bracket,
    non_metricity,
    torsion,
)
from .core import (
    AlgebroidData,
    Classification,
    EForm,
    ETensor,
    FrameChange,
    Section,
    bracket,
    change_frame,
    check_locality_projector,
    classify,
    coboundary,
    interior_product,
    wedge,
)
from .documents import AlgebroidDocument, dump_document, load_document
from .errors import (
    AdmissibilityError,
    AlgebroidError,
    BudgetError,
    DivisionByZeroError,
    DocumentError,
    ParseError,
    PoleError,
    ProjectorRequiredError,
    ShapeError,
    SingularMatrixError,
)
from .levicivita import (
    SolutionSpace,
    check_levicivita_props,
    decompose_connection,
    koszul_residual,
    solve_koszul,
    solve_torsion_free,
)
from .parsing import parse_scalar
from .reports import CheckReport
from .scalars import (
    Point,
    Poly,
    Scalar,
    get_term_budget,
    poly_to_text,
    scalar_to_text,
    set_term_budget,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebroidData",
    "AlgebroidDocument",
    "AdmissibilityError",
    "AlgebroidError",
    "BudgetError",
    "CheckReport",
    "Classification",
    "Connection",
    "DivisionByZeroError",
    "DocumentError",
    "EForm",
    "ETensor",
    "ExampleBundle",
    "FrameChange",
    "HigherMetricValue",
    "Metric",
    "ParseError",
    "Point",
    "PoleError",
    "Poly",
    "ProjectorRequiredError",
    "Scalar",
    "Section",
    "ShapeError",
    "SingularMatrixError",
    "SolutionSpace",
    "associator",
    "bracket",
    "bracket_from_connection",
    "change_frame",
    "check_admissible",
    "check_anholonomy_decomposition",
    "check_bianchi_algebraic",
    "check_bianchi_differential",
    "check_cartan_structure",
    "check_equivalent_connections",
    "check_levicivita_props",
    "check_locality_projector",
    "check_magic_and_derivations",
    "check_ricci",
    "check_square_laws",
    "classify",
    "coboundary",
    "covariant_derivative",
    "curvature",
    "decompose_connection",
    "difference_tensor",
    "dump_document",
    "e_exterior_derivative",
    "exterior_derivative_raw",
    "get_term_budget",
    "interior_product",
    "is_admissible",
    "koszul_residual",
    "leibniz_derivative",
    "load_document",
    "locality_contraction",
    "make_example",
    "modified_anholonomy",
    "modified_bracket",
    "non_metricity",
    "parse_scalar",
    "poly_to_text",
    "scalar_to_text",
    "seeded_sections",
    "set_term_budget",
    "solve_koszul",
    "solve_torsion_free",
    "specialized_admissibility",
    "torsion",
    "wedge",
]
