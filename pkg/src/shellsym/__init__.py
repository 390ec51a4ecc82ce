"""shellsym: point-symmetry classification and von Karman equivalence for shallow shells."""

__version__ = "0.1.0"

from .expr import DomainError, ParseError, diff, eval_at, evaluate, parse, to_string
from .geometry import (
    Domain2D, GeometryFields, MaterialParams, ShellSpec, gauss_curvature,
    geometry_fields, mean_curvature, reduced_load, shallowness_check,
)
from .symmetry import (
    ClassificationConfig, ClassificationResult, Generator, classify,
)
from .equivalence import (
    AnisotropicParams, VonKarmanForm, anisotropic_rhs, to_vonkarman,
    transform_boundary_data,
)
from .solver import (
    BCData, BoundaryConditions, FieldGrid, Grid, SolveReport, SolverOptions,
    marguerre_system, newton_solve, vonkarman_system,
)
from .verify import (
    OrbitConfig, VerificationReport, manufactured_study, orbit_residual,
    verify_equivalence, verify_reduction,
)

__all__ = [
    "__version__",
    "parse", "diff", "evaluate", "eval_at", "to_string",
    "ParseError", "DomainError",
    "Domain2D", "ShellSpec", "MaterialParams", "GeometryFields",
    "geometry_fields", "mean_curvature", "gauss_curvature", "reduced_load",
    "shallowness_check",
    "Generator", "ClassificationConfig", "ClassificationResult", "classify",
    "VonKarmanForm", "AnisotropicParams", "to_vonkarman",
    "transform_boundary_data", "anisotropic_rhs",
    "Grid", "FieldGrid", "BCData", "BoundaryConditions", "SolverOptions",
    "SolveReport", "marguerre_system", "vonkarman_system", "newton_solve",
    "OrbitConfig", "VerificationReport", "verify_equivalence",
    "verify_reduction", "orbit_residual", "manufactured_study",
]
