"""Alpha-cut fuzzy arithmetic, Seikkala differentiability, and the fuzzy
growth/decay model ``dy/dt = k * y``."""

from .errors import (
    CaseError,
    ConfigError,
    DivergenceError,
    DomainError,
    FuzzError,
    GridMismatchError,
    NumericError,
    PreconditionError,
    SingularityError,
    StructureError,
)
from .fivp import (
    AnalysisReport,
    CaseTag,
    DecayCoefficients,
    DecayVariant,
    FivpModel,
    ResidualReport,
    analyze,
    classify_case,
    decay_coefficients,
    integrate_parametric,
    residual_check,
    solve_decay_closed,
    solve_growth_closed,
)
from .fuzzy import (
    AlphaGrid,
    FuzzyNumber,
    LevelInterval,
    TriangularParams,
    ValidityReport,
    add,
    extension_brute_force_multiply,
    from_triangular,
    multiply,
    scalar_mul,
    triangular_alpha_cut,
    triangular_membership,
    validate_fuzzy,
)
from .seikkala import (
    LevelFunctionField,
    SeikkalaReport,
    Witness,
    check_level_validity,
    partial_alpha,
    seikkala_verdict,
    time_derivative,
)

__version__ = "0.1.0"
