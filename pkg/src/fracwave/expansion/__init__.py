"""The expansion method engine: balancing, reduction, systems, solving, verification."""

from .engine import (
    DERIVED,
    PRINTED,
    AlgebraicSystem,
    Ansatz,
    BalanceError,
    ParamSet,
    ParamVerification,
    ReductionError,
    balance_degree,
    build_ansatz,
    derive_kernel,
    derive_system,
    extract_system,
    reduce_to_polynomial,
    spec_ansatz,
    verify_param_set,
)
from .equations import EQUATIONS, EquationSpec, TransformTemplate, UnknownEquationError, get_equation
from .printed import PRINTED_SYSTEMS, SystemComparison, compare_systems, printed_param_sets, printed_system
from .solve import SolverStall, solve_triangular
