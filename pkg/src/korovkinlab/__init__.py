"""Numerical laboratory for monotone, sublinear, strongly translatable
approximation operators on [0,1] and their quantitative error bounds."""

from .funcspace import (
    E0,
    E1,
    E2,
    INF,
    NEG_E1,
    EvaluationError,
    Func1D,
    Grid,
    lp_norm,
    make_test_suite,
    sobolev_norm,
    suite_by_id,
)
from .operators import (
    OPERATOR_KINDS,
    DistortedMeasure,
    OperatorSpec,
    SQRT_MEASURE,
    apply,
    bernstein_basis,
    choquet_integral,
    operator_moment,
)
from .smoothness import (
    ModulusQuery,
    forward_difference,
    k_functional_upper,
    modulus,
    modulus_of_smoothness,
    steklov_mean,
)
from .korovkin import (
    BoundPoint,
    BoundReport,
    InsufficientDataError,
    KorovkinIndices,
    Section6Result,
    StabilityCheck,
    compute_indices,
    lambda_defect,
    measure_error,
    rate_estimate,
    section6_comparisons,
    stability_check,
    sweep_bound,
    theorem_bound,
)
from .axioms import AXIOM_NAMES, AXIOM_TOLERANCES, AxiomOutcome, run_axiom_suite

__version__ = "0.1.0"

__all__ = [
    "AXIOM_NAMES",
    "AXIOM_TOLERANCES",
    "AxiomOutcome",
    "BoundPoint",
    "BoundReport",
    "DistortedMeasure",
    "E0",
    "E1",
    "E2",
    "EvaluationError",
    "Func1D",
    "Grid",
    "INF",
    "InsufficientDataError",
    "KorovkinIndices",
    "ModulusQuery",
    "NEG_E1",
    "OPERATOR_KINDS",
    "OperatorSpec",
    "SQRT_MEASURE",
    "Section6Result",
    "StabilityCheck",
    "apply",
    "bernstein_basis",
    "choquet_integral",
    "compute_indices",
    "forward_difference",
    "k_functional_upper",
    "lambda_defect",
    "lp_norm",
    "make_test_suite",
    "measure_error",
    "modulus",
    "modulus_of_smoothness",
    "operator_moment",
    "rate_estimate",
    "run_axiom_suite",
    "section6_comparisons",
    "sobolev_norm",
    "stability_check",
    "steklov_mean",
    "suite_by_id",
    "sweep_bound",
    "theorem_bound",
]
