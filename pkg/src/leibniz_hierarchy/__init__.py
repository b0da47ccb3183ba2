"""Leibniz hierarchy classification for finite logical matrices."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    FiniteAlgebra,
    Matrix,
    MatrixFamily,
    Operation,
    Partition,
    enumerate_subuniverses,
    eval_term,
    generate_subuniverse,
    quotient_matrix,
    validate_algebra,
)
from .classify import (  # noqa: E402
    CandidateDelta,
    CandidateTau,
    ClassificationReport,
    ClassifyConfig,
    Verdict,
    candidate_delta,
    candidate_tau,
    classify,
    enumerate_unary_filters,
    is_algebraizable,
    is_equivalential,
    is_protoalgebraic,
    is_truth_equational,
    is_weakly_algebraizable,
    tau_defines_truth_on_submatrices,
)
from .entailment import EntailmentResult, entails, is_theorem  # noqa: E402
from .fileformat import dump_instance, emit_report, parse_input  # noqa: E402
from .free import FreeAlgebra, TermFunction, compose_unary, generate_free_algebra  # noqa: E402
from .leibniz import LeibnizResult, is_reduced, leibniz_bruteforce, leibniz_congruence, reduce_matrix  # noqa: E402
from .reductions import (  # noqa: E402
    FlatMatrix,
    GenCloInstance,
    NaturalMatrix,
    build_flat,
    build_natural,
    clone_member,
    random_instance,
    validate_genclo_instance,
)
from .terms import App, Term, Var, format_term, parse_term  # noqa: E402
from .verify import verify_witness  # noqa: E402

__all__ = [
    "App",
    "CandidateDelta",
    "CandidateTau",
    "ClassificationReport",
    "ClassifyConfig",
    "EntailmentResult",
    "FiniteAlgebra",
    "FlatMatrix",
    "FreeAlgebra",
    "GenCloInstance",
    "LeibnizResult",
    "Matrix",
    "MatrixFamily",
    "NaturalMatrix",
    "Operation",
    "Partition",
    "Term",
    "TermFunction",
    "Var",
    "Verdict",
    "build_flat",
    "build_natural",
    "candidate_delta",
    "candidate_tau",
    "classify",
    "clone_member",
    "compose_unary",
    "dump_instance",
    "emit_report",
    "entails",
    "enumerate_subuniverses",
    "enumerate_unary_filters",
    "eval_term",
    "format_term",
    "generate_free_algebra",
    "generate_subuniverse",
    "is_algebraizable",
    "is_equivalential",
    "is_protoalgebraic",
    "is_reduced",
    "is_theorem",
    "is_truth_equational",
    "is_weakly_algebraizable",
    "leibniz_bruteforce",
    "leibniz_congruence",
    "parse_input",
    "parse_term",
    "quotient_matrix",
    "random_instance",
    "reduce_matrix",
    "tau_defines_truth_on_submatrices",
    "validate_algebra",
    "validate_genclo_instance",
    "verify_witness",
]
