"""Graph edit distance estimation via a doubly-stochastic alignment relaxation.

Public surface: labeled graph I/O and padding, edit-cost models, the relaxed
objective kernel, exact linear assignment, the solver, the exact brute-force
oracle, and the benchmark harness.
"""

from .assignment import Permutation, round_to_permutation, solve_assignment
from .bench import (
    BenchReport,
    BenchRow,
    PairCase,
    generate_pairs,
    load_corpus,
    report_to_aggregate_json,
    report_to_csv,
    run_bench,
    write_corpus,
)
from .costs import CostModel, build_cost_matrix, builtin_cost_model, load_cost_model
from .editpath import (
    EditPath,
    ExactResult,
    exact_ged,
    extract_edit_path,
    ged_under_mapping,
)
from .errors import (
    BudgetExceededError,
    CorpusFormatError,
    CostModelError,
    DivergenceError,
    EigensolverError,
    GedError,
    GraphFormatError,
)
from .graphs import (
    DUMMY_LABEL,
    GraphPair,
    LabeledGraph,
    adjacency,
    load_graph,
    make_graph,
    pad_pair,
    save_graph,
)
from .kernel import (
    ObjectiveParams,
    ScaledPair,
    convexity_lambda_bound,
    gradient,
    jacobi_eigenvalues,
    objective,
    penalized_objective,
    quasi_perm_residual,
    relabel_transform,
    scale_pair,
)
from .solver import (
    AdamState,
    SolveReport,
    SolverConfig,
    adam_step,
    estimate_ged,
    inner_minimize,
    solve_pair,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "BenchReport",
    "BenchRow",
    "BudgetExceededError",
    "CorpusFormatError",
    "CostModel",
    "CostModelError",
    "DUMMY_LABEL",
    "DivergenceError",
    "EditPath",
    "EigensolverError",
    "ExactResult",
    "GedError",
    "GraphFormatError",
    "GraphPair",
    "LabeledGraph",
    "ObjectiveParams",
    "PairCase",
    "Permutation",
    "ScaledPair",
    "SolveReport",
    "SolverConfig",
    "adam_step",
    "adjacency",
    "build_cost_matrix",
    "builtin_cost_model",
    "convexity_lambda_bound",
    "estimate_ged",
    "exact_ged",
    "extract_edit_path",
    "ged_under_mapping",
    "generate_pairs",
    "gradient",
    "inner_minimize",
    "jacobi_eigenvalues",
    "load_corpus",
    "load_cost_model",
    "load_graph",
    "solve_pair",
    "make_graph",
    "objective",
    "pad_pair",
    "penalized_objective",
    "quasi_perm_residual",
    "relabel_transform",
    "report_to_aggregate_json",
    "report_to_csv",
    "round_to_permutation",
    "run_bench",
    "save_graph",
    "scale_pair",
    "solve_assignment",
    "write_corpus",
]
