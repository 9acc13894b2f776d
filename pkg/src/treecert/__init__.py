"""Certified quantum query bounds from classical decision trees with guessing colorings."""

from .certificate import (
    Certificate,
    ConstantWeights,
    GenerationWeights,
    VertexWeights,
    bound_check,
    default_weights,
    dense_oracle,
    generation_weights,
    objective,
    per_vertex_analysis,
    verify_feasibility,
)
from .family import CrossFamily
from .metrics import (
    auto_color_fixed_guess,
    ensemble_metrics,
    path_stats,
    sparse_g,
    tree_metrics,
)
from .model import (
    BLACK,
    RED,
    FunctionSpec,
    ProgramTree,
    Query,
    QueryPartition,
    RandomizedTreeFamily,
    Transcript,
    TreeProgram,
    VertexId,
    divergence_vertex,
    evaluate_path,
    validate,
)

__all__ = [
    "BLACK",
    "RED",
    "Certificate",
    "ConstantWeights",
    "CrossFamily",
    "FunctionSpec",
    "GenerationWeights",
    "ProgramTree",
    "Query",
    "QueryPartition",
    "RandomizedTreeFamily",
    "Transcript",
    "TreeProgram",
    "VertexId",
    "VertexWeights",
    "auto_color_fixed_guess",
    "bound_check",
    "default_weights",
    "dense_oracle",
    "divergence_vertex",
    "ensemble_metrics",
    "evaluate_path",
    "generation_weights",
    "objective",
    "path_stats",
    "per_vertex_analysis",
    "sparse_g",
    "tree_metrics",
    "validate",
    "verify_feasibility",
]
