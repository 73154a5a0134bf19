"""Computations with coarse classes of metrics on the double of a finite metric space."""

from .metric import (
    DoubleMetric, FiniteMetricSpace, ScaleFamily, diag_profile, restrict,
    validate_double, validate_space,
)
from .semigroup import (
    adjoint, compose, graph_metric, leq, link_metric, unit_rep, vn_pair, zero_rep,
)
from .coarse import (
    ComparisonVerdict, classify, coarse_equal, dominates, is_idempotent, is_selfadjoint,
)

__all__ = [
    "DoubleMetric", "FiniteMetricSpace", "ScaleFamily", "diag_profile", "restrict",
    "validate_double", "validate_space", "adjoint", "compose", "graph_metric", "leq",
    "link_metric", "unit_rep", "vn_pair", "zero_rep", "ComparisonVerdict", "classify",
    "coarse_equal", "dominates", "is_idempotent", "is_selfadjoint",
]
