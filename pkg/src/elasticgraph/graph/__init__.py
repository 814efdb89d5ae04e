"""Shape-graph data model, validation and preprocessing."""

from elasticgraph.graph.model import Edge, ShapeGraph
from elasticgraph.graph.preprocess import (
    assign_weights,
    fiedler_bipartition,
    pad_nulls,
    pad_to,
    remove_small_components,
    simplify_multiedges,
)
from elasticgraph.graph.schema import MetricKind, Severity, Violation, ViolationType, WeightPolicy
from elasticgraph.graph.validate import GraphValidator, validate

__all__ = [
    "Edge",
    "GraphValidator",
    "MetricKind",
    "Severity",
    "ShapeGraph",
    "Violation",
    "ViolationType",
    "WeightPolicy",
    "assign_weights",
    "fiedler_bipartition",
    "pad_nulls",
    "pad_to",
    "remove_small_components",
    "simplify_multiedges",
    "validate",
]
