"""Multiscale shape graphs: internal metrics, dendrograms and coarsening."""

from elasticgraph.multiscale.coarsen import (
    CoarseGraph,
    ResolutionChoice,
    cluster_count,
    coarsen,
    multiscale,
    select_resolution,
)
from elasticgraph.multiscale.dendrogram import Dendrogram, build_dendrogram
from elasticgraph.multiscale.metrics import InternalMetric, internal_metric

__all__ = [
    "CoarseGraph",
    "Dendrogram",
    "InternalMetric",
    "ResolutionChoice",
    "build_dendrogram",
    "cluster_count",
    "coarsen",
    "internal_metric",
    "multiscale",
    "select_resolution",
]
