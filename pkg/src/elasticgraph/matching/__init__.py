"""Shape-graph registration: affinity, QAP solvers, d_graph and geodesics."""

from elasticgraph.matching.affinity import (
    AffinityMatrix,
    EdgeDistanceTable,
    build_affinity,
    estimate_mean_distance,
    node_affinities,
)
from elasticgraph.matching.distance import d_graph
from elasticgraph.matching.geodesic import FrameEdge, GeodesicFrame, GraphGeodesic, graph_geodesic
from elasticgraph.matching.params import MatchingParams
from elasticgraph.matching.register import register_pair, registration_record
from elasticgraph.matching.solvers import Registration, qap_exact, qap_solve

__all__ = [
    "AffinityMatrix",
    "EdgeDistanceTable",
    "FrameEdge",
    "GeodesicFrame",
    "GraphGeodesic",
    "MatchingParams",
    "Registration",
    "build_affinity",
    "d_graph",
    "estimate_mean_distance",
    "graph_geodesic",
    "node_affinities",
    "qap_exact",
    "qap_solve",
    "register_pair",
    "registration_record",
]
