"""Weighted-shape space and its metric."""

from elasticgraph.metric.weighted import GeodesicCase, WeightedShape, d_eta, geodesic_case, weighted_geodesic

__all__ = ["GeodesicCase", "WeightedShape", "d_eta", "geodesic_case", "weighted_geodesic"]
