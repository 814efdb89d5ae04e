"""Population statistics on shape graphs."""

from elasticgraph.statistics.clustering import ClusterReport, cluster_distances, k_medoids
from elasticgraph.statistics.distances import directed_distances, pairwise_distances
from elasticgraph.statistics.mean import MeanResult, karcher_mean_graphs
from elasticgraph.statistics.tpca import TangentModel, pc_deformation, tangent_pca

__all__ = [
    "ClusterReport",
    "MeanResult",
    "TangentModel",
    "cluster_distances",
    "directed_distances",
    "k_medoids",
    "karcher_mean_graphs",
    "pairwise_distances",
    "pc_deformation",
    "tangent_pca",
]
