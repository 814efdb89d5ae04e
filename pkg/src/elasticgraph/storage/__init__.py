"""File I/O for shape graphs and run results."""

from elasticgraph.storage.local import LocalStorage, load_graph, load_matrix, parse_graph, save_graph

__all__ = ["LocalStorage", "load_graph", "load_matrix", "parse_graph", "save_graph"]
