"""Rendering: SVG drawings, HTML reports and Markdown summaries."""

from elasticgraph.reports.html_generator import (
    distance_profile_figure,
    render_report_html,
    silhouette_figure,
    spectrum_figure,
    trace_figure,
)
from elasticgraph.reports.summary import cluster_summary, mean_summary, pca_summary, resolution_summary
from elasticgraph.reports.svg import Viewport, render_frame, render_graph, render_grid, render_heatmap

__all__ = [
    "Viewport",
    "cluster_summary",
    "distance_profile_figure",
    "mean_summary",
    "pca_summary",
    "render_frame",
    "render_graph",
    "render_grid",
    "render_heatmap",
    "render_report_html",
    "resolution_summary",
    "silhouette_figure",
    "spectrum_figure",
    "trace_figure",
]
