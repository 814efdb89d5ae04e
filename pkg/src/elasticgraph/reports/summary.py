"""Markdown summaries of mean, PCA, clustering and resolution results."""

from __future__ import annotations

from collections.abc import Sequence

from elasticgraph.multiscale.coarsen import ResolutionChoice
from elasticgraph.statistics.clustering import ClusterReport
from elasticgraph.statistics.mean import MeanResult
from elasticgraph.statistics.tpca import TangentModel


def _params_line(params) -> str:
    return f"eta={params.eta:g}, lambda={params.lam:g}, e={params.e:g}, samples={params.n_samples}, seed={params.seed}"


def mean_summary(result: MeanResult, names: Sequence[str]) -> str:
    """Summary of a Karcher mean run."""
    lines: list[str] = []
    lines.append("# Mean shape graph")
    lines.append(f"Parameters: {_params_line(result.params)}")
    lines.append("")

    lines.append("## Overview")
    lines.append(f"- Inputs: {len(result.inputs)}")
    lines.append(f"- Mean nodes: {result.mean.n_real} real / {result.mean.n_nodes} total")
    lines.append(f"- Mean edges: {result.mean.n_edges}")
    lines.append(f"- Iterations: {len(result.objective_trace) - 1}")
    lines.append(f"- Final objective: {result.objective:.9g}")
    lines.append("")

    lines.append("## Objective trace")
    for it, value in enumerate(result.objective_trace):
        lines.append(f"- {it}: {value:.9g}")
    lines.append("")

    lines.append("## Distances to the mean")
    for name, reg in zip(names, result.registrations):
        lines.append(f"- {name}: {reg.d_graph:.9g}")
    lines.append("")
    return "\n".join(lines)


def pca_summary(model: TangentModel, names: Sequence[str]) -> str:
    lines: list[str] = []
    lines.append("# Tangent PCA")
    lines.append(f"- Inputs: {model.n_inputs} ({', '.join(names)})")
    lines.append(f"- Tangent dimension: {model.dimension}")
    lines.append(f"- Nonzero components: {model.n_components}")
    lines.append("")

    lines.append("## Spectrum")
    ratio = model.explained_variance_ratio()
    cumulative = 0.0
    for d, (s, r) in enumerate(zip(model.singular_values, ratio)):
        cumulative += float(r)
        lines.append(f"- PC{d + 1}: singular value {s:.6g}, explained {r:.2%}, cumulative {cumulative:.2%}")
    if model.n_components == 0:
        lines.append("")
        lines.append("All inputs coincide with the mean; no deformation grids.")
    lines.append("")
    return "\n".join(lines)


def cluster_summary(report: ClusterReport, names: Sequence[str]) -> str:
    """Clusters with their modes, in heatmap order."""
    lines: list[str] = []
    lines.append("# Clustering")
    lines.append(f"- Graphs: {len(names)}")
    lines.append(f"- Clusters: {report.k} (silhouette {report.silhouette:.4f})")
    lines.append("")

    lines.append("## Silhouette by k")
    for k in sorted(report.scores):
        marker = " *" if k == report.k else ""
        lines.append(f"- k={k}: {report.scores[k]:.4f}{marker}")
    lines.append("")

    lines.append("## Members")
    for c, mode in enumerate(report.modes):
        members = [names[i] for i in report.order() if report.labels[i] == c]
        lines.append(f"### Cluster {c} (mode: {names[mode]})")
        for name in members:
            lines.append(f"  - {name}")
    lines.append("")

    if report.outliers:
        lines.append("## Outliers")
        for i in report.outliers:
            lines.append(f"- {names[i]} (cluster {int(report.labels[i])})")
        lines.append("")
    return "\n".join(lines)


def resolution_summary(choice: ResolutionChoice, source: str, target: str) -> str:
    lines: list[str] = []
    lines.append(f"# Resolution of {target} against {source}")
    lines.append(f"- Selected h*: {choice.level:g} ({choice.coarse.n_clusters} nodes)")
    lines.append(f"- d_graph at h*: {choice.registration.d_graph:.9g}")
    lines.append("")
    lines.append("## Profile")
    for h, d in choice.profile:
        lines.append(f"- h={h:g}: {d:.9g}")
    lines.append("")
    return "\n".join(lines)
