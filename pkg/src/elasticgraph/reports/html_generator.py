"""HTML report generator: Jinja2 template + Plotly charts."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np
import plotly.graph_objects as go
from jinja2 import Environment, FileSystemLoader

from elasticgraph.reports.svg import TEMPLATES_DIR


def _figure(**layout) -> go.Figure:
    return go.Figure(layout=go.Layout(template="none", margin={"l": 60, "r": 20, "t": 30, "b": 50}, **layout))


def distance_profile_figure(profile: Sequence[tuple[float, float]], selected: float) -> go.Figure:
    """d_graph against the resolution level h, with h* marked."""
    fig = _figure(xaxis_title="h", yaxis_title="d_graph")
    hs = [h for h, _ in profile]
    ds = [d for _, d in profile]
    fig.add_trace(go.Scatter(x=hs, y=ds, mode="lines+markers", name="d_graph"))
    best = [d for h, d in profile if h == selected]
    fig.add_trace(go.Scatter(x=[selected], y=best[:1], mode="markers", name="selected", marker={"size": 12}))
    return fig


def spectrum_figure(singular_values: Sequence[float]) -> go.Figure:
    """Singular values and cumulative explained variance."""
    s = np.asarray(singular_values, dtype=float)
    var = s**2
    total = float(var.sum())
    cumulative = np.cumsum(var) / total if total > 0 else np.zeros_like(var)
    index = list(range(1, len(s) + 1))
    fig = _figure(xaxis_title="component", yaxis_title="singular value",
                  yaxis2={"title": "cumulative ratio", "overlaying": "y", "side": "right", "range": [0, 1.05]})
    fig.add_trace(go.Bar(x=index, y=s.tolist(), name="singular value"))
    fig.add_trace(go.Scatter(x=index, y=cumulative.tolist(), mode="lines+markers", name="cumulative", yaxis="y2"))
    return fig


def silhouette_figure(scores: Mapping[int, float], selected: int) -> go.Figure:
    fig = _figure(xaxis_title="k", yaxis_title="silhouette")
    ks = sorted(scores)
    fig.add_trace(go.Bar(
        x=ks, y=[scores[k] for k in ks],
        marker={"color": ["#c53030" if k == selected else "#1a365d" for k in ks]},
    ))
    return fig


def trace_figure(trace: Sequence[float]) -> go.Figure:
    fig = _figure(xaxis_title="iteration", yaxis_title="sum of squared d_graph")
    fig.add_trace(go.Scatter(x=list(range(len(trace))), y=list(trace), mode="lines+markers"))
    return fig


def render_report_html(title: str, summary: str, charts: Mapping[str, go.Figure]) -> str:
    """Render a report page with one card per chart.

    Args:
        title: Page heading.
        summary: Markdown summary shown verbatim.
        charts: Chart title -> plotly figure, in display order.

    Returns:
        HTML string.
    """
    env = Environment(loader=FileSystemLoader(str(TEMPLATES_DIR)), autoescape=True)
    template = env.get_template("report.html.j2")
    items = [
        {"id": f"chart-{k}", "title": name, "figure_json": fig.to_json()}
        for k, (name, fig) in enumerate(charts.items())
    ]
    return template.render(title=title, summary=summary, charts=items)
