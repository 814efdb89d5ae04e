"""SVG renderings of shape graphs, geodesic frames, PCA grids and distance heatmaps.

All drawings share one convention: a fixed affine map from data to screen
coordinates with the y axis flipped and a margin of ``SVG_PADDING`` on each
side, nodes as filled circles whose radius is 1% of the data bounding-box
diagonal, and edges as polylines whose stroke opacity encodes weight.
Output depends only on the input numbers, so equal inputs render to equal
bytes.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from jinja2 import Environment, FileSystemLoader
from numpy.typing import ArrayLike, NDArray

from elasticgraph.config import SVG_PADDING, SVG_SIZE
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.matching.geodesic import GeodesicFrame

TEMPLATES_DIR = Path(__file__).resolve().parent / "templates"

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    autoescape=True,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _num(v: float) -> str:
    out = f"{v:.2f}"
    return "0.00" if out == "-0.00" else out


@dataclass(frozen=True)
class Viewport:
    """Data-to-screen map for a square canvas of ``size`` pixels."""

    xmin: float
    ymin: float
    scale: float
    offset_x: float
    offset_y: float
    size: float
    radius: float

    @classmethod
    def fit(cls, point_sets: Iterable[ArrayLike], size: float = SVG_SIZE, padding: float = SVG_PADDING) -> Viewport:
        pts = [np.asarray(p, dtype=float).reshape(-1, 2) for p in point_sets]
        pts = [p[np.isfinite(p).all(axis=1)] for p in pts]
        allpts = np.vstack(pts) if pts else np.zeros((0, 2))
        if len(allpts) == 0:
            allpts = np.zeros((1, 2))
        lo = allpts.min(axis=0)
        hi = allpts.max(axis=0)
        width, height = hi - lo
        span = max(width, height)
        usable = size * (1.0 - 2.0 * padding)
        scale = usable / span if span > 0 else 1.0
        offset_x = size * padding + (usable - width * scale) / 2.0
        offset_y = size * padding + (usable - height * scale) / 2.0
        diagonal = float(np.hypot(width, height))
        radius = 0.01 * diagonal * scale if diagonal > 0 else 0.01 * size
        return cls(float(lo[0]), float(lo[1]), float(scale), offset_x, offset_y, float(size), radius)

    def map(self, points: ArrayLike) -> NDArray[np.float64]:
        p = np.asarray(points, dtype=float).reshape(-1, 2)
        x = self.offset_x + (p[:, 0] - self.xmin) * self.scale
        y = self.size - (self.offset_y + (p[:, 1] - self.ymin) * self.scale)
        return np.column_stack([x, y])


def graph_points(g: ShapeGraph) -> list[NDArray[np.float64]]:
    return [g.positions, *(e.points for e in g.edges.values())]


def _polyline(vp: Viewport, points: ArrayLike) -> str:
    return " ".join(f"{_num(x)},{_num(y)}" for x, y in vp.map(points))


def _stroke(vp: Viewport) -> str:
    return _num(max(0.5, 0.4 * vp.radius))


def _clamp(v: float) -> float:
    return float(min(1.0, max(0.0, v)))


def _graph_shapes(g: ShapeGraph, vp: Viewport, max_weight: float | None = None) -> tuple[list[dict], list[dict]]:
    heaviest = max_weight if max_weight is not None else max((e.weight for e in g.edges.values()), default=0.0)
    edges = []
    for _, e in sorted(g.edges.items()):
        if e.weight <= 0:
            continue
        opacity = _clamp(e.weight / heaviest) if heaviest > 0 else 1.0
        edges.append({"points": _polyline(vp, e.points), "width": _stroke(vp), "opacity": _num(opacity)})
    nodes = [
        {"cx": _num(x), "cy": _num(y), "r": _num(vp.radius), "opacity": "1.00"}
        for x, y in vp.map(g.positions[g.real_indices])
    ]
    return edges, nodes


def render_graph(
    g: ShapeGraph,
    viewport: Viewport | None = None,
    title: str | None = None,
    max_weight: float | None = None,
) -> str:
    vp = viewport or Viewport.fit(graph_points(g))
    edges, nodes = _graph_shapes(g, vp, max_weight)
    size = int(vp.size)
    return _env.get_template("graph.svg.j2").render(width=size, height=size, title=title, edges=edges, nodes=nodes)


def frame_points(frame: GeodesicFrame) -> list[NDArray[np.float64]]:
    return [frame.positions, *(e.points for e in frame.edges.values())]


def render_frame(frame: GeodesicFrame, viewport: Viewport, max_weight: float) -> str:
    """One geodesic frame; edge opacity is weight over ``max_weight``."""
    vp = viewport
    edges = []
    for _, e in sorted(frame.edges.items()):
        if e.weight <= 0:
            continue
        opacity = _clamp(e.weight / max_weight) if max_weight > 0 else 1.0
        edges.append({"points": _polyline(vp, e.points), "width": _stroke(vp), "opacity": _num(opacity)})
    nodes = []
    for (x, y), opacity, p in zip(vp.map(frame.positions), frame.node_opacity, frame.positions):
        if np.isfinite(p).all() and opacity > 0:
            nodes.append({"cx": _num(x), "cy": _num(y), "r": _num(vp.radius), "opacity": _num(opacity)})
    size = int(vp.size)
    return _env.get_template("graph.svg.j2").render(width=size, height=size, title=None, edges=edges, nodes=nodes)


def render_grid(
    rows: Sequence[Sequence[ShapeGraph]],
    labels: Sequence[Sequence[str]],
    cell_size: float = SVG_SIZE / 2,
    title: str | None = None,
) -> str:
    """Graphs laid out in rows, drawn on one shared viewport."""
    graphs = [g for row in rows for g in row]
    vp = Viewport.fit((p for g in graphs for p in graph_points(g)), size=cell_size)
    heaviest = max((e.weight for g in graphs for e in g.edges.values()), default=0.0)
    cells = []
    for r, row in enumerate(rows):
        for c, g in enumerate(row):
            edges, nodes = _graph_shapes(g, vp, heaviest)
            cells.append(
                {"x": _num(c * cell_size), "y": _num(r * cell_size), "edges": edges, "nodes": nodes, "label": labels[r][c]}
            )
    n_cols = max((len(row) for row in rows), default=0)
    return _env.get_template("grid.svg.j2").render(
        width=int(n_cols * cell_size),
        height=int(len(rows) * cell_size),
        cell_size=_num(cell_size),
        cells=cells,
        title=title,
    )


def render_heatmap(
    matrix: ArrayLike,
    labels: Sequence[str],
    order: Sequence[int] | None = None,
    groups: Sequence[int] | None = None,
    cell: float = 12.0,
    margin: float = 80.0,
    title: str | None = None,
) -> str:
    """Distance matrix as a gray-scale grid, rows and columns in ``order``.

    Small distances are dark. ``groups`` (cluster labels) outlines the
    diagonal block of each cluster.
    """
    d = np.asarray(matrix, dtype=float)
    m = len(d)
    order = list(order) if order is not None else list(range(m))
    d = d[np.ix_(order, order)]
    top = float(d.max()) if m else 0.0
    cells = []
    for i in range(m):
        for j in range(m):
            shade = int(round(255 * d[i, j] / top)) if top > 0 else 0
            cells.append({"x": _num(margin + j * cell), "y": _num(margin + i * cell), "shade": shade})
    blocks = []
    if groups is not None and m:
        ordered = [groups[k] for k in order]
        start = 0
        for k in range(1, m + 1):
            if k == m or ordered[k] != ordered[start]:
                blocks.append(
                    {"x": _num(margin + start * cell), "y": _num(margin + start * cell), "size": _num((k - start) * cell)}
                )
                start = k
    text = [{"y": _num(margin + (i + 0.5) * cell), "text": labels[k]} for i, k in enumerate(order)]
    size = int(margin + m * cell + 10)
    return _env.get_template("heatmap.svg.j2").render(
        width=size, height=size, cells=cells, blocks=blocks, labels=text, margin=margin, cell=_num(cell), title=title
    )
