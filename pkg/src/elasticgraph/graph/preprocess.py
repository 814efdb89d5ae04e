"""Shape-graph preprocessing.

Weight assignment, null padding, small-component removal, spectral
bipartition and conversion of raw documents (with multi-edges) into simple
shape graphs.
"""

from __future__ import annotations

import logging
from collections import defaultdict

import networkx as nx
import numpy as np
from scipy import linalg

from elasticgraph.config import SNAP_TOLERANCE
from elasticgraph.curves.srvf import Curve, arc_length
from elasticgraph.errors import GraphDataError, PreconditionError
from elasticgraph.graph.model import Edge, ShapeGraph
from elasticgraph.graph.schema import GraphDocument, WeightPolicy

logger = logging.getLogger(__name__)

NULL_PREFIX = "null:"


# --- Weights ---


def assign_weights(g: ShapeGraph, policy: WeightPolicy | str) -> ShapeGraph:
    """Set every real edge's weight: 1 for ``binary``, arc length for ``length``."""
    policy = WeightPolicy(policy)
    edges = {
        key: Edge(e.points, 1.0 if policy is WeightPolicy.BINARY else e.length)
        for key, e in g.edges.items()
    }
    return g.replace(edges=edges)


# --- Padding ---


def _null_ids(existing: set[str], ids: tuple[str, ...]) -> list[str]:
    out = []
    for node_id in ids:
        name = f"{NULL_PREFIX}{node_id}"
        while name in existing:
            name += "'"
        existing.add(name)
        out.append(name)
    return out


def _append_nulls(g: ShapeGraph, names: list[str]) -> ShapeGraph:
    positions = np.vstack([g.positions, np.full((len(names), 2), np.nan)])
    return ShapeGraph(g.node_ids + tuple(names), positions, g.edges, g.metadata)


def pad_nulls(g0: ShapeGraph, g1: ShapeGraph) -> tuple[ShapeGraph, ShapeGraph]:
    """Pad both graphs to ``|V0| + |V1|`` nodes.

    ``g0`` gets one null node per node of ``g1`` appended after its own and
    vice versa, so any node can be matched to "nothing".
    """
    p0 = _append_nulls(g0, _null_ids(set(g0.node_ids), g1.node_ids))
    p1 = _append_nulls(g1, _null_ids(set(g1.node_ids), g0.node_ids))
    return p0, p1


def pad_to(g: ShapeGraph, n: int) -> ShapeGraph:
    """Append null nodes until ``g`` has ``n`` nodes."""
    extra = n - g.n_nodes
    if extra <= 0:
        return g
    existing = set(g.node_ids)
    names = []
    k = 0
    while len(names) < extra:
        name = f"{NULL_PREFIX}#{k}"
        k += 1
        if name not in existing:
            names.append(name)
    return _append_nulls(g, names)


# --- Components and partitions ---


def to_networkx(g: ShapeGraph, positive_only: bool = True) -> nx.Graph:
    """Binary adjacency as an undirected networkx graph on node indices."""
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n_nodes))
    graph.add_edges_from(
        (a, b) for (a, b), e in g.edges.items() if a != b and (e.weight > 0 or not positive_only)
    )
    return graph


def remove_small_components(g: ShapeGraph, min_nodes: int) -> ShapeGraph:
    """Keep connected components with at least ``min_nodes`` nodes."""
    if min_nodes <= 0:
        return g
    graph = to_networkx(g, positive_only=False)
    keep = sorted(i for comp in nx.connected_components(graph) if len(comp) >= min_nodes for i in comp)
    dropped = g.n_nodes - len(keep)
    if dropped:
        logger.info("Removed %d node(s) in components smaller than %d", dropped, min_nodes)
    return g.subgraph(keep)


def _fiedler_vector(g: ShapeGraph) -> np.ndarray:
    graph = to_networkx(g)
    laplacian = nx.laplacian_matrix(graph, nodelist=range(g.n_nodes)).toarray().astype(float)
    vals, vecs = linalg.eigh(laplacian)
    scale = max(1.0, float(vals[-1]))
    space = np.flatnonzero(np.abs(vals - vals[1]) <= 1e-8 * scale)
    space = space[space > 0]
    basis = vecs[:, space]

    order = sorted(range(g.n_nodes), key=lambda i: g.node_ids[i])
    if basis.shape[1] > 1:
        # Degenerate eigenspace: project the node-id ramp onto it.
        ramp = np.empty(g.n_nodes)
        ramp[order] = np.arange(g.n_nodes, dtype=float)
        ramp -= ramp.mean()
        vec = basis @ (basis.T @ ramp)
        if np.linalg.norm(vec) <= 1e-12:
            vec = basis[:, 0]
    else:
        vec = basis[:, 0]

    eps = 1e-10 * float(np.max(np.abs(vec)))
    for i in order:
        if abs(vec[i]) > eps:
            if vec[i] > 0:
                vec = -vec
            break
    vec = np.where(np.abs(vec) <= eps, 0.0, vec)
    return vec


def fiedler_bipartition(g: ShapeGraph) -> tuple[ShapeGraph, ShapeGraph]:
    """Split ``g`` by the sign of its Fiedler vector.

    Returns ``(negative side, nonnegative side)`` as induced subgraphs;
    edges across the cut are dropped.
    """
    if g.n_nodes < 2:
        raise PreconditionError("fiedler_bipartition needs at least two nodes")
    if not nx.is_connected(to_networkx(g)):
        raise PreconditionError(
            "fiedler_bipartition needs a connected graph; run remove_small_components first"
        )
    vec = _fiedler_vector(g)
    negative = [i for i in range(g.n_nodes) if vec[i] < 0]
    rest = [i for i in range(g.n_nodes) if vec[i] >= 0]
    logger.info("Fiedler split: %d | %d nodes", len(negative), len(rest))
    return g.subgraph(negative), g.subgraph(rest)


# --- Documents ---


def split_at_midpoint(points: Curve) -> tuple[Curve, Curve, np.ndarray]:
    """Cut a polyline at half its arc length."""
    pts = np.asarray(points, dtype=float)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    half = s[-1] / 2.0
    k = int(np.clip(np.searchsorted(s, half, side="right") - 1, 0, len(pts) - 2))
    frac = (half - s[k]) / seg[k] if seg[k] > 0 else 0.0
    mid = pts[k] + frac * (pts[k + 1] - pts[k])
    first = np.vstack([pts[: k + 1], mid])
    second = np.vstack([mid, pts[k + 1 :]])
    return first, second, mid


def _snap(points: np.ndarray, start: np.ndarray | None, end: np.ndarray | None, label: str) -> np.ndarray:
    pts = np.array(points, dtype=float)
    for idx, target in ((0, start), (-1, end)):
        if target is None:
            continue
        gap = float(np.linalg.norm(pts[idx] - target))
        if gap > SNAP_TOLERANCE:
            raise GraphDataError(
                f"edge {label}: curve endpoint {pts[idx].tolist()} is {gap:.3g} from its node "
                f"(snap tolerance {SNAP_TOLERANCE:g})"
            )
        pts[idx] = target
    return pts


def simplify_multiedges(doc: GraphDocument) -> ShapeGraph:
    """Turn a raw document into a simple shape graph.

    Curves are oriented from the lower to the higher node index and their
    endpoints snapped onto the nodes. For a node pair carrying ``k > 1``
    curves the first is kept and each of the others is split at its
    arc-length midpoint by a new degree-two node named ``"{u}~{v}#{i}"``.
    Missing weights default to arc length.
    """
    node_ids = [n.id for n in doc.nodes]
    dupes = sorted({node_id for node_id in node_ids if node_ids.count(node_id) > 1})
    if dupes:
        raise GraphDataError(f"duplicate node id(s): {', '.join(dupes)}")
    positions = [(np.nan, np.nan) if n.is_null else (n.x, n.y) for n in doc.nodes]
    index = {node_id: i for i, node_id in enumerate(node_ids)}
    metadata = dict(doc.metadata)
    metadata.update(doc.model_extra or {})

    groups: dict[tuple[int, int], list[tuple[np.ndarray, float | None]]] = defaultdict(list)
    for k, rec in enumerate(doc.edges):
        for end in (rec.u, rec.v):
            if end not in index:
                raise GraphDataError(f"edge {k} ({rec.u}-{rec.v}) references missing node id {end!r}")
        i, j = index[rec.u], index[rec.v]
        pts = np.asarray(rec.points, dtype=float)
        if i > j:
            i, j, pts = j, i, pts[::-1]
        start = None if doc.nodes[i].is_null else np.asarray(positions[i], dtype=float)
        end = None if doc.nodes[j].is_null else np.asarray(positions[j], dtype=float)
        pts = _snap(pts, start, end, f"{node_ids[i]}-{node_ids[j]}")
        groups[(i, j)].append((pts, rec.weight))

    edges: dict[tuple[int, int], Edge] = {}
    for (i, j), curves in groups.items():
        pts, weight = curves[0]
        edges[(i, j)] = Edge(pts, arc_length(pts) if weight is None else weight)
        if len(curves) > 1 and i == j:
            logger.warning("Dropping %d extra self-loop(s) at %s", len(curves) - 1, node_ids[i])
            continue
        for extra, (pts, weight) in enumerate(curves[1:], start=1):
            first, second, mid = split_at_midpoint(pts)
            name = f"{node_ids[i]}~{node_ids[j]}#{extra}"
            while name in index:
                name += "'"
            m = len(node_ids)
            node_ids.append(name)
            positions.append((float(mid[0]), float(mid[1])))
            index[name] = m
            half = None if weight is None else weight / 2.0
            edges[(i, m)] = Edge(first, arc_length(first) if half is None else half)
            edges[(j, m)] = Edge(second[::-1], arc_length(second) if half is None else half)
        if len(curves) > 1 and i != j:
            logger.debug("Split %d parallel curve(s) between %s and %s", len(curves) - 1, node_ids[i], node_ids[j])

    return ShapeGraph(tuple(node_ids), np.asarray(positions, dtype=float).reshape(-1, 2), edges, metadata)
