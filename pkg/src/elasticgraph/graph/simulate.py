"""Synthetic shape graphs and perturbed copies with known correspondences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from elasticgraph.curves.srvf import arc_length, fit_to_endpoints
from elasticgraph.errors import ArgumentError
from elasticgraph.graph.model import Edge, ShapeGraph


@dataclass(frozen=True)
class PerturbedPair:
    """A perturbed copy of ``source`` and where each source node went.

    ``correspondence[i]`` is the index in ``target`` of source node ``i``,
    or ``None`` when the node was deleted.
    """

    source: ShapeGraph
    target: ShapeGraph
    correspondence: tuple[int | None, ...]

    def padded_permutation(self) -> np.ndarray:
        """Ground-truth permutation between the null-padded pair."""
        return padded_permutation(self.source.n_nodes, self.target.n_nodes, self.correspondence)


def padded_permutation(n0: int, n1: int, correspondence: tuple[int | None, ...]) -> np.ndarray:
    """Extend a partial map ``V0 -> V1`` to a bijection on ``n0 + n1`` padded nodes.

    Layout follows :func:`~elasticgraph.graph.preprocess.pad_nulls`: source
    slots ``n0 + k`` are nulls standing for target node ``k`` and target
    slots ``n1 + i`` are nulls standing for source node ``i``.
    """
    n = n0 + n1
    sigma = np.full(n, -1, dtype=int)
    used = np.zeros(n, dtype=bool)
    for i, j in enumerate(correspondence):
        if j is None:
            sigma[i] = n1 + i
        else:
            sigma[i] = j
        used[sigma[i]] = True
    hit = {j for j in correspondence if j is not None}
    for k in range(n1):
        if k not in hit:
            sigma[n0 + k] = k
            used[k] = True
    free = iter(np.flatnonzero(~used))
    for s in range(n0, n):
        if sigma[s] < 0:
            sigma[s] = next(free)
    return sigma


def bent_curve(p: np.ndarray, q: np.ndarray, bend: float, n_points: int) -> np.ndarray:
    """Arc from ``p`` to ``q`` bulging sideways by ``bend`` times the chord."""
    t = np.linspace(0.0, 1.0, n_points)
    chord = q - p
    normal = np.array([-chord[1], chord[0]])
    return p + t[:, None] * chord + (bend * np.sin(np.pi * t))[:, None] * normal


def random_graph(
    n_nodes: int,
    rng: np.random.Generator,
    extra_edges: int = 1,
    extent: float = 10.0,
    max_bend: float = 0.2,
    n_points: int = 20,
    min_separation: float = 1.0,
) -> ShapeGraph:
    """Random connected shape graph.

    Nodes are scattered in a square; a nearest-neighbour spanning tree plus
    ``extra_edges`` short chords are drawn as gently bent curves.
    """
    if n_nodes < 1:
        raise ArgumentError("n_nodes must be positive")
    pts: list[np.ndarray] = []
    while len(pts) < n_nodes:
        cand = rng.uniform(0.0, extent, size=2)
        if all(np.linalg.norm(cand - p) >= min_separation for p in pts):
            pts.append(cand)
        elif rng.random() < 0.01:
            min_separation *= 0.9
    positions = np.array(pts)

    dist = cdist(positions, positions)
    pairs: set[tuple[int, int]] = set()
    for k in range(1, n_nodes):
        j = int(np.argmin(dist[k, :k]))
        pairs.add((j, k))
    if n_nodes > 2:
        candidates = sorted(
            ((dist[i, j], i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes) if (i, j) not in pairs)
        )
        for _, i, j in candidates[:extra_edges]:
            pairs.add((i, j))

    edges = {}
    for i, j in sorted(pairs):
        curve = bent_curve(positions[i], positions[j], rng.uniform(-max_bend, max_bend), n_points)
        edges[(i, j)] = Edge(curve, arc_length(curve))
    ids = tuple(f"n{i}" for i in range(n_nodes))
    return ShapeGraph(ids, positions, edges, {"generator": "random_graph"})


def perturb(
    g: ShapeGraph,
    rng: np.random.Generator,
    jitter: float = 0.05,
    bend: float = 0.03,
    drop_edges: int = 0,
    drop_nodes: int = 0,
    reorder: bool = True,
) -> PerturbedPair:
    """Perturbed copy of ``g`` with the ground-truth correspondence.

    Node positions move by Gaussian ``jitter``; each curve is refit to its
    moved endpoints and bent sideways by up to ``bend``. ``drop_nodes``
    removes nodes with their incident edges, ``drop_edges`` removes edges,
    and ``reorder`` shuffles the node order.
    """
    n = g.n_nodes
    keep_nodes = np.ones(n, dtype=bool)
    if drop_nodes:
        keep_nodes[rng.choice(n, size=min(drop_nodes, max(n - 1, 0)), replace=False)] = False
    keys = [k for k in sorted(g.edges) if keep_nodes[k[0]] and keep_nodes[k[1]]]
    if drop_edges and keys:
        gone = set(rng.choice(len(keys), size=min(drop_edges, len(keys)), replace=False).tolist())
        keys = [k for idx, k in enumerate(keys) if idx not in gone]

    moved = g.positions + rng.normal(0.0, jitter, size=g.positions.shape)
    kept = np.flatnonzero(keep_nodes)
    order = rng.permutation(len(kept)) if reorder else np.arange(len(kept))
    new_of_old: dict[int, int] = {}
    for new, pos in enumerate(order):
        new_of_old[int(kept[pos])] = new

    edges = {}
    for a, b in keys:
        e = g.edges[(a, b)]
        curve = fit_to_endpoints(e.points, moved[a], moved[b])
        t = np.linspace(0.0, 1.0, len(curve))
        chord = curve[-1] - curve[0]
        normal = np.array([-chord[1], chord[0]])
        curve = curve + (rng.uniform(-bend, bend) * np.sin(np.pi * t))[:, None] * normal
        na, nb = new_of_old[a], new_of_old[b]
        if na > nb:
            na, nb, curve = nb, na, curve[::-1]
        edges[(na, nb)] = Edge(curve, arc_length(curve))

    inv = np.empty(len(kept), dtype=int)
    for old, new in new_of_old.items():
        inv[new] = old
    target = ShapeGraph(
        tuple(g.node_ids[i] for i in inv),
        moved[inv] if len(inv) else np.zeros((0, 2)),
        edges,
        {"perturbed_from": g.metadata.get("generator", "graph")},
    )
    correspondence = tuple(new_of_old.get(i) for i in range(n))
    return PerturbedPair(g, target, correspondence)


def population(
    template: ShapeGraph,
    size: int,
    rng: np.random.Generator,
    jitter: float = 0.05,
    bend: float = 0.03,
) -> list[ShapeGraph]:
    """``size`` perturbed copies of ``template`` keeping its node order."""
    return [perturb(template, rng, jitter=jitter, bend=bend, reorder=False).target for _ in range(size)]
