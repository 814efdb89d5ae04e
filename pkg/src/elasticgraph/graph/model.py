"""In-memory shape graph.

Nodes are addressed by index; ``node_ids`` carries their labels. Null
(padding) nodes have a NaN position row. Edges are keyed by ``(i, j)`` with
``i <= j`` and store their curve oriented from node ``i`` to node ``j``.
A missing key is the null edge.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from elasticgraph.curves.srvf import Curve, arc_length, resample, to_srvf
from elasticgraph.metric.weighted import WeightedShape


def _frozen(arr: ArrayLike) -> NDArray[np.float64]:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Edge:
    points: Curve
    weight: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def length(self) -> float:
        return arc_length(self.points)

    def reversed(self) -> Edge:
        return Edge(self.points[::-1], self.weight)

    def srvf(self, n_samples: int) -> NDArray[np.float64]:
        return to_srvf(resample(self.points, n_samples, allow_null=True))

    def weighted_shape(self, n_samples: int) -> WeightedShape:
        return WeightedShape(self.srvf(n_samples), max(self.weight, 0.0))


@dataclass(frozen=True, eq=False)
class ShapeGraph:
    node_ids: tuple[str, ...]
    positions: NDArray[np.float64]
    edges: Mapping[tuple[int, int], Edge] = field(default_factory=dict)
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_ids", tuple(str(n) for n in self.node_ids))
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "edges", dict(self.edges))
        object.__setattr__(self, "metadata", dict(self.metadata))

    # --- construction ---

    @classmethod
    def build(
        cls,
        node_ids: Sequence[str],
        positions: ArrayLike,
        edges: Iterable[tuple[int, int, ArrayLike, float]] = (),
        metadata: Mapping[str, Any] | None = None,
    ) -> ShapeGraph:
        """Build from ``(i, j, points, weight)`` tuples; points run from i to j."""
        keyed: dict[tuple[int, int], Edge] = {}
        for i, j, points, weight in edges:
            pts = np.asarray(points, dtype=float)
            if i > j:
                i, j, pts = j, i, pts[::-1]
            keyed[(i, j)] = Edge(pts, weight)
        return cls(tuple(node_ids), np.asarray(positions, dtype=float).reshape(-1, 2), keyed, metadata or {})

    @classmethod
    def empty(cls) -> ShapeGraph:
        return cls((), np.zeros((0, 2)))

    # --- queries ---

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def null_mask(self) -> NDArray[np.bool_]:
        return np.isnan(self.positions).any(axis=1)

    @property
    def real_indices(self) -> NDArray[np.int_]:
        return np.flatnonzero(~self.null_mask)

    @property
    def n_real(self) -> int:
        return int((~self.null_mask).sum())

    def is_null(self, i: int) -> bool:
        return bool(self.null_mask[i])

    def index(self, node_id: str) -> int:
        return self.node_ids.index(node_id)

    def edge(self, i: int, j: int) -> Edge | None:
        """Edge between ``i`` and ``j`` oriented from ``i`` to ``j``."""
        if i <= j:
            return self.edges.get((i, j))
        found = self.edges.get((j, i))
        return found.reversed() if found is not None else None

    def weight(self, i: int, j: int) -> float:
        e = self.edges.get((min(i, j), max(i, j)))
        return e.weight if e is not None else 0.0

    def degree(self, i: int) -> int:
        return sum(1 for a, b in self.edges if i in (a, b) and a != b)

    def neighbors(self, i: int) -> list[int]:
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b) and a != b})

    def total_length(self) -> float:
        return float(sum(e.length for e in self.edges.values()))

    def total_weight(self) -> float:
        return float(sum(e.weight for e in self.edges.values()))

    # --- derived graphs ---

    def subgraph(self, indices: Sequence[int]) -> ShapeGraph:
        """Induced subgraph on ``indices``, kept in the given order."""
        remap = {old: new for new, old in enumerate(indices)}
        edges: dict[tuple[int, int], Edge] = {}
        for (a, b), e in self.edges.items():
            if a in remap and b in remap:
                na, nb = remap[a], remap[b]
                edges[(min(na, nb), max(na, nb))] = e if na <= nb else e.reversed()
        return ShapeGraph(
            tuple(self.node_ids[i] for i in indices),
            self.positions[list(indices)] if len(indices) else np.zeros((0, 2)),
            edges,
            self.metadata,
        )

    def replace(
        self,
        *,
        edges: Mapping[tuple[int, int], Edge] | None = None,
        metadata: Mapping[str, Any] | None = None,
    ) -> ShapeGraph:
        return ShapeGraph(
            self.node_ids,
            self.positions,
            self.edges if edges is None else edges,
            self.metadata if metadata is None else metadata,
        )

    def allclose(self, other: ShapeGraph, atol: float = 1e-9) -> bool:
        """Structural equality with numeric tolerance."""
        if self.node_ids != other.node_ids or set(self.edges) != set(other.edges):
            return False
        if not np.allclose(self.positions, other.positions, atol=atol, equal_nan=True):
            return False
        for key, e in self.edges.items():
            o = other.edges[key]
            if e.points.shape != o.points.shape or not np.allclose(e.points, o.points, atol=atol):
                return False
            if abs(e.weight - o.weight) > atol:
                return False
        return True

    def __repr__(self) -> str:
        return f"ShapeGraph(nodes={self.n_nodes}, real={self.n_real}, edges={self.n_edges})"
