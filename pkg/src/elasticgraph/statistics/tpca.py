"""Tangent PCA of registered shape graphs around their Karcher mean.

Every input is flattened on the mean's template slots in a fixed order:
the edge SRVF block, then the edge weight block, then the node position
block. Edge blocks are scaled by sqrt(lambda) and the node block by
sqrt(1 - lambda), so Euclidean distance in the flattened space tracks the
linearized graph distance. Shooting vectors are differences from the
flattened mean.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from sklearn.decomposition import PCA

from elasticgraph.config import FAINT_WEIGHT_FRACTION
from elasticgraph.errors import ArgumentError
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.graph.schema import TangentRecord
from elasticgraph.statistics.mean import MeanResult, Slot, assemble, matched_arrays, slot_references, template_slots

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TangentModel:
    mean: ShapeGraph
    slots: tuple[Slot, ...]
    n_samples: int
    lam: float
    base: NDArray[np.float64]
    mean_srvfs: NDArray[np.float64]
    mean_weights: NDArray[np.float64]
    vectors: NDArray[np.float64]
    center: NDArray[np.float64]
    directions: NDArray[np.float64]
    singular_values: NDArray[np.float64]

    def __post_init__(self) -> None:
        for name in ("base", "mean_srvfs", "mean_weights", "vectors", "center", "directions", "singular_values"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_inputs(self) -> int:
        return len(self.vectors)

    @property
    def n_components(self) -> int:
        return len(self.directions)

    @property
    def dimension(self) -> int:
        return len(self.base)

    @property
    def layout(self) -> tuple[int, int, int]:
        """Sizes of the SRVF, weight and position blocks."""
        s = len(self.slots)
        return s * self.n_samples * 2, s, self.mean.n_nodes * 2

    def explained_variance_ratio(self) -> NDArray[np.float64]:
        var = self.singular_values**2
        total = float(var.sum())
        return var / total if total > 0 else np.zeros_like(var)

    def coefficients(self) -> NDArray[np.float64]:
        """Coordinates of each centered shooting vector along the directions."""
        return (self.vectors - self.center) @ self.directions.T

    def record(self, names: Sequence[str]) -> TangentRecord:
        return TangentRecord(
            graphs=list(names),
            singular_values=[float(s) for s in self.singular_values],
            explained_variance_ratio=[float(r) for r in self.explained_variance_ratio()],
            n_components=self.n_components,
            dimension=self.dimension,
        )


def _scales(lam: float) -> tuple[float, float]:
    return float(np.sqrt(lam)), float(np.sqrt(1.0 - lam))


def flatten(
    srvfs: NDArray[np.float64], weights: NDArray[np.float64], positions: NDArray[np.float64], lam: float
) -> NDArray[np.float64]:
    edge_scale, node_scale = _scales(lam)
    return np.concatenate([srvfs.ravel() * edge_scale, weights * edge_scale, positions.ravel() * node_scale])


def unflatten(model: TangentModel, x: NDArray[np.float64]):
    """Inverse of :func:`flatten`; a block with zero scale is read from the mean."""
    n_q, n_w, _ = model.layout
    edge_scale, node_scale = _scales(model.lam)
    if edge_scale > 0:
        srvfs = (x[:n_q] / edge_scale).reshape(len(model.slots), model.n_samples, 2)
        weights = x[n_q : n_q + n_w] / edge_scale
    else:
        srvfs, weights = model.mean_srvfs.copy(), model.mean_weights.copy()
    if node_scale > 0:
        positions = (x[n_q + n_w :] / node_scale).reshape(-1, 2)
    else:
        positions = model.mean.positions.copy()
    return srvfs, weights, positions


def tangent_pca(result: MeanResult) -> TangentModel:
    """Principal directions of the shooting vectors of ``result``'s inputs."""
    regs = result.registrations
    if len(regs) < 2:
        raise ArgumentError(f"tangent_pca needs at least two registered inputs, got {len(regs)}")
    mean = result.mean
    lam = result.params.lam
    n_samples = result.params.n_samples
    slots = template_slots(mean, regs)
    references = slot_references(mean, slots, n_samples)

    mean_srvfs = np.zeros((len(slots), n_samples, 2))
    mean_weights = np.zeros(len(slots))
    for s, slot in enumerate(slots):
        if slot in references:
            mean_srvfs[s] = references[slot]
            mean_weights[s] = mean.edges[slot].weight
    base = flatten(mean_srvfs, mean_weights, mean.positions, lam)

    rows = []
    for reg in regs:
        m = matched_arrays(mean, reg, slots, n_samples, references)
        rows.append(flatten(m.srvfs, m.weights, m.positions, lam) - base)
    vectors = np.array(rows)
    center = vectors.mean(axis=0)
    n_values = min(vectors.shape)

    if not np.any(vectors - center):
        singular = np.zeros(n_values)
        directions = np.zeros((0, vectors.shape[1]))
    else:
        pca = PCA(svd_solver="full").fit(vectors)
        center = pca.mean_
        singular = pca.singular_values_
        keep = singular > max(1e-12, 1e-9 * float(singular[0]))
        directions = pca.components_[keep]
    logger.info(
        "Tangent PCA: %d inputs, dimension %d, %d nonzero component(s)",
        len(regs), vectors.shape[1], len(directions),
    )
    return TangentModel(
        mean, slots, n_samples, lam, base, mean_srvfs, mean_weights, vectors, center, directions, singular
    )


def pc_deformation(model: TangentModel, direction: int, t: float) -> ShapeGraph:
    """Graph at ``t`` component standard deviations along ``direction``.

    Weights are clamped at zero; edges lighter than a small fraction of the
    heaviest one are listed under ``metadata["faint"]``.
    """
    if not 0 <= direction < model.n_components:
        raise ArgumentError(f"direction must lie in [0, {model.n_components}), got {direction}")
    step = model.singular_values[direction] / np.sqrt(model.n_inputs)
    x = model.base + t * step * model.directions[direction]
    srvfs, weights, positions = unflatten(model, x)
    weights = np.maximum(weights, 0.0)
    heaviest = float(weights.max()) if len(weights) else 0.0
    faint = [
        f"{model.mean.node_ids[a]}-{model.mean.node_ids[b]}"
        for (a, b), w in zip(model.slots, weights)
        if 0 < w < FAINT_WEIGHT_FRACTION * heaviest
    ]
    metadata = {**model.mean.metadata, "direction": direction, "t": float(t), "faint": faint}
    return assemble(model.mean, model.slots, srvfs, weights, positions, metadata)
