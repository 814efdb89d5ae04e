"""Karcher mean of shape graphs.

The mean keeps the node set of its initial template. Each iteration
registers every input to the current mean, reads off the matched edge
SRVFs, weights and node positions on the template's slots, and averages
them. Slots matched to null contribute a zero SRVF and a zero weight, so
averaged weights may be fractional.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from elasticgraph.config import MEAN_MAX_ITER, MEAN_REJECT_RTOL, MEAN_TOL
from elasticgraph.curves.registration import register
from elasticgraph.curves.srvf import fit_to_endpoints, from_srvf
from elasticgraph.errors import ArgumentError, DegenerateInputError
from elasticgraph.graph.model import Edge, ShapeGraph
from elasticgraph.graph.preprocess import assign_weights
from elasticgraph.matching.params import MatchingParams
from elasticgraph.matching.register import register_pair
from elasticgraph.matching.solvers import Registration

logger = logging.getLogger(__name__)

Slot = tuple[int, int]


@dataclass(frozen=True, eq=False)
class Matched:
    """One input read off on the mean template's slots.

    ``srvfs[s]`` and ``weights[s]`` belong to slot ``slots[s]``; ``positions``
    has one row per template node and ``real[a]`` says whether node ``a``
    found a real partner.
    """

    srvfs: NDArray[np.float64]
    weights: NDArray[np.float64]
    positions: NDArray[np.float64]
    real: NDArray[np.bool_]


@dataclass(frozen=True, eq=False)
class MeanResult:
    mean: ShapeGraph
    inputs: tuple[ShapeGraph, ...]
    registrations: tuple[Registration, ...]
    objective_trace: tuple[float, ...]
    params: MatchingParams

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def initial_index(graphs: Sequence[ShapeGraph]) -> int:
    """Largest graph: most nodes, then most edges, then first in order."""
    return max(range(len(graphs)), key=lambda i: (graphs[i].n_nodes, graphs[i].n_edges, -i))


def _real_edges(g: ShapeGraph):
    return ((k, e) for k, e in g.edges.items() if k[0] != k[1] and e.weight > 0)


def template_slots(mean: ShapeGraph, registrations: Sequence[Registration]) -> tuple[Slot, ...]:
    """Template node pairs carrying an edge in the mean or in any matched input."""
    n = mean.n_nodes
    slots = {k for k, _ in _real_edges(mean)}
    for reg in registrations:
        inverse = np.argsort(reg.permutation)
        for (j, k), _ in _real_edges(reg.target):
            a, b = int(inverse[j]), int(inverse[k])
            if a < n and b < n:
                slots.add((min(a, b), max(a, b)))
    return tuple(sorted(slots))


def matched_arrays(
    mean: ShapeGraph,
    reg: Registration,
    slots: Sequence[Slot],
    n_samples: int,
    references: dict[Slot, NDArray[np.float64]],
) -> Matched:
    """Read the input registered by ``reg`` off the template slots.

    Matched edge SRVFs are elastically registered to ``references[slot]``
    when one is given.
    """
    sigma = reg.permutation
    target = reg.target
    n = mean.n_nodes
    srvfs = np.zeros((len(slots), n_samples, 2))
    weights = np.zeros(len(slots))
    for s, (a, b) in enumerate(slots):
        e = target.edge(int(sigma[a]), int(sigma[b]))
        if e is None or e.weight <= 0:
            continue
        q = e.srvf(n_samples)
        ref = references.get((a, b))
        srvfs[s] = register(ref, q).registered if ref is not None else q
        weights[s] = e.weight
    image = sigma[:n]
    real = ~target.null_mask[image]
    positions = np.where(real[:, None], target.positions[image], mean.positions)
    return Matched(srvfs, weights, positions, real)


def slot_references(mean: ShapeGraph, slots: Sequence[Slot], n_samples: int) -> dict[Slot, NDArray[np.float64]]:
    """SRVFs of the mean's own real edges, keyed by slot."""
    real = dict(_real_edges(mean))
    return {slot: real[slot].srvf(n_samples) for slot in slots if slot in real}


def assemble(
    template: ShapeGraph,
    slots: Sequence[Slot],
    srvfs: NDArray[np.float64],
    weights: NDArray[np.float64],
    positions: NDArray[np.float64],
    metadata: dict | None = None,
) -> ShapeGraph:
    """Shape graph on ``template``'s nodes from per-slot SRVFs and weights."""
    edges = {}
    for s, (a, b) in enumerate(slots):
        if weights[s] <= 0:
            continue
        pa, pb = positions[a], positions[b]
        try:
            curve = fit_to_endpoints(from_srvf(srvfs[s], pa), pa, pb)
        except DegenerateInputError:
            logger.warning("Straight segment used for edge %s-%s", template.node_ids[a], template.node_ids[b])
            t = np.linspace(0.0, 1.0, len(srvfs[s]))[:, None]
            curve = pa + t * (pb - pa)
        edges[(a, b)] = Edge(curve, float(weights[s]))
    return ShapeGraph(template.node_ids, positions, edges, metadata if metadata is not None else template.metadata)


def _register_all(mean: ShapeGraph, graphs: Sequence[ShapeGraph], params: MatchingParams):
    regs = tuple(register_pair(mean, g, params) for g in graphs)
    return regs, float(sum(r.d_graph**2 for r in regs))


def _average(mean: ShapeGraph, regs: Sequence[Registration], n_samples: int) -> ShapeGraph:
    slots = template_slots(mean, regs)
    references = slot_references(mean, slots, n_samples)
    # slots the mean lacks are aligned to the first input that has them
    matched = []
    for reg in regs:
        m = matched_arrays(mean, reg, slots, n_samples, references)
        for s, slot in enumerate(slots):
            if slot not in references and m.weights[s] > 0:
                references[slot] = m.srvfs[s]
        matched.append(m)

    srvfs = np.mean([m.srvfs for m in matched], axis=0)
    weights = np.mean([m.weights for m in matched], axis=0)
    real = np.array([m.real for m in matched])
    stacked = np.array([m.positions for m in matched])
    counts = real.sum(axis=0)
    sums = np.where(real[:, :, None], stacked, 0.0).sum(axis=0)
    positions = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], mean.positions)
    return assemble(mean, slots, srvfs, weights, positions, {**mean.metadata, "mean_of": len(regs)})


def karcher_mean_graphs(
    graphs: Sequence[ShapeGraph],
    params: MatchingParams | None = None,
    tol: float = MEAN_TOL,
    max_iter: int = MEAN_MAX_ITER,
    init: str | int = "largest",
) -> MeanResult:
    """Graph minimizing the summed squared d_graph to ``graphs``.

    ``init`` is ``"largest"`` or the index of the starting graph. The loop
    stops when the objective changes by less than ``tol``, after
    ``max_iter`` updates, or when an update would raise the objective
    beyond the rejection tolerance (that update is discarded).
    """
    if len(graphs) == 0:
        raise ArgumentError("karcher_mean_graphs needs at least one graph")
    params = params or MatchingParams()
    if params.weights is not None:
        graphs = [assign_weights(g, params.weights) for g in graphs]
        params = params.model_copy(update={"weights": None})
    graphs = tuple(graphs)

    if init == "largest":
        start = initial_index(graphs)
    elif isinstance(init, int) and 0 <= init < len(graphs):
        start = init
    else:
        raise ArgumentError(f"init must be 'largest' or an index below {len(graphs)}, got {init!r}")

    mean = graphs[start]
    regs, objective = _register_all(mean, graphs, params)
    trace = [objective]
    logger.info("Mean initialized from graph %d: objective %.6g", start, objective)
    if len(graphs) == 1:
        return MeanResult(mean, graphs, regs, tuple(trace), params)

    for it in range(max_iter):
        if objective <= 0.0:
            break
        candidate = _average(mean, regs, params.n_samples)
        cand_regs, cand_objective = _register_all(candidate, graphs, params)
        if cand_objective > objective * (1.0 + MEAN_REJECT_RTOL):
            logger.warning(
                "Mean iteration %d rejected: objective %.6g > %.6g", it + 1, cand_objective, objective
            )
            break
        change = objective - cand_objective
        mean, regs, objective = candidate, cand_regs, cand_objective
        trace.append(objective)
        logger.info("Mean iteration %d: objective %.6g", it + 1, objective)
        if abs(change) < tol:
            break
    return MeanResult(mean, graphs, regs, tuple(trace), params)
