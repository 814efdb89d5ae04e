"""Timing of graph registration against graph size and curve sampling."""

from __future__ import annotations

import logging
import statistics
import time
from collections.abc import Sequence

import numpy as np

from elasticgraph.config import BENCH_AFFINITY_NODES, BENCH_AFFINITY_SAMPLES, BENCH_REPEATS, BENCH_SIZES
from elasticgraph.graph.preprocess import pad_nulls
from elasticgraph.graph.simulate import perturb, random_graph
from elasticgraph.matching.affinity import EdgeDistanceTable
from elasticgraph.matching.params import MatchingParams
from elasticgraph.matching.register import register_pair

logger = logging.getLogger(__name__)


def synthetic_pair(n_nodes: int, seed: int):
    """Random graph and a perturbed, reordered copy; same seed, same pair."""
    rng = np.random.default_rng(seed)
    g = random_graph(n_nodes, rng, extra_edges=max(1, n_nodes // 5))
    return perturb(g, rng, drop_edges=1)


def _median_seconds(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def time_registration(
    sizes: Sequence[int] = BENCH_SIZES,
    params: MatchingParams | None = None,
    repeats: int = BENCH_REPEATS,
) -> list[tuple[int, float]]:
    """Median ``register_pair`` wall time per node count."""
    params = params or MatchingParams()
    rows = []
    for n in sizes:
        pair = synthetic_pair(n, params.seed)
        seconds = _median_seconds(lambda: register_pair(pair.source, pair.target, params), repeats)
        logger.info("n=%d: %.4fs (median of %d)", n, seconds, repeats)
        rows.append((int(n), seconds))
    return rows


def time_affinity(
    samples: Sequence[int] = BENCH_AFFINITY_SAMPLES,
    n_nodes: int = BENCH_AFFINITY_NODES,
    seed: int = 0,
    repeats: int = BENCH_REPEATS,
) -> list[tuple[int, float]]:
    """Median time to tabulate every edge-pair shape distance, per sample count.

    The graph pair is fixed, so doubling the sample count should roughly
    quadruple the time.
    """
    pair = synthetic_pair(n_nodes, seed)
    p0, p1 = pad_nulls(pair.source, pair.target)
    rows = []
    for n_samples in samples:
        seconds = _median_seconds(lambda: EdgeDistanceTable.build(p0, p1, n_samples), repeats)
        logger.info("samples=%d: %.4fs (median of %d)", n_samples, seconds, repeats)
        rows.append((int(n_samples), seconds))
    return rows
