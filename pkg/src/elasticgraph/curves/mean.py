"""Karcher mean of curves under the elastic distance."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from elasticgraph.config import KARCHER_MAX_ITER, KARCHER_TOL, MEAN_REJECT_RTOL
from elasticgraph.curves.registration import register
from elasticgraph.curves.srvf import Srv, l2_norm_sq
from elasticgraph.errors import ArgumentError

logger = logging.getLogger(__name__)


def _align_all(mean: Srv, curves: Sequence[Srv]) -> tuple[list[Srv], float]:
    matches = [register(mean, q) for q in curves]
    return [m.registered for m in matches], float(sum(m.objective for m in matches))


def karcher_mean_curves_with_trace(
    curves: Sequence[Srv],
    tol: float = KARCHER_TOL,
    max_iter: int = KARCHER_MAX_ITER,
) -> tuple[Srv, list[float]]:
    """Karcher mean together with the Frechet objective of every accepted iterate.

    Starts from the first curve. A candidate whose objective exceeds the
    current one by more than the relative rejection tolerance is dropped and
    the loop stops.
    """
    if len(curves) == 0:
        raise ArgumentError("karcher_mean_curves needs at least one curve")
    qs = [np.asarray(q, dtype=float) for q in curves]
    shape = qs[0].shape
    if any(q.shape != shape for q in qs):
        raise ArgumentError("all curves must share the same sample count")

    mean = qs[0].copy()
    if len(qs) == 1:
        return mean, [0.0]

    aligned, objective = _align_all(mean, qs)
    trace = [objective]
    for it in range(max_iter):
        candidate = np.mean(aligned, axis=0)
        change = float(np.sqrt(l2_norm_sq(candidate - mean)))
        cand_aligned, cand_objective = _align_all(candidate, qs)
        if cand_objective > objective * (1.0 + MEAN_REJECT_RTOL) + 1e-15:
            logger.debug("Karcher step %d rejected: %.6g > %.6g", it, cand_objective, objective)
            break
        mean, aligned, objective = candidate, cand_aligned, cand_objective
        trace.append(objective)
        if change < tol:
            break
    return mean, trace


def karcher_mean_curves(
    curves: Sequence[Srv],
    tol: float = KARCHER_TOL,
    max_iter: int = KARCHER_MAX_ITER,
) -> Srv:
    """Karcher mean of SRVFs: register to the mean, average, repeat."""
    mean, _ = karcher_mean_curves_with_trace(curves, tol, max_iter)
    return mean
