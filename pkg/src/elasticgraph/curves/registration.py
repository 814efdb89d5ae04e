"""Elastic registration of open curves by dynamic programming over a lattice.

The discrete objective for a monotone lattice path from ``(0, 0)`` to
``(n-1, n-1)`` is a sum of segment costs. A segment from ``(i-a, j-b)`` to
``(i, j)`` is a straight piece of the warp with slope ``m = b / a``; its cost
is the trapezoidal rule, at the ``a + 1`` lattice abscissae of ``q0``, of

    |q0(t) - sqrt(m) * q1(gamma(t))|^2

with ``q1`` linearly interpolated. The identity path therefore costs exactly
the discrete squared L2 distance, and the objective is unchanged when both
curves are reversed.

All internals work on stacks of curve pairs, shape ``(P, n, 2)``, so that a
whole table of edge distances is one batched computation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from elasticgraph.curves.srvf import Srv, grid, l2_norm_sq
from elasticgraph.errors import ArgumentError, SizeError

logger = logging.getLogger(__name__)

# Predecessor steps (a, b): a samples along q0, b along q1. Slopes lie in
# [1/3, 3]; the diagonal step comes first so it wins ties.
NEIGHBORS: tuple[tuple[int, int], ...] = ((1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2))

EXHAUSTIVE_MAX_SAMPLES = 8
_BATCH_CELLS = 1_000_000

Tables = dict[tuple[int, int], NDArray[np.float64]]


@dataclass(frozen=True)
class CurveMatch:
    """Result of registering ``q1`` onto ``q0``.

    ``gamma`` holds the warp at the sample grid, ``registered`` is
    ``q1(gamma) * sqrt(gamma')`` and ``objective`` the optimal discrete cost.
    """

    gamma: NDArray[np.float64]
    registered: Srv
    objective: float
    path: tuple[tuple[int, int], ...]

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in self.path)


def _check_stack(q0s: Srv, q1s: Srv) -> tuple[Srv, Srv]:
    q0s = np.asarray(q0s, dtype=float)
    q1s = np.asarray(q1s, dtype=float)
    if q0s.shape != q1s.shape or q0s.ndim != 3 or q0s.shape[2] != 2:
        raise ArgumentError(f"SRVFs must share an (n, 2) shape, got {q0s.shape[1:]} and {q1s.shape[1:]}")
    if q0s.shape[1] < 2:
        raise ArgumentError("SRVFs need at least two samples")
    return q0s, q1s


def _interp_rows(q: Srv, pos: NDArray[np.float64]) -> Srv:
    """Linear interpolation along axis -2 of ``q`` at fractional indices ``pos``."""
    n = q.shape[-2]
    k = np.clip(np.floor(pos).astype(int), 0, n - 2)
    frac = (pos - k)[:, None]
    return q[..., k, :] * (1.0 - frac) + q[..., k + 1, :] * frac


def _segment_costs(q0s: Srv, q1s: Srv) -> Tables:
    """Cost tables ``C[(a, b)][p, i, j]`` for the step ``(i-a, j-b) -> (i, j)``.

    Entries that would start outside the lattice are ``inf``.
    """
    n_pairs, n, _ = q0s.shape
    h = 1.0 / (n - 1)
    sq0 = np.sum(q0s * q0s, axis=2)
    tables: Tables = {}
    for a, b in NEIGHBORS:
        table = np.full((n_pairs, n, n), np.inf)
        if a < n and b < n:
            m = b / a
            root_m = np.sqrt(m)
            rows = np.arange(a, n)
            cols = np.arange(b, n)
            acc = np.zeros((n_pairs, len(rows), len(cols)))
            for x in range(a + 1):
                weight = 0.5 if x in (0, a) else 1.0
                i_idx = rows - a + x
                q1p = _interp_rows(q1s, (cols - b) + x * m)
                cross = np.einsum("pik,pjk->pij", q0s[:, i_idx], q1p)
                acc += weight * (
                    sq0[:, i_idx][:, :, None] - 2.0 * root_m * cross + m * np.sum(q1p * q1p, axis=2)[:, None, :]
                )
            table[:, a:, b:] = h * np.maximum(acc, 0.0)
        tables[(a, b)] = table
    return tables


def _dynamic_program(tables: Tables, n_pairs: int, n: int) -> tuple[NDArray[np.float64], NDArray[np.int8]]:
    energy = np.full((n_pairs, n, n), np.inf)
    choice = np.full((n_pairs, n, n), -1, dtype=np.int8)
    energy[:, 0, 0] = 0.0
    for i in range(1, n):
        best = np.full((n_pairs, n), np.inf)
        pick = np.full((n_pairs, n), -1, dtype=np.int8)
        for idx, (a, b) in enumerate(NEIGHBORS):
            if i < a or b >= n:
                continue
            cand = energy[:, i - a, : n - b] + tables[(a, b)][:, i, b:]
            better = cand < best[:, b:]
            best[:, b:] = np.where(better, cand, best[:, b:])
            pick[:, b:] = np.where(better, idx, pick[:, b:])
        energy[:, i] = best
        choice[:, i] = pick
    return energy[:, n - 1, n - 1], choice


def _backtrack(choice: NDArray[np.int8], n: int) -> list[tuple[int, int]]:
    path = [(n - 1, n - 1)]
    i, j = n - 1, n - 1
    while (i, j) != (0, 0):
        a, b = NEIGHBORS[choice[i, j]]
        i, j = i - a, j - b
        path.append((i, j))
    path.reverse()
    return path


def _match_from_path(q1: Srv, path: list[tuple[int, int]], objective: float) -> CurveMatch:
    n = len(q1)
    t = grid(n)
    h = 1.0 / (n - 1)
    if all(i == j for i, j in path):
        return CurveMatch(gamma=t.copy(), registered=q1.copy(), objective=objective, path=tuple(path))
    pi = np.array([p[0] for p in path], dtype=float) * h
    pj = np.array([p[1] for p in path], dtype=float) * h
    gamma = np.interp(t, pi, pj)
    gamma[0], gamma[-1] = 0.0, 1.0
    gamma_dot = np.maximum(np.gradient(gamma, h), 0.0)
    warped = _interp_rows(q1, gamma * (n - 1)) * np.sqrt(gamma_dot)[:, None]
    return CurveMatch(gamma=gamma, registered=warped, objective=objective, path=tuple(path))


def register(q0: Srv, q1: Srv) -> CurveMatch:
    """Find the warp of ``q1`` that best matches ``q0``."""
    q0s, q1s = _check_stack(np.asarray(q0, dtype=float)[None], np.asarray(q1, dtype=float)[None])
    n = q0s.shape[1]
    if np.array_equal(q0s, q1s):
        return _match_from_path(q1s[0], [(i, i) for i in range(n)], 0.0)
    objective, choice = _dynamic_program(_segment_costs(q0s, q1s), 1, n)
    logger.debug("DP registration on %dx%d lattice: objective %.6g", n, n, objective[0])
    return _match_from_path(q1s[0], _backtrack(choice[0], n), float(objective[0]))


def register_objectives(q0s: Srv, q1s: Srv) -> NDArray[np.float64]:
    """Optimal objective for each stacked pair ``(q0s[p], q1s[p])``."""
    q0s, q1s = _check_stack(q0s, q1s)
    n_pairs, n, _ = q0s.shape
    out = np.empty(n_pairs)
    chunk = max(1, _BATCH_CELLS // (n * n))
    for start in range(0, n_pairs, chunk):
        sl = slice(start, start + chunk)
        out[sl], _ = _dynamic_program(_segment_costs(q0s[sl], q1s[sl]), len(out[sl]), n)
    same = np.all(q0s == q1s, axis=(1, 2))
    out[same] = 0.0
    return out


def register_exhaustive(q0: Srv, q1: Srv) -> CurveMatch:
    """Brute-force minimum over every monotone lattice path; small grids only."""
    q0s, q1s = _check_stack(np.asarray(q0, dtype=float)[None], np.asarray(q1, dtype=float)[None])
    n = q0s.shape[1]
    if n > EXHAUSTIVE_MAX_SAMPLES:
        raise SizeError(f"exhaustive registration supports at most {EXHAUSTIVE_MAX_SAMPLES} samples, got {n}")
    tables = {key: t[0] for key, t in _segment_costs(q0s, q1s).items()}
    best_cost = np.inf
    best_path: list[tuple[int, int]] = []

    def walk(i: int, j: int, cost: float, path: list[tuple[int, int]]) -> None:
        nonlocal best_cost, best_path
        if (i, j) == (n - 1, n - 1):
            if cost < best_cost:
                best_cost, best_path = cost, list(path)
            return
        for a, b in NEIGHBORS:
            ni, nj = i + a, j + b
            if ni < n and nj < n:
                path.append((ni, nj))
                walk(ni, nj, cost + tables[(a, b)][ni, nj], path)
                path.pop()

    walk(0, 0, 0.0, [(0, 0)])
    return _match_from_path(q1s[0], best_path, float(best_cost))


def d_srv_many(q0s: Srv, q1s: Srv) -> NDArray[np.float64]:
    """Elastic distance for each stacked pair; see :func:`d_srv`."""
    q0s, q1s = _check_stack(q0s, q1s)
    objectives = register_objectives(np.concatenate([q0s, q1s]), np.concatenate([q1s, q0s]))
    forward, backward = np.split(objectives, 2)
    return np.sqrt(np.maximum(np.minimum(forward, backward), 0.0))


def d_srv(q0: Srv, q1: Srv) -> float:
    """Elastic distance; the smaller of the two registration directions."""
    return float(d_srv_many(np.asarray(q0, dtype=float)[None], np.asarray(q1, dtype=float)[None])[0])


def srv_geodesic(q0: Srv, q1: Srv, u: float) -> Srv:
    """Point at time ``u`` on the straight line from ``q0`` to a registered ``q1``."""
    if not 0.0 <= u <= 1.0:
        raise ArgumentError(f"u must lie in [0, 1], got {u}")
    q0s, q1s = _check_stack(np.asarray(q0, dtype=float)[None], np.asarray(q1, dtype=float)[None])
    if u == 0.0 or np.array_equal(q0s, q1s):
        return q0s[0].copy()
    if u == 1.0:
        return q1s[0].copy()
    return (1.0 - u) * q0s[0] + u * q1s[0]


def identity_objective(q0: Srv, q1: Srv) -> float:
    """Discrete objective of the unwarped pair."""
    return l2_norm_sq(np.asarray(q0, dtype=float) - np.asarray(q1, dtype=float))
