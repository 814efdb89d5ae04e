"""Quadratic assignment solvers for ``max_P vec(P)^T K vec(P)``.

``qap_exact`` enumerates permutations. ``qap_solve`` combines a spectral
start, a Frank-Wolfe relaxation path over doubly stochastic matrices that
moves from a concave to a convex objective, pairwise-swap local search and
seeded random restarts.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from elasticgraph.config import (
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DENSE_EIG_MAX_SIZE,
    ENUMERATE_MAX_N,
    EXACT_QAP_MAX_N,
    LOCAL_SEARCH_MAX_N,
    SOLVER_FW_ITERATIONS,
    SOLVER_PATH_STEPS,
    TIE_RTOL,
)
from elasticgraph.errors import ArgumentError, SizeError
from elasticgraph.matching.affinity import AffinityMatrix

if TYPE_CHECKING:
    from elasticgraph.graph.model import ShapeGraph
    from elasticgraph.matching.params import MatchingParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Registration:
    """A node permutation between padded graphs and what it scores.

    ``permutation[a] = j`` sends node ``a`` of ``source`` to node ``j`` of
    ``target``. ``d_graph`` is filled in once the permutation is evaluated.
    """

    permutation: NDArray[np.int_]
    objective: float
    d_graph: float | None = None
    source: ShapeGraph | None = None
    target: ShapeGraph | None = None
    mean_distance: float = 0.0
    params: MatchingParams | None = None

    def __post_init__(self) -> None:
        perm = np.array(self.permutation, dtype=int)
        perm.setflags(write=False)
        object.__setattr__(self, "permutation", perm)

    @property
    def mapping(self) -> dict[str, str]:
        """Padded source id -> padded target id."""
        if self.source is None or self.target is None:
            return {str(a): str(j) for a, j in enumerate(self.permutation)}
        return {self.source.node_ids[a]: self.target.node_ids[j] for a, j in enumerate(self.permutation)}


def check_permutation(permutation: NDArray[np.int_], n: int) -> NDArray[np.int_]:
    perm = np.asarray(permutation, dtype=int)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ArgumentError(f"not a bijection on {n} nodes: {perm.tolist()}")
    return perm


def _best_index(values: NDArray[np.float64]) -> int:
    """First index whose value ties the maximum within a relative tolerance."""
    best = float(values.max())
    tol = TIE_RTOL * max(1.0, abs(best))
    return int(np.flatnonzero(values >= best - tol)[0])


def qap_exact(K: AffinityMatrix) -> Registration:
    """Globally optimal permutation; ties go to the lexicographically first."""
    n = K.n
    if n > EXACT_QAP_MAX_N:
        raise SizeError(f"qap_exact supports n <= {EXACT_QAP_MAX_N}, got {n}; use qap_solve")
    if n == 0:
        return Registration(np.zeros(0, dtype=int), 0.0)
    dense = K.dense()
    perms = np.array(list(itertools.permutations(range(n))), dtype=int)
    idx = perms + np.arange(n) * n
    values = np.zeros(len(perms))
    for start in range(0, len(perms), 5040):
        block = idx[start : start + 5040]
        values[start : start + 5040] = dense[block[:, :, None], block[:, None, :]].sum(axis=(1, 2))
    best = _best_index(values)
    return Registration(perms[best], float(values[best]))


class _Problem:
    """Objective, gradient and rounding helpers on one affinity matrix."""

    def __init__(self, K: AffinityMatrix):
        self.K = K
        self.n = K.n
        self.matrix = K.matrix
        self.dense = K.dense() if self.n <= LOCAL_SEARCH_MAX_N else None

    def value(self, perm: NDArray[np.int_]) -> float:
        x = np.zeros(self.n * self.n)
        x[self.K.assignment_indices(perm)] = 1.0
        return float(x @ (self.matrix @ x))

    def round(self, scores: NDArray[np.float64]) -> NDArray[np.int_]:
        rows, cols = linear_sum_assignment(scores.reshape(self.n, self.n), maximize=True)
        perm = np.empty(self.n, dtype=int)
        perm[rows] = cols
        return perm

    def spectral(self) -> NDArray[np.int_]:
        """Leading eigenvector of K rounded to a permutation."""
        size = self.n * self.n
        if size <= DENSE_EIG_MAX_SIZE:
            _, vecs = np.linalg.eigh(self.K.dense())
            lead = vecs[:, -1]
        else:
            try:
                _, vecs = eigsh(self.matrix, k=1, which="LA", v0=np.ones(size))
                lead = vecs[:, 0]
            except ArpackNoConvergence:
                logger.debug("eigsh did not converge; using the diagonal as spectral scores")
                lead = self.matrix.diagonal()
        return self.round(np.abs(lead))

    def frank_wolfe_path(self, start: NDArray[np.int_]) -> tuple[NDArray[np.int_], float]:
        """Follow x^T (K + mu I) x from concave to convex, rounding each step."""
        n = self.n
        best_perm = start.copy()
        best_val = self.value(start)
        x = np.full(n * n, 1.0 / n)
        x[self.K.assignment_indices(start)] += 1.0
        x *= 0.5
        c = float(np.abs(self.matrix).sum(axis=1).max())
        for mu in np.linspace(-c, c, SOLVER_PATH_STEPS):
            for _ in range(SOLVER_FW_ITERATIONS):
                kx = self.matrix @ x + mu * x
                perm = self.round(kx)
                s = np.zeros(n * n)
                s[self.K.assignment_indices(perm)] = 1.0
                d = s - x
                kd = self.matrix @ d + mu * d
                slope = 2.0 * float(d @ kx)
                curv = float(d @ kd)
                if slope <= 1e-12:
                    break
                if curv < 0:
                    step = min(1.0, -slope / (2.0 * curv))
                else:
                    step = 1.0
                x = x + step * d
                cand = self.round(x)
                val = self.value(cand)
                if val > best_val + TIE_RTOL * max(1.0, abs(best_val)):
                    best_perm, best_val = cand, val
        logger.debug("Frank-Wolfe path from start: objective %.9g", best_val)
        return best_perm, best_val

    def local_search(self, perm: NDArray[np.int_]) -> tuple[NDArray[np.int_], float]:
        """Apply the best improving two-node swap until none improves."""
        value = self.value(perm)
        if self.dense is None or self.n < 2:
            return perm, value
        n = self.n
        K = self.dense
        a_idx, b_idx = np.triu_indices(n, k=1)
        perm = perm.copy()
        while True:
            x = np.zeros(n * n)
            x[self.K.assignment_indices(perm)] = 1.0
            kx = K @ x
            p = a_idx * n + perm[a_idx]
            q = b_idx * n + perm[b_idx]
            r = a_idx * n + perm[b_idx]
            s = b_idx * n + perm[a_idx]
            linear = -kx[p] - kx[q] + kx[r] + kx[s]
            quad = (
                K[p, p] + K[q, q] + K[r, r] + K[s, s]
                + 2.0 * (K[p, q] - K[p, r] - K[p, s] - K[q, r] - K[q, s] + K[r, s])
            )
            gain = 2.0 * linear + quad
            k = int(np.argmax(gain))
            if gain[k] <= TIE_RTOL * max(1.0, abs(value)):
                break
            a, b = a_idx[k], b_idx[k]
            perm[a], perm[b] = perm[b], perm[a]
            value = self.value(perm)
        return perm, value


def qap_solve(K: AffinityMatrix, seed: int = DEFAULT_SEED, restarts: int = DEFAULT_RESTARTS) -> Registration:
    """Approximate maximizer of the affinity objective over permutations.

    Small problems are enumerated. Otherwise the result is never worse than
    the rounded spectral relaxation, and the same seed gives the same answer.
    """
    n = K.n
    if n <= ENUMERATE_MAX_N:
        return qap_exact(K)
    problem = _Problem(K)
    rng = np.random.default_rng(seed)

    spectral = problem.spectral()
    best_perm, best_val = spectral, problem.value(spectral)
    logger.debug("Spectral start: objective %.9g", best_val)

    starts = [spectral] + [rng.permutation(n) for _ in range(restarts)]
    for k, start in enumerate(starts):
        perm, _ = problem.frank_wolfe_path(start)
        perm, val = problem.local_search(perm)
        if val > best_val + TIE_RTOL * max(1.0, abs(best_val)):
            best_perm, best_val = perm, val
        logger.debug("Start %d: objective %.9g (best %.9g)", k, val, best_val)
    return Registration(best_perm, best_val)
