"""Shared fixtures: small synthetic shape graphs and fast matching parameters."""

from __future__ import annotations

import numpy as np
import pytest

from elasticgraph.graph.model import ShapeGraph
from elasticgraph.matching.params import MatchingParams


def straight(p, q, n_points: int = 5) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n_points)[:, None]
    return (1.0 - t) * np.asarray(p, dtype=float) + t * np.asarray(q, dtype=float)


def arc(p, q, bend: float = 0.2, n_points: int = 15) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    t = np.linspace(0.0, 1.0, n_points)
    chord = q - p
    normal = np.array([-chord[1], chord[0]])
    return p + t[:, None] * chord + (bend * np.sin(np.pi * t))[:, None] * normal


def graph_from(positions, pairs, bend: float = 0.0) -> ShapeGraph:
    """Shape graph with nodes ``n0, n1, ...`` and one curve per pair; weight = length."""
    positions = np.asarray(positions, dtype=float)
    edges = []
    for i, j in pairs:
        pts = arc(positions[i], positions[j], bend) if bend else straight(positions[i], positions[j])
        length = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
        edges.append((i, j, pts, length))
    return ShapeGraph.build([f"n{k}" for k in range(len(positions))], positions, edges)


@pytest.fixture
def path4() -> ShapeGraph:
    """Four nodes on the x axis joined by unit segments."""
    return graph_from([(0, 0), (1, 0), (2, 0), (3, 0)], [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def path3() -> ShapeGraph:
    return graph_from([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])


@pytest.fixture
def triangle() -> ShapeGraph:
    """Unit-sided equilateral triangle with gently bent sides."""
    pos = [(0.0, 0.0), (1.0, 0.0), (0.5, np.sqrt(3) / 2)]
    return graph_from(pos, [(0, 1), (1, 2), (0, 2)], bend=0.1)


@pytest.fixture
def star() -> ShapeGraph:
    """A hub with three curved spokes."""
    pos = [(0, 0), (2, 0), (-1, 1.5), (-1, -1.5)]
    return graph_from(pos, [(0, 1), (0, 2), (0, 3)], bend=0.15)


@pytest.fixture
def params() -> MatchingParams:
    """Coarse sampling so registrations stay fast."""
    return MatchingParams(n_samples=10, restarts=1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)
