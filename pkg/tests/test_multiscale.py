"""Tests for internal node metrics, dendrograms and coarsening."""

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from elasticgraph.errors import ArgumentError, PreconditionError
from elasticgraph.graph import MetricKind, pad_to
from elasticgraph.graph.simulate import random_graph
from elasticgraph.matching import MatchingParams, register_pair
from elasticgraph.multiscale import (
    build_dendrogram,
    cluster_count,
    coarsen,
    internal_metric,
    multiscale,
    select_resolution,
)
from tests.conftest import graph_from


def test_resistance_of_single_edge():
    g = graph_from([(0, 0), (2.5, 0)], [(0, 1)])
    assert internal_metric(g).matrix[0, 1] == pytest.approx(2.5, abs=1e-9)


def test_resistance_of_unit_path(path3):
    assert internal_metric(path3).matrix[0, 2] == pytest.approx(2.0, abs=1e-9)


def test_resistance_of_unit_triangle():
    g = graph_from([(0, 0), (1, 0), (0.5, np.sqrt(3) / 2)], [(0, 1), (1, 2), (0, 2)])
    m = internal_metric(g).matrix
    np.testing.assert_allclose(m[np.triu_indices(3, 1)], 2 / 3, atol=1e-9)


@pytest.mark.slow
def test_resistance_bounded_by_geodesic():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        g = random_graph(int(rng.integers(3, 10)), rng, extra_edges=int(rng.integers(0, 4)))
        resistance = internal_metric(g, MetricKind.RESISTANCE).matrix
        geodesic = internal_metric(g, "geodesic").matrix
        assert np.all(resistance <= geodesic + 1e-9)


def test_metric_properties(star):
    for kind in MetricKind:
        m = internal_metric(star, kind).matrix
        np.testing.assert_array_equal(m, m.T)
        assert np.all(np.diag(m) == 0.0)
        assert np.all(m >= 0.0)


def test_euclidean_kind(star):
    np.testing.assert_allclose(internal_metric(star, "euclidean").matrix, cdist(star.positions, star.positions))


def test_disconnected_components_get_sentinel():
    g = graph_from([(0, 0), (1, 0), (5, 0), (7, 0)], [(0, 1), (2, 3)])
    m = internal_metric(g, "geodesic").matrix
    assert m[0, 2] == pytest.approx(10 * 2.0)
    assert m[0, 1] == pytest.approx(1.0)


def test_metric_rejects_null_nodes(path3):
    with pytest.raises(PreconditionError):
        internal_metric(pad_to(path3, 4))


def test_complete_linkage_on_collinear_points(path3):
    d = build_dendrogram(internal_metric(path3, "euclidean"))
    np.testing.assert_allclose(d.heights, [1.0, 2.0])
    assert d.cut(3).tolist() == [0, 1, 2]
    assert d.cut(2).tolist() == [0, 0, 1]
    assert d.cut(1).tolist() == [0, 0, 0]
    with pytest.raises(ArgumentError):
        d.cut(4)


def test_heights_are_non_decreasing():
    g = random_graph(9, np.random.default_rng(4), extra_edges=3)
    heights = build_dendrogram(internal_metric(g)).heights
    assert np.all(np.diff(heights) >= -1e-12)


@pytest.mark.parametrize("h, n, k", [(1.0, 5, 5), (0.5, 5, 3), (0.125, 4, 1), (0.01, 10, 1), (0.3, 10, 3)])
def test_cluster_count(h, n, k):
    assert cluster_count(h, n) == k


def test_cluster_count_rejects_bad_level():
    with pytest.raises(ArgumentError):
        cluster_count(0.0, 5)
    with pytest.raises(ArgumentError):
        cluster_count(1.5, 5)


def test_full_resolution_reproduces_graph(star):
    coarse = coarsen(star, build_dendrogram(internal_metric(star)), 1.0, n_samples=20)
    assert coarse.n_clusters == star.n_nodes
    assert coarse.graph.node_ids == star.node_ids
    assert coarse.graph.allclose(star, atol=1e-9)


def test_coarse_graph_at_every_level(path4):
    levels = [(i + 1) / 8 for i in range(8)]
    coarse = multiscale(path4, levels, n_samples=10)
    assert [c.n_clusters for c in coarse] == [max(1, int(np.floor(h * 4 + 0.5))) for h in levels]
    half = coarse[3]
    assert half.n_clusters == 2
    assert half.graph.n_edges == 1
    np.testing.assert_allclose(sorted(half.graph.positions[:, 0]), [0.5, 2.5])
    members = half.members(path4)
    assert sorted(sorted(v) for v in members.values()) == [["n0", "n1"], ["n2", "n3"]]


def test_single_cluster_has_no_edges(path4):
    (coarse,) = multiscale(path4, [0.1], n_samples=10)
    assert coarse.n_clusters == 1
    assert coarse.graph.n_edges == 0
    np.testing.assert_allclose(coarse.graph.positions[0], (1.5, 0.0))


def test_coarse_record(path4):
    (coarse,) = multiscale(path4, [0.5], n_samples=10)
    record = coarse.record(path4)
    assert record.level == 0.5
    assert record.n_clusters == 2


def test_identity_distance_at_full_resolution(triangle):
    params = MatchingParams(n_samples=12, restarts=1)
    (coarse,) = multiscale(triangle, [1.0], n_samples=12)
    assert register_pair(triangle, coarse.graph, params).d_graph < 1e-3 * triangle.total_length()


@pytest.mark.slow
def test_full_resolution_is_identity_on_random_graphs():
    rng = np.random.default_rng(5)
    params = MatchingParams(n_samples=12, restarts=2)
    for _ in range(20):
        g = random_graph(int(rng.integers(3, 6)), rng, extra_edges=int(rng.integers(0, 2)))
        (coarse,) = multiscale(g, [1.0], n_samples=12)
        assert register_pair(g, coarse.graph, params).d_graph < 1e-3 * g.total_length()


def test_select_resolution_of_self(path4):
    params = MatchingParams(n_samples=10, restarts=1)
    choice = select_resolution(path4, path4, [0.25, 0.5, 1.0], params)
    assert choice.level == 1.0
    assert [h for h, _ in choice.profile] == [0.25, 0.5, 1.0]
    assert choice.profile[-1][1] == pytest.approx(choice.registration.d_graph)


def test_select_resolution_needs_levels(path4):
    with pytest.raises(ArgumentError):
        select_resolution(path4, path4, [])
