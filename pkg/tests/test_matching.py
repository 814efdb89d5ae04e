"""Tests for affinity construction, QAP solvers, d_graph and graph geodesics."""

import numpy as np
import pytest

from elasticgraph.curves import d_srv, fit_to_endpoints, from_srvf, register, srv_geodesic
from elasticgraph.errors import ArgumentError, PreconditionError, SizeError
from elasticgraph.graph import pad_nulls, pad_to
from elasticgraph.graph.simulate import perturb, random_graph
from elasticgraph.matching import (
    MatchingParams,
    Registration,
    build_affinity,
    d_graph,
    estimate_mean_distance,
    graph_geodesic,
    node_affinities,
    qap_exact,
    qap_solve,
    register_pair,
    registration_record,
)
from elasticgraph.matching.geodesic import _tracks
from elasticgraph.matching.solvers import check_permutation
from elasticgraph.metric import GeodesicCase, WeightedShape, geodesic_case
from tests.conftest import graph_from


def two_node(rng):
    p = rng.uniform(0, 3, size=(2, 2))
    return graph_from(p, [(0, 1)], bend=float(rng.uniform(-0.3, 0.3)))



def test_self_distance_is_zero(triangle, params):
    reg = register_pair(triangle, triangle, params)
    assert reg.d_graph < 1e-6
    for a in range(3):
        assert reg.permutation[a] == a


def test_d_graph_of_identity_is_zero(star, params):
    p0, p1 = pad_nulls(star, star)
    m = estimate_mean_distance(p0, p1)
    assert d_graph(p0, p1, np.arange(p0.n_nodes), params.lam, params.eta, params.e, m, n_samples=10) == 0.0


def test_distance_is_positive_for_different_graphs(path3, triangle, params):
    assert register_pair(path3, triangle, params).d_graph > 0.0


def test_node_affinities(path3, triangle):
    p0, p1 = pad_nulls(path3, triangle)
    aff = node_affinities(p0, p1, lam=0.5, e=0.7, mean_distance=1.0)
    assert aff.shape == (6, 6)
    np.testing.assert_allclose(aff[3:, 3:], 0.5)
    assert np.all(aff[:3, :3] >= 0.0) and np.all(aff[:3, :3] <= 0.5)
    assert aff[:3, :3].min() == pytest.approx(0.0)


def test_affinity_rejects_bad_input(path3, triangle, star):
    with pytest.raises(ArgumentError):
        build_affinity(path3, star, 0.5, 1.0, 0.7, 10)
    p0, p1 = pad_nulls(path3, triangle)
    with pytest.raises(ArgumentError):
        build_affinity(p0, p1, 1.5, 1.0, 0.7, 10)
    with pytest.raises(ArgumentError):
        build_affinity(p0, p1, 0.5, 0.0, 0.7, 10)


def test_affinity_is_symmetric(path3, triangle):
    p0, p1 = pad_nulls(path3, triangle)
    K = build_affinity(p0, p1, 0.5, 1.0, 0.7, 10).dense()
    np.testing.assert_allclose(K, K.T)


def test_solver_is_exact_on_tiny_problems(rng):
    for _ in range(20):
        p0, p1 = pad_nulls(two_node(rng), two_node(rng))
        K = build_affinity(p0, p1, 0.5, 1.0, 0.7, 8)
        assert qap_solve(K).objective == pytest.approx(qap_exact(K).objective, abs=1e-9)


def small_pair(rng, index):
    """Graph pair with at most 7 real nodes between them."""
    n0 = int(rng.integers(2, 5))
    g0 = random_graph(n0, rng, extra_edges=int(rng.integers(0, 2)))
    if index % 2:
        return g0, perturb(g0, rng, jitter=0.3, bend=0.1, drop_nodes=int(n0 == 4)).target
    n1 = int(rng.integers(2, 8 - n0))
    return g0, random_graph(n1, rng, extra_edges=int(rng.integers(0, 2)))


@pytest.mark.slow
def test_solver_matches_exact_on_small_suite():
    rng = np.random.default_rng(2024)
    hits = 0
    for index in range(100):
        g0, g1 = small_pair(rng, index)
        assert g0.n_nodes + g1.n_nodes <= 7
        p0, p1 = pad_nulls(g0, g1)
        K = build_affinity(p0, p1, 0.5, 1.0, 0.7, 8)
        exact = qap_exact(K)
        solved = qap_solve(K, seed=0)
        assert solved.objective <= exact.objective + 1e-9
        hit = solved.objective >= exact.objective - 1e-9
        if K.n <= 4:
            assert hit
        hits += hit
    assert hits >= 90


def test_exact_solver_undoes_relabelling(rng):
    for n in (3, 4):
        g = random_graph(n, rng)
        pair = perturb(g, rng, jitter=0.0, bend=0.0, reorder=True)
        p0, p1 = pad_nulls(pair.source, pair.target)
        found = qap_exact(build_affinity(p0, p1, 0.5, 1.0, 0.7, 10)).permutation
        assert tuple(int(j) for j in found[:n]) == pair.correspondence


def test_solver_is_deterministic(path3, triangle):
    p0, p1 = pad_nulls(path3, triangle)
    K = build_affinity(p0, p1, 0.5, 1.0, 0.7, 8)
    np.testing.assert_array_equal(qap_solve(K, seed=3).permutation, qap_solve(K, seed=3).permutation)


def test_exact_solver_size_limit(rng):
    big = graph_from(rng.uniform(0, 5, size=(5, 2)), [(0, 1), (1, 2), (2, 3), (3, 4)])
    p0, p1 = pad_nulls(big, graph_from(rng.uniform(0, 5, size=(4, 2)), [(0, 1)]))
    with pytest.raises(SizeError):
        qap_exact(build_affinity(p0, p1, 0.5, 1.0, 0.7, 6))


def test_check_permutation():
    with pytest.raises(ArgumentError):
        check_permutation(np.array([0, 0, 1]), 3)
    np.testing.assert_array_equal(check_permutation([2, 0, 1], 3), [2, 0, 1])


@pytest.mark.slow
def test_recovers_perturbed_copies():
    rng = np.random.default_rng(11)
    params = MatchingParams(n_samples=12, restarts=2)
    recovered = 0
    for trial in range(50):
        g = random_graph(4 + trial % 3, rng)
        pair = perturb(
            g, rng, jitter=0.02, bend=0.01,
            drop_edges=int(trial % 5 == 3), drop_nodes=int(trial % 5 == 4),
        )
        reg = register_pair(pair.source, pair.target, params)
        truth = d_graph(
            reg.source, reg.target, pair.padded_permutation(), params.lam, params.eta, params.e,
            reg.mean_distance, n_samples=params.n_samples,
        )
        recovered += reg.d_graph <= truth + 1e-3
    assert recovered >= 40


def test_single_edge_against_edgeless_graph():
    edge = graph_from([(0, 0), (1, 0)], [(0, 1)])
    bare = graph_from([(0, 0), (1, 0)], [])
    p0, p1 = pad_nulls(edge, bare)
    d = d_graph(p0, p1, np.arange(4), 1.0, 1.0, 0.7, 1.0, n_samples=10)
    assert d == pytest.approx(np.sqrt(2.0), rel=1e-9)


def test_d_graph_at_lambda_extremes(path3):
    lifted = graph_from([(0, 0.5), (1, 0.5), (2, 0.5)], [(0, 1), (1, 2)])
    p0, p1 = pad_nulls(path3, lifted)
    sigma = np.arange(p0.n_nodes)
    # Node term only: three matched nodes each 0.5 apart.
    assert d_graph(p0, p1, sigma, 0.0, 1.0, 0.7, 1.0, n_samples=10) == pytest.approx(np.sqrt(0.75), rel=1e-9)
    # Edge term only: translated copies of the same curves.
    assert d_graph(p0, p1, sigma, 1.0, 1.0, 0.7, 1.0, n_samples=10) == pytest.approx(0.0, abs=1e-6)


def test_d_graph_squared_is_linear_in_lambda(path3, triangle, params):
    reg = register_pair(path3, triangle, params)

    def at(lam):
        return d_graph(
            reg.source, reg.target, reg.permutation, lam, params.eta, params.e, reg.mean_distance,
            n_samples=params.n_samples,
        )

    edge_only, node_only = at(1.0), at(0.0)
    assert edge_only > 0 and node_only > 0
    for lam in (0.25, 0.5, 0.8):
        assert at(lam) ** 2 == pytest.approx(lam * edge_only**2 + (1 - lam) * node_only**2, rel=1e-9)


def test_extra_null_padding_leaves_distance_unchanged(path3, triangle, params):
    reg = register_pair(path3, triangle, params)
    n = reg.source.n_nodes
    big0, big1 = pad_to(reg.source, n + 3), pad_to(reg.target, n + 3)
    sigma = np.concatenate([reg.permutation, np.arange(n, n + 3)])
    d = d_graph(
        big0, big1, sigma, params.lam, params.eta, params.e, reg.mean_distance, n_samples=params.n_samples
    )
    assert d == pytest.approx(reg.d_graph, abs=1e-9)


def test_register_pair_ignores_argument_order(rng, params):
    for _ in range(10):
        g0, g1 = two_node(rng), two_node(rng)
        forward = register_pair(g0, g1, params).d_graph
        backward = register_pair(g1, g0, params).d_graph
        assert forward == pytest.approx(backward, abs=1e-3)


def test_registration_record(path3, triangle, params):
    reg = register_pair(path3, triangle, params)
    record = registration_record(reg, "a.json", "b.json")
    assert record.source == "a.json"
    assert len(record.mapping) == 6
    assert sorted(record.permutation) == list(range(6))
    assert record.d_graph == pytest.approx(reg.d_graph)
    assert record.n_samples == 10


def test_geodesic_endpoints(path3, triangle, params):
    reg = register_pair(path3, triangle, params)
    path = graph_geodesic(reg, 5)
    assert len(path) == 5
    first, last = path.frames[0], path.frames[-1]
    sigma = reg.permutation
    for a in range(reg.source.n_nodes):
        j = sigma[a]
        if not reg.source.is_null(a):
            np.testing.assert_allclose(first.positions[a], reg.source.positions[a])
        if not reg.source.is_null(a) and not reg.target.is_null(j):
            np.testing.assert_allclose(last.positions[a], reg.target.positions[j])


def test_vanishing_edge_weight_decreases(path3, params):
    shorter = graph_from([(0, 0), (1, 0)], [(0, 1)])
    reg = register_pair(path3, shorter, params)
    path = graph_geodesic(reg, 6)
    totals = [sum(e.weight for e in f.edges.values()) for f in path.frames]
    assert totals[0] == pytest.approx(2.0)
    assert totals[-1] == pytest.approx(1.0)
    for before, after in zip(totals, totals[1:]):
        assert after <= before + 1e-12


def test_geodesic_arguments(path3, params):
    reg = register_pair(path3, path3, params)
    with pytest.raises(ArgumentError):
        graph_geodesic(reg, 1)
    with pytest.raises(PreconditionError):
        graph_geodesic(Registration(reg.permutation, reg.objective), 3)


def single_edge_pair(params):
    g0 = graph_from([(0, 0), (1, 0)], [(0, 1)], bend=0.25)
    g1 = graph_from([(0.2, 0.1), (1.3, 0.6)], [(0, 1)], bend=-0.15)
    reg = register_pair(g0, g1, params)
    assert list(reg.permutation[:2]) == [0, 1]
    return reg


def test_single_edge_geodesic_follows_shape_path(params):
    reg = single_edge_pair(params)
    e0, e1 = reg.source.edges[(0, 1)], reg.target.edges[(0, 1)]
    q0, q1 = e0.srvf(params.n_samples), e1.srvf(params.n_samples)
    start, end = WeightedShape(q0, e0.weight), WeightedShape(register(q0, q1).registered, e1.weight)
    assert geodesic_case(start, end, params.eta, d_srv(q0, q1)) is GeodesicCase.SHAPE

    path = graph_geodesic(reg, 5)
    for frame in path.frames:
        u = frame.u
        pa = (1 - u) * reg.source.positions[0] + u * reg.target.positions[0]
        pb = (1 - u) * reg.source.positions[1] + u * reg.target.positions[1]
        expected = fit_to_endpoints(from_srvf(srv_geodesic(start.shape, end.shape, u), pa), pa, pb)
        edge = frame.edges[(0, 1)]
        np.testing.assert_allclose(edge.points, expected, atol=1e-9)
        assert edge.weight == pytest.approx((1 - u) * e0.weight + u * e1.weight)


def test_edge_tracks_use_symmetric_shape_distance(params):
    reg = single_edge_pair(params)
    (track,) = _tracks(reg.source, reg.target, reg.permutation, params.n_samples)
    q0 = reg.source.edges[(0, 1)].srvf(params.n_samples)
    q1 = reg.target.edges[(0, 1)].srvf(params.n_samples)
    assert track.shape_distance == d_srv(q0, q1)
    assert track.shape_distance == pytest.approx(d_srv(q1, q0), abs=1e-12)
