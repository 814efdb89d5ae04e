"""Tests for the shape-graph model, validation, preprocessing and simulation."""

import json

import numpy as np
import pytest

from elasticgraph.errors import GraphDataError, GraphParseError, PreconditionError
from elasticgraph.graph import (
    Severity,
    ShapeGraph,
    ViolationType,
    assign_weights,
    fiedler_bipartition,
    pad_nulls,
    pad_to,
    remove_small_components,
    validate,
)
from elasticgraph.graph.simulate import padded_permutation, perturb, population, random_graph
from elasticgraph.graph.validate import has_errors
from elasticgraph.storage import parse_graph
from tests.conftest import graph_from, straight


def doc(nodes, edges, **extra) -> str:
    return json.dumps({"nodes": nodes, "edges": edges, **extra})


def test_edges_are_oriented_low_to_high():
    g = ShapeGraph.build(["a", "b"], [(0, 0), (1, 0)], [(1, 0, straight((1, 0), (0, 0)), 1.0)])
    assert list(g.edges) == [(0, 1)]
    np.testing.assert_allclose(g.edges[(0, 1)].points[0], (0, 0))
    np.testing.assert_allclose(g.edge(1, 0).points[0], (1, 0))


def test_queries(path4):
    assert path4.n_nodes == 4
    assert path4.n_edges == 3
    assert path4.degree(1) == 2
    assert path4.neighbors(1) == [0, 2]
    assert path4.weight(2, 1) == pytest.approx(1.0)
    assert path4.weight(0, 3) == 0.0
    assert path4.total_length() == pytest.approx(3.0)


def test_parse_splits_parallel_curves():
    text = doc(
        [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 2, "y": 0}],
        [
            {"u": "a", "v": "b", "points": [[0, 0], [2, 0]]},
            {"u": "b", "v": "a", "points": [[2, 0], [1, 1], [0, 0]]},
        ],
    )
    g = parse_graph(text)
    assert g.n_nodes == 3
    assert "a~b#1" in g.node_ids
    m = g.index("a~b#1")
    np.testing.assert_allclose(g.positions[m], (1, 1))
    assert g.degree(m) == 2


def test_missing_weight_defaults_to_length():
    text = doc(
        [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 3, "y": 4}],
        [{"u": "a", "v": "b", "points": [[0, 0], [3, 4]]}],
    )
    assert parse_graph(text).weight(0, 1) == pytest.approx(5.0)


def test_endpoints_snap_within_tolerance():
    text = doc(
        [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 1, "y": 0}],
        [{"u": "a", "v": "b", "points": [[0.0005, 0], [1, 0]]}],
    )
    np.testing.assert_array_equal(parse_graph(text).edges[(0, 1)].points[0], (0, 0))


def test_endpoint_mismatch_is_rejected():
    text = doc(
        [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 1, "y": 0}],
        [{"u": "a", "v": "b", "points": [[0.1, 0], [1, 0]]}],
    )
    with pytest.raises(GraphDataError):
        parse_graph(text)


def test_missing_node_id_is_rejected():
    text = doc([{"id": "a", "x": 0, "y": 0}], [{"u": "a", "v": "z", "points": [[0, 0], [1, 0]]}])
    with pytest.raises(GraphDataError, match="z"):
        parse_graph(text)


def test_malformed_document():
    with pytest.raises(GraphParseError):
        parse_graph("{not json")
    with pytest.raises(GraphParseError, match="edges"):
        parse_graph(doc([{"id": "a", "x": 0, "y": 0}], [{"u": "a", "v": "a", "points": [[0, 0]]}]))


def test_extra_fields_are_kept_in_metadata():
    g = parse_graph(doc([{"id": "a", "x": 0, "y": 0}], [], source="retina-12"))
    assert g.metadata["source"] == "retina-12"


def test_pad_nulls(path3, triangle):
    p0, p1 = pad_nulls(path3, triangle)
    assert p0.n_nodes == p1.n_nodes == 6
    assert p0.null_mask.tolist() == [False] * 3 + [True] * 3
    assert p1.null_mask.tolist() == [False] * 3 + [True] * 3
    assert len(set(p0.node_ids)) == 6
    assert p0.edges.keys() == path3.edges.keys()


def test_pad_to(path3):
    g = pad_to(path3, 5)
    assert g.n_nodes == 5 and g.n_real == 3
    assert pad_to(path3, 2) is path3


def test_assign_weights(triangle):
    binary = assign_weights(triangle, "binary")
    assert all(e.weight == 1.0 for e in binary.edges.values())
    length = assign_weights(binary, "length")
    for key, e in length.edges.items():
        assert e.weight == pytest.approx(triangle.edges[key].length)


def test_remove_small_components():
    g = graph_from([(0, 0), (1, 0), (2, 0), (5, 5), (6, 5)], [(0, 1), (1, 2), (3, 4)])
    kept = remove_small_components(g, 3)
    assert kept.node_ids == ("n0", "n1", "n2")
    assert kept.n_edges == 2


def test_fiedler_bipartition_of_path(path4):
    left, right = fiedler_bipartition(path4)
    assert set(left.node_ids) == {"n0", "n1"}
    assert set(right.node_ids) == {"n2", "n3"}
    assert left.n_edges == right.n_edges == 1


def test_fiedler_bipartition_of_complete_graph():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    k4 = graph_from(square, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    left, right = fiedler_bipartition(k4)
    assert left.node_ids == ("n0", "n1")
    assert right.node_ids == ("n2", "n3")
    assert left.n_edges == right.n_edges == 1
    assert fiedler_bipartition(k4)[0].node_ids == left.node_ids


def test_fiedler_bipartition_of_single_edge():
    left, right = fiedler_bipartition(graph_from([(0, 0), (1, 0)], [(0, 1)]))
    assert left.node_ids == ("n0",)
    assert right.node_ids == ("n1",)
    assert left.n_edges == right.n_edges == 0


def test_fiedler_bipartition_needs_connected_graph():
    g = graph_from([(0, 0), (1, 0), (5, 5), (6, 5)], [(0, 1), (2, 3)])
    with pytest.raises(PreconditionError):
        fiedler_bipartition(g)


def test_valid_graph_has_no_violations(star):
    assert validate(star) == []


def test_validation_reports_problems():
    g = ShapeGraph.build(
        ["a", "b"],
        [(0, 0), (1, 0)],
        [(0, 0, [(0, 0), (1, 1), (0, 1), (0, 0)], 1.0), (0, 1, [(0, 0), (1.5, 0)], -2.0)],
    )
    violations = validate(g)
    kinds = {v.violation_type for v in violations}
    assert {ViolationType.SELF_LOOP, ViolationType.ENDPOINT_MISMATCH, ViolationType.NEGATIVE_WEIGHT} <= kinds
    assert has_errors(violations)
    assert all(v.severity == Severity.ERROR for v in violations)


def test_padded_permutation_is_bijection():
    sigma = padded_permutation(4, 3, (2, None, 0, 1))
    assert sorted(sigma.tolist()) == list(range(7))
    assert sigma[0] == 2 and sigma[2] == 0 and sigma[3] == 1
    assert sigma[1] == 3 + 1


def test_perturb_tracks_correspondence(rng):
    g = random_graph(6, rng)
    pair = perturb(g, rng, jitter=0.01, drop_nodes=1)
    assert pair.target.n_nodes == 5
    assert sum(c is None for c in pair.correspondence) == 1
    for i, j in enumerate(pair.correspondence):
        if j is not None:
            assert pair.target.node_ids[j] == g.node_ids[i]
            assert np.linalg.norm(pair.target.positions[j] - g.positions[i]) < 0.1
    assert validate(pair.target) == []


def test_simulation_is_seeded():
    a = random_graph(5, np.random.default_rng(3))
    b = random_graph(5, np.random.default_rng(3))
    assert a.allclose(b)


def test_population_keeps_node_order(triangle, rng):
    members = population(triangle, 3, rng)
    assert len(members) == 3
    assert all(m.node_ids == triangle.node_ids for m in members)
