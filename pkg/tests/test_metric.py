"""Tests for the weighted-shape metric and its geodesics."""

import numpy as np
import pytest

from elasticgraph.curves import d_srv, resample, to_srvf
from elasticgraph.curves.srvf import l2_norm_sq
from elasticgraph.errors import ArgumentError
from elasticgraph.metric import GeodesicCase, WeightedShape, d_eta, geodesic_case, weighted_geodesic

ETA = 0.8


def l2(a: WeightedShape, b: WeightedShape) -> float:
    return float(np.sqrt(l2_norm_sq(a.shape - b.shape)))


def dist(a: WeightedShape, b: WeightedShape, eta: float = ETA) -> float:
    """d_eta with the plain L2 distance standing in for the elastic one."""
    return d_eta(a, b, eta, shape_distance=l2(a, b))


def random_shape(rng, n=8) -> WeightedShape:
    weight = 0.0 if rng.random() < 0.15 else float(rng.uniform(0.1, 3.0))
    return WeightedShape(rng.normal(size=(n, 2)), weight)


def test_null_shapes_are_identified():
    a = WeightedShape(np.ones((6, 2)), 0.0)
    assert a == WeightedShape.null(6)
    assert d_eta(a, WeightedShape.null(6), ETA) == 0.0


def test_distance_to_null_is_weight():
    a = WeightedShape(np.ones((6, 2)), 2.5)
    assert d_eta(a, WeightedShape.null(6), ETA) == pytest.approx(ETA * 2.5)


def test_symmetry_and_triangle_inequality(rng):
    for _ in range(1000):
        a, b, c = (random_shape(rng) for _ in range(3))
        assert dist(a, b) == dist(b, a)
        assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


def test_self_distance_is_zero():
    a = WeightedShape(np.arange(12.0).reshape(6, 2), 1.3)
    assert d_eta(a, a, ETA) == 0.0


def test_rejects_bad_parameters():
    with pytest.raises(ArgumentError):
        WeightedShape(np.ones((4, 2)), -1.0)
    a = WeightedShape(np.ones((4, 2)), 1.0)
    with pytest.raises(ArgumentError):
        d_eta(a, a, 0.0)


def test_geodesic_cases():
    q0 = np.zeros((5, 2))
    q0[:, 0] = 1.0
    q1 = np.zeros((5, 2))
    q1[:, 1] = 1.0
    near = WeightedShape(q0, 1.0)
    far = WeightedShape(q1, 1.0)
    assert geodesic_case(near, far, 1.0, shape_distance=0.5) is GeodesicCase.SHAPE
    assert geodesic_case(near, far, 1.0, shape_distance=5.0) is GeodesicCase.THROUGH_NULL
    assert geodesic_case(near, WeightedShape.null(5), 1.0) is GeodesicCase.GROW
    assert geodesic_case(WeightedShape.null(5), WeightedShape.null(5), 1.0) is GeodesicCase.NULL


@pytest.mark.parametrize(
    "w0, w1, scale",
    [
        (1.0, 2.0, 0.1),  # shape case
        (1.0, 1.0, 10.0),  # through null
        (1.5, 0.0, 1.0),  # shrink to null
        (0.0, 2.0, 1.0),  # grow from null
    ],
)
def test_geodesic_is_linear_in_time(rng, w0, w1, scale):
    q0 = rng.normal(size=(8, 2))
    q1 = q0 + scale * rng.normal(size=(8, 2))
    a = WeightedShape(q0, w0)
    b = WeightedShape(q1, w1)
    total = dist(a, b, 1.0)
    ds = l2(a, b)
    times = [0.0, 0.2, 0.45, 0.7, 1.0]
    path = [weighted_geodesic(a, b, 1.0, u, shape_distance=ds) for u in times]
    for i in range(len(times)):
        for j in range(i + 1, len(times)):
            assert dist(path[i], path[j], 1.0) == pytest.approx((times[j] - times[i]) * total, abs=1e-9)


def test_through_null_passes_the_null_shape():
    a = WeightedShape(np.ones((5, 2)), 1.0)
    b = WeightedShape(-np.ones((5, 2)), 1.0)
    mid = weighted_geodesic(a, b, 1.0, 0.5, shape_distance=10.0)
    assert mid.is_null


def test_geodesic_rejects_time_outside_unit_interval():
    a = WeightedShape(np.ones((5, 2)), 1.0)
    with pytest.raises(ArgumentError):
        weighted_geodesic(a, a, 1.0, -0.1)


@pytest.mark.slow
def test_elastic_symmetry_and_quotient_identification(rng):
    for _ in range(1000):
        a, b, c = (random_shape(rng) for _ in range(3))
        assert d_eta(a, b, ETA) == d_eta(b, a, ETA)
        assert d_eta(a, c, ETA) == d_eta(c, a, ETA)
        # every null shape is the same point, whatever its samples
        blank = WeightedShape(rng.normal(size=(8, 2)), 0.0)
        assert d_eta(blank, WeightedShape.null(8), ETA) == 0.0
        assert d_eta(a, blank, ETA) == pytest.approx(ETA * a.weight)
        assert d_eta(a, WeightedShape(a.shape.copy(), a.weight), ETA) == 0.0


def test_orthogonal_segments_closed_form():
    q0 = to_srvf(resample(np.array([[0.0, 0.0], [1.0, 0.0]]), 30))
    q1 = to_srvf(resample(np.array([[0.0, 0.0], [0.0, 1.0]]), 30))
    a, b = WeightedShape(q0, 1.0), WeightedShape(q1, 1.0)
    assert d_srv(q0, q1) == pytest.approx(np.sqrt(2), abs=1e-3)
    assert d_eta(a, b, 1.0) == pytest.approx(np.sqrt(2), abs=1e-3)
