"""Weighted shapes, the metric d_eta on them, and its geodesics.

A weighted shape is a pair ``(q, w)`` of an SRVF and a nonnegative weight;
every pair with ``w == 0`` is the same point, the null shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from elasticgraph.curves.registration import d_srv, srv_geodesic
from elasticgraph.curves.srvf import Srv
from elasticgraph.errors import ArgumentError


class GeodesicCase(str, Enum):
    SHAPE = "shape"
    THROUGH_NULL = "through_null"
    GROW = "grow"
    NULL = "null"


@dataclass(frozen=True, eq=False)
class WeightedShape:
    shape: Srv
    weight: float = field(default=1.0)

    def __post_init__(self) -> None:
        if not np.isfinite(self.weight) or self.weight < 0:
            raise ArgumentError(f"weight must be a finite nonnegative number, got {self.weight}")
        arr = np.array(self.shape, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "shape", arr)
        object.__setattr__(self, "weight", float(self.weight))

    @classmethod
    def null(cls, n_samples: int) -> WeightedShape:
        return cls(np.zeros((n_samples, 2)), 0.0)

    @property
    def is_null(self) -> bool:
        return self.weight == 0.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedShape):
            return NotImplemented
        if self.is_null and other.is_null:
            return True
        return self.weight == other.weight and np.array_equal(self.shape, other.shape)

    __hash__ = None  # type: ignore[assignment]


def _check_eta(eta: float) -> None:
    if not eta > 0:
        raise ArgumentError(f"eta must be positive, got {eta}")


def d_eta(a: WeightedShape, b: WeightedShape, eta: float, shape_distance: float | None = None) -> float:
    """min{ d_srv + eta*|w0 - w1|, eta*(w0 + w1) }.

    ``shape_distance`` may carry a precomputed d_srv of the two shapes. It is
    never evaluated when either side is null.
    """
    _check_eta(eta)
    through_null = eta * (a.weight + b.weight)
    if a.is_null or b.is_null:
        return through_null
    ds = d_srv(a.shape, b.shape) if shape_distance is None else shape_distance
    return min(ds + eta * abs(a.weight - b.weight), through_null)


def geodesic_case(a: WeightedShape, b: WeightedShape, eta: float, shape_distance: float | None = None) -> GeodesicCase:
    _check_eta(eta)
    if a.is_null and b.is_null:
        return GeodesicCase.NULL
    if a.is_null or b.is_null:
        return GeodesicCase.GROW
    ds = d_srv(a.shape, b.shape) if shape_distance is None else shape_distance
    if ds + eta * abs(a.weight - b.weight) <= eta * (a.weight + b.weight):
        return GeodesicCase.SHAPE
    return GeodesicCase.THROUGH_NULL


def weighted_geodesic(
    a: WeightedShape,
    b: WeightedShape,
    eta: float,
    u: float,
    shape_distance: float | None = None,
) -> WeightedShape:
    """Point at time ``u`` on the d_eta geodesic from ``a`` to ``b``.

    ``b.shape`` must already be registered to ``a.shape``. When the weight
    shortcut through the null shape is strictly shorter the path shrinks
    ``a`` to weight zero at ``u = w0 / (w0 + w1)`` and then grows ``b``.
    """
    if not 0.0 <= u <= 1.0:
        raise ArgumentError(f"u must lie in [0, 1], got {u}")
    case = geodesic_case(a, b, eta, shape_distance)
    w0, w1 = a.weight, b.weight
    if u == 0.0:
        return a
    if u == 1.0:
        return b

    if case is GeodesicCase.NULL:
        return WeightedShape(np.zeros_like(a.shape), 0.0)
    if case is GeodesicCase.GROW:
        shape = b.shape if a.is_null else a.shape
        return WeightedShape(shape, w0 + u * (w1 - w0))
    if case is GeodesicCase.SHAPE:
        return WeightedShape(srv_geodesic(a.shape, b.shape, u), w0 + u * (w1 - w0))

    alpha = w0 / (w0 + w1)
    if u <= alpha:
        return WeightedShape(a.shape, w0 * (1.0 - u / alpha))
    return WeightedShape(b.shape, w1 * (u - alpha) / (1.0 - alpha))
