"""Elastic shape analysis of open planar curves."""

from elasticgraph.curves.mean import karcher_mean_curves, karcher_mean_curves_with_trace
from elasticgraph.curves.registration import (
    CurveMatch,
    d_srv,
    d_srv_many,
    register,
    register_exhaustive,
    register_objectives,
    srv_geodesic,
)
from elasticgraph.curves.srvf import (
    arc_length,
    fit_to_endpoints,
    from_srvf,
    l2_norm_sq,
    resample,
    reverse_srvf,
    to_srvf,
)

__all__ = [
    "CurveMatch",
    "arc_length",
    "d_srv",
    "d_srv_many",
    "fit_to_endpoints",
    "from_srvf",
    "karcher_mean_curves",
    "karcher_mean_curves_with_trace",
    "l2_norm_sq",
    "register",
    "register_exhaustive",
    "register_objectives",
    "resample",
    "reverse_srvf",
    "srv_geodesic",
    "to_srvf",
]
