"""Square-root velocity representation of open planar curves.

Curves and SRVFs are ``(n, 2)`` float arrays sampled on the uniform grid
``t_i = i / (n - 1)`` of ``[0, 1]``. Integrals over that grid use the
trapezoidal rule everywhere in the package.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_trapezoid, trapezoid

from elasticgraph.config import DEGENERATE_LENGTH
from elasticgraph.errors import DegenerateInputError

Curve = NDArray[np.float64]
Srv = NDArray[np.float64]


def as_curve(points: ArrayLike) -> Curve:
    """Coerce to a float ``(n, 2)`` array with at least two samples."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise DegenerateInputError(f"expected an (n>=2, 2) array of points, got shape {arr.shape}")
    return arr


def grid(n: int) -> NDArray[np.float64]:
    return np.linspace(0.0, 1.0, n)


def arc_length(curve: ArrayLike) -> float:
    """Polyline length of a sampled curve."""
    c = np.asarray(curve, dtype=float)
    return float(np.sum(np.linalg.norm(np.diff(c, axis=0), axis=1)))


def l2_norm_sq(q: Srv) -> float:
    """Squared L2 norm of a function sampled on the uniform grid."""
    n = len(q)
    return float(trapezoid(np.sum(q * q, axis=1), dx=1.0 / (n - 1)))


def resample(curve: ArrayLike, n_samples: int, allow_null: bool = False) -> Curve:
    """Resample ``curve`` to ``n_samples`` points at uniform arc-length spacing.

    Endpoints are preserved exactly. A zero-length curve is an error unless
    ``allow_null`` is set, in which case the repeated point is returned.
    """
    if n_samples < 2:
        raise DegenerateInputError(f"n_samples must be >= 2, got {n_samples}")
    c = as_curve(curve)
    seg = np.linalg.norm(np.diff(c, axis=0), axis=1)
    total = float(seg.sum())
    if total <= DEGENERATE_LENGTH:
        if allow_null:
            return np.repeat(c[:1], n_samples, axis=0)
        raise DegenerateInputError("cannot resample a curve of zero length")

    # drop repeated samples so the arc-length abscissa is strictly increasing
    keep = np.concatenate([[True], seg > 0])
    c = c[keep]
    s = np.concatenate([[0.0], np.cumsum(seg[seg > 0])])
    targets = grid(n_samples) * s[-1]
    out = np.column_stack([np.interp(targets, s, c[:, 0]), np.interp(targets, s, c[:, 1])])
    out[0] = c[0]
    out[-1] = c[-1]
    return out


def to_srvf(curve: ArrayLike) -> Srv:
    """q = v / sqrt(|v|) with v from central differences (one-sided at the ends)."""
    c = as_curve(curve)
    v = np.gradient(c, 1.0 / (len(c) - 1), axis=0)
    speed = np.linalg.norm(v, axis=1)
    q = np.zeros_like(v)
    moving = speed > DEGENERATE_LENGTH
    q[moving] = v[moving] / np.sqrt(speed[moving])[:, None]
    return q


def from_srvf(q: ArrayLike, origin: ArrayLike = (0.0, 0.0)) -> Curve:
    """Invert :func:`to_srvf` up to translation: beta = origin + integral of q|q|."""
    q = np.asarray(q, dtype=float)
    velocity = q * np.linalg.norm(q, axis=1)[:, None]
    path = cumulative_trapezoid(velocity, dx=1.0 / (len(q) - 1), axis=0, initial=0.0)
    return path + np.asarray(origin, dtype=float)


def reverse_srvf(q: Srv) -> Srv:
    """SRVF of the reversed curve; exact for :func:`to_srvf` outputs."""
    return -q[::-1]


def fit_to_endpoints(curve: ArrayLike, p: ArrayLike, q: ArrayLike) -> Curve:
    """Map ``curve`` by the rotation + uniform scale + translation that sends
    its endpoints to ``p`` and ``q``."""
    c = as_curve(curve)
    z = c[:, 0] + 1j * c[:, 1]
    zp = complex(*np.asarray(p, dtype=float))
    zq = complex(*np.asarray(q, dtype=float))
    span = z[-1] - z[0]
    if abs(span) <= DEGENERATE_LENGTH:
        raise DegenerateInputError("curve endpoints coincide; cannot fit")
    if abs(zq - zp) <= DEGENERATE_LENGTH:
        raise DegenerateInputError("target endpoints coincide; cannot fit")
    a = (zq - zp) / span
    w = zp + a * (z - z[0])
    out = np.column_stack([w.real, w.imag])
    out[0] = (zp.real, zp.imag)
    out[-1] = (zq.real, zq.imag)
    return out
