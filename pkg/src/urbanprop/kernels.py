"""Hot geometric kernels: batched open-segment vs. triangle intersection.

Two interchangeable implementations are provided: a numba ``@njit`` loop
kernel and a vectorized pure-numpy fallback.  Selection happens once at
import time via the ``URBANPROP_DISABLE_NUMBA`` environment variable (any
non-empty value other than ``"0"`` disables numba).  Both paths share the
same Moller-Trumbore math and tolerance conventions, so results are
bit-for-bit comparable; ``benchmarks/bench_kernels.py`` times them against
each other.

Conventions:
    * segments are open: hits closer than ``eps_hit`` (meters) to either
      endpoint are discarded,
    * a miss is encoded as ``np.inf`` in the returned parameter array,
    * the returned parameter ``t`` is the fractional position along a->b.
"""

import os

import numpy as np

_EPS_PARALLEL = 1e-12
_EPS_BARY = 1e-12

USE_NUMBA = os.environ.get("URBANPROP_DISABLE_NUMBA", "0") in ("", "0")


def _segment_triangles_numpy(a, b, v0, v1, v2, eps_hit):
    """Vectorized Moller-Trumbore over a triangle soup.

    Parameters
    ----------
    a, b : (3,) float64
        Segment endpoints.
    v0, v1, v2 : (M, 3) float64
        Triangle vertices.
    eps_hit : float
        Endpoint exclusion distance in meters.

    Returns
    -------
    (M,) float64 array of hit parameters, ``np.inf`` where there is no hit.
    """
    d = b - a
    seg_len = np.sqrt(d @ d)
    e1 = v1 - v0
    e2 = v2 - v0
    pvec = np.cross(np.broadcast_to(d, e2.shape), e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = np.abs(det) > _EPS_PARALLEL
    inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = a - v0
    u = np.einsum("ij,ij->i", tvec, pvec) * inv_det
    qvec = np.cross(tvec, e1)
    v = qvec @ d * inv_det
    t = np.einsum("ij,ij->i", e2, qvec) * inv_det
    lo = eps_hit / seg_len
    hit = (
        ok
        & (u >= -_EPS_BARY)
        & (v >= -_EPS_BARY)
        & (u + v <= 1.0 + _EPS_BARY)
        & (t > lo)
        & (t < 1.0 - lo)
    )
    return np.where(hit, t, np.inf)


def _segment_triangles_loop(a, b, v0, v1, v2, eps_hit):
    m = v0.shape[0]
    out = np.empty(m, dtype=np.float64)
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    dz = b[2] - a[2]
    seg_len = np.sqrt(dx * dx + dy * dy + dz * dz)
    lo = eps_hit / seg_len
    hi = 1.0 - lo
    for i in range(m):
        out[i] = np.inf
        e1x = v1[i, 0] - v0[i, 0]
        e1y = v1[i, 1] - v0[i, 1]
        e1z = v1[i, 2] - v0[i, 2]
        e2x = v2[i, 0] - v0[i, 0]
        e2y = v2[i, 1] - v0[i, 1]
        e2z = v2[i, 2] - v0[i, 2]
        px = dy * e2z - dz * e2y
        py = dz * e2x - dx * e2z
        pz = dx * e2y - dy * e2x
        det = e1x * px + e1y * py + e1z * pz
        if abs(det) <= _EPS_PARALLEL:
            continue
        inv_det = 1.0 / det
        tx = a[0] - v0[i, 0]
        ty = a[1] - v0[i, 1]
        tz = a[2] - v0[i, 2]
        u = (tx * px + ty * py + tz * pz) * inv_det
        if u < -_EPS_BARY:
            continue
        qx = ty * e1z - tz * e1y
        qy = tz * e1x - tx * e1z
        qz = tx * e1y - ty * e1x
        v = (dx * qx + dy * qy + dz * qz) * inv_det
        if v < -_EPS_BARY or u + v > 1.0 + _EPS_BARY:
            continue
        t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
        if lo < t < hi:
            out[i] = t
    return out


if USE_NUMBA:
    try:
        from numba import njit

        segment_triangles = njit(cache=True)(_segment_triangles_loop)
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        USE_NUMBA = False
        segment_triangles = _segment_triangles_numpy
else:
    segment_triangles = _segment_triangles_numpy


def first_hit(a, b, v0, v1, v2, eps_hit):
    """Nearest-to-``a`` hit of the open segment against the soup.

    Returns ``(t, index)`` or ``(np.inf, -1)`` when nothing is hit.
    """
    if v0.shape[0] == 0:
        return np.inf, -1
    t = segment_triangles(a, b, v0, v1, v2, eps_hit)
    i = int(np.argmin(t))
    if not np.isfinite(t[i]):
        return np.inf, -1
    return float(t[i]), i


def any_hit(a, b, v0, v1, v2, eps_hit):
    """True when any triangle blocks the open segment a->b."""
    if v0.shape[0] == 0:
        return False
    t = segment_triangles(a, b, v0, v1, v2, eps_hit)
    return bool(np.isfinite(t).any())
