"""Evaluation metrics: RMSE, empirical CDFs, two-sample KS distance and
scatter-density export."""

import numpy as np

from .errors import DataShapeError


def rmse(reference, candidate):
    """Root-mean-square error between two index-aligned series."""
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(candidate, dtype=np.float64)
    if a.size == 0 or a.shape != b.shape:
        raise DataShapeError(
            f"series lengths must match and be non-zero ({a.size} vs {b.size})")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def ks_distance(a, b):
    """sup_x |F_a(x) - F_b(x)| by exact step-function evaluation."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise DataShapeError("KS distance requires non-empty samples")
    support = np.concatenate([a, b])
    fa = np.searchsorted(a, support, side="right") / a.size
    fb = np.searchsorted(b, support, side="right") / b.size
    return float(np.abs(fa - fb).max())


def empirical_cdf(samples):
    """Right-continuous step CDF as a list of (x, F(x)) pairs."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.size == 0:
        raise DataShapeError("empirical_cdf requires non-empty samples")
    xs, counts = np.unique(x, return_counts=True)
    f = np.cumsum(counts) / x.size
    return list(zip(xs.tolist(), f.tolist()))


def scatter_density(x, y, bins=50):
    """2D histogram normalized to unit maximum.

    Returns ``(counts, x_edges, y_edges)`` with counts scaled so the densest
    bin equals 1.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size == 0 or y.size == 0 or x.size != y.size:
        raise DataShapeError("scatter_density requires equal non-empty samples")
    if np.isscalar(bins):
        if int(bins) < 1:
            raise DataShapeError("bins must be >= 1 per axis")
        bins = int(bins)
    counts, xe, ye = np.histogram2d(x, y, bins=bins)
    peak = counts.max()
    if peak > 0:
        counts = counts / peak
    return counts, xe, ye
