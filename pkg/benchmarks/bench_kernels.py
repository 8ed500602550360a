"""Benchmark the segment/triangle intersection kernel.

Compares the numba-compiled loop against the pure-numpy vectorized fallback
(the variant selected at import time by ``URBANPROP_DISABLE_NUMBA``) on
random triangle soups, and verifies both produce identical hit parameters.

Usage::

    python benchmarks/bench_kernels.py [--triangles N] [--segments M] [--repeats R]
"""

import argparse
import time

import numpy as np

from urbanprop.kernels import _segment_triangles_loop, _segment_triangles_numpy

EPS_HIT = 1e-9


def make_soup(rng, n_triangles):
    base = rng.uniform(-100.0, 100.0, size=(n_triangles, 3))
    v0 = base
    v1 = base + rng.uniform(-10.0, 10.0, size=(n_triangles, 3))
    v2 = base + rng.uniform(-10.0, 10.0, size=(n_triangles, 3))
    return (np.ascontiguousarray(v0), np.ascontiguousarray(v1),
            np.ascontiguousarray(v2))


def make_segments(rng, n_segments):
    a = rng.uniform(-120.0, 120.0, size=(n_segments, 3))
    b = rng.uniform(-120.0, 120.0, size=(n_segments, 3))
    return a, b


def bench(fn, segs, soup, repeats):
    a, b = segs
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for i in range(a.shape[0]):
            fn(a[i], b[i], *soup, EPS_HIT)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--triangles", type=int, default=2000)
    parser.add_argument("--segments", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    soup = make_soup(rng, args.triangles)
    segs = make_segments(rng, args.segments)

    try:
        from numba import njit
        compiled = njit(cache=True)(_segment_triangles_loop)
    except ImportError:
        compiled = None

    # correctness cross-check on a subset
    a, b = segs
    for i in range(min(50, a.shape[0])):
        ref = _segment_triangles_numpy(a[i], b[i], *soup, EPS_HIT)
        if compiled is not None:
            got = compiled(a[i], b[i], *soup, EPS_HIT)
            assert np.allclose(got, ref, equal_nan=True), f"mismatch at segment {i}"

    n_ops = args.segments * args.triangles
    t_np = bench(_segment_triangles_numpy, segs, soup, args.repeats)
    print(f"soup: {args.triangles} triangles, {args.segments} segments, "
          f"best of {args.repeats}")
    print(f"numpy fallback : {t_np * 1e3:8.2f} ms  "
          f"({n_ops / t_np / 1e6:.1f} M tri-tests/s)")
    if compiled is None:
        print("numba          : unavailable")
        return
    compiled(a[0], b[0], *soup, EPS_HIT)   # warm up / compile
    t_nb = bench(compiled, segs, soup, args.repeats)
    print(f"numba loop     : {t_nb * 1e3:8.2f} ms  "
          f"({n_ops / t_nb / 1e6:.1f} M tri-tests/s)")
    print(f"speedup        : {t_np / t_nb:8.2f}x")


if __name__ == "__main__":
    main()
