"""Metric identities: RMSE, KS distance, CDFs and scatter density."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urbanprop.errors import DataShapeError
from urbanprop.metrics import empirical_cdf, ks_distance, rmse, scatter_density

series = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1,
                  max_size=40)


class TestRmse:
    def test_identical(self):
        assert rmse([1, 2, 3], [1, 2, 3]) == 0.0

    def test_hand_value(self):
        assert rmse([1, 2, 3], [1, 2, 5]) == pytest.approx(np.sqrt(4.0 / 3.0))

    @given(series, st.floats(-50, 50, allow_nan=False))
    @settings(max_examples=80)
    def test_offset_identity(self, xs, c):
        assert rmse(xs, [x + c for x in xs]) == pytest.approx(abs(c), abs=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(DataShapeError):
            rmse([1, 2], [1, 2, 3])
        with pytest.raises(DataShapeError):
            rmse([], [])


class TestKsDistance:
    def test_identical(self):
        assert ks_distance([3, 1, 2], [1, 2, 3]) == 0.0

    def test_hand_value(self):
        assert ks_distance([1, 2, 3], [1, 2, 3, 100]) == 0.25

    @given(series, series)
    @settings(max_examples=80)
    def test_symmetry_and_range(self, a, b):
        d = ks_distance(a, b)
        assert d == ks_distance(b, a)
        assert 0.0 <= d <= 1.0

    def test_disjoint_supports(self):
        assert ks_distance([0, 1], [10, 11]) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(DataShapeError):
            ks_distance([], [1])


class TestEmpiricalCdf:
    def test_single_sample(self):
        assert empirical_cdf([4.2]) == [(4.2, 1.0)]

    def test_monotone_range(self):
        rng = np.random.default_rng(17)
        pairs = empirical_cdf(rng.normal(size=200))
        fs = [f for _x, f in pairs]
        assert fs == sorted(fs)
        assert fs[-1] == 1.0
        assert fs[0] > 0.0

    def test_median_crossing(self):
        rng = np.random.default_rng(8)
        xs = rng.normal(size=2001)
        pairs = empirical_cdf(xs)
        med = np.median(xs)
        below = [f for x, f in pairs if x <= med]
        assert below[-1] == pytest.approx(0.5, abs=0.01)

    def test_empty_rejected(self):
        with pytest.raises(DataShapeError):
            empirical_cdf([])


class TestScatterDensity:
    def test_uniform_grid_is_flat(self):
        g = np.linspace(0, 1, 10)
        x, y = np.meshgrid(g, g)
        counts, _xe, _ye = scatter_density(x.ravel(), y.ravel(), bins=10)
        assert counts.max() == 1.0
        assert np.all(counts == 1.0)

    def test_normalized_to_unit_peak(self):
        rng = np.random.default_rng(4)
        counts, _xe, _ye = scatter_density(rng.normal(size=500),
                                           rng.normal(size=500))
        assert counts.max() == 1.0
        assert counts.min() >= 0.0

    def test_bad_inputs(self):
        with pytest.raises(DataShapeError):
            scatter_density([1, 2], [1, 2, 3])
        with pytest.raises(DataShapeError):
            scatter_density([1, 2], [1, 2], bins=0)
