import math

import numpy as np
import pytest

from cgwitness import MarginalSpec, bin_mass_oracle
from cgwitness.binning import (
    BinGrid,
    CountHistogram,
    DiscreteDistribution,
    HistogramDensity,
    coarse_grain,
    histogram_density,
    rebin,
    rect_indicator,
)
from cgwitness.errors import InvalidParameterError, TruncationError
from conftest import random_discrete


class TestBinGrid:
    def test_basic_layout(self):
        g = BinGrid(0.5, -2, 3)
        assert g.n_bins == 6
        assert list(g.indices) == [-2, -1, 0, 1, 2, 3]
        np.testing.assert_allclose(g.centers, np.array([-1.0, -0.5, 0.0, 0.5, 1.0, 1.5]))
        lo, hi = g.edges(0)
        assert lo == -0.25 and hi == 0.25

    def test_edges_tile_the_line(self):
        g = BinGrid(0.7, -4, 4)
        for j in range(-4, 4):
            assert g.edges(j)[1] == pytest.approx(g.edges(j + 1)[0], abs=1e-15)

    def test_index_of_tie_break_goes_up(self):
        g = BinGrid(1.0, -5, 5)
        # shared boundary belongs to the upper bin: [(j-1/2)w, (j+1/2)w)
        assert g.index_of(0.5) == 1
        assert g.index_of(-0.5) == 0
        assert g.index_of(0.49999) == 0
        assert g.index_of(0.0) == 0

    def test_index_of_hits_own_center(self):
        g = BinGrid(0.31, -7, 9)
        for j in g.indices:
            assert g.index_of(j * g.width) == j

    def test_spanning_covers_interval(self):
        g = BinGrid.spanning(0.3, -1.0, 2.0)
        assert g.index_of(-1.0) >= g.j_min
        assert g.index_of(2.0) <= g.j_max

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            BinGrid(0.0, 0, 1)
        with pytest.raises(InvalidParameterError):
            BinGrid(-1.0, 0, 1)
        with pytest.raises(InvalidParameterError):
            BinGrid(1.0, 2, 1)


class TestRectIndicator:
    def test_closed_interval(self):
        assert rect_indicator(0, 1.0, 0.5) == 1
        assert rect_indicator(0, 1.0, -0.5) == 1
        assert rect_indicator(0, 1.0, 0.5000001) == 0
        assert rect_indicator(3, 0.5, 1.5) == 1
        assert rect_indicator(3, 0.5, 1.24) == 0

    def test_partition_of_unity_inside_bins(self):
        # away from shared edges exactly one indicator fires
        for z in [-1.3, -0.2, 0.0, 0.7, 2.2]:
            hits = sum(rect_indicator(j, 1.0, z) for j in range(-5, 6))
            assert hits == 1


class TestCoarseGrain:
    def test_gaussian_masses_normalized(self):
        m = MarginalSpec("x+", 0.3, 1.2)
        grid = BinGrid.spanning(0.25, 0.3 - 11.0, 0.3 + 11.0)
        d = coarse_grain(bin_mass_oracle(m), grid)
        assert d.masses.sum() == pytest.approx(1.0, abs=1e-14)
        assert d.captured_fraction == pytest.approx(1.0, abs=1e-12)
        assert np.all(d.masses >= 0.0)

    def test_truncation_error_when_grid_too_narrow(self):
        m = MarginalSpec("x+", 0.0, 5.0)
        grid = BinGrid(1.0, -2, 2)  # +/- 0.5 sigma only
        with pytest.raises(TruncationError) as exc:
            coarse_grain(bin_mass_oracle(m), grid)
        assert 0.0 < exc.value.captured_fraction < 0.5

    def test_renormalizes_partial_capture(self):
        m = MarginalSpec("x+", 0.0, 1.0)
        grid = BinGrid(0.5, -8, 8)  # +/- 4.25 sigma: keeps > 0.999 but < 1
        d = coarse_grain(bin_mass_oracle(m), grid)
        assert d.masses.sum() == pytest.approx(1.0, abs=1e-14)
        assert 0.999 < d.captured_fraction < 1.0


class TestRebin:
    def test_count_conservation_and_width(self):
        rng = np.random.default_rng(3)
        counts = rng.integers(0, 50, size=21)
        h = CountHistogram(BinGrid(0.2, -10, 10), counts)
        r = rebin(h, 3)
        assert isinstance(r, CountHistogram)
        assert r.grid.width == pytest.approx(0.6)
        assert r.counts.sum() == counts.sum()

    def test_groups_are_centered_blocks(self):
        # factor 3 about the origin: bins {-1,0,1} -> new bin 0
        h = CountHistogram(BinGrid(1.0, -4, 4), np.arange(1, 10))
        r = rebin(h, 3)
        assert list(r.grid.indices) == [-1, 0, 1]
        np.testing.assert_array_equal(r.counts, [1 + 2 + 3, 4 + 5 + 6, 7 + 8 + 9])

    def test_preserves_masses_and_captured_fraction(self):
        rng = np.random.default_rng(4)
        d = random_discrete(rng)
        d = DiscreteDistribution(d.grid, d.masses, captured_fraction=0.9995)
        r = rebin(d, 5)
        assert isinstance(r, DiscreteDistribution)
        assert r.captured_fraction == d.captured_fraction
        assert r.masses.sum() == pytest.approx(d.masses.sum(), rel=1e-14)

    def test_factor_one_is_identity(self):
        rng = np.random.default_rng(5)
        d = random_discrete(rng)
        r = rebin(d, 1)
        np.testing.assert_allclose(r.masses, d.masses)
        assert r.grid == d.grid

    @pytest.mark.parametrize("factor", [0, -3, 2, 4])
    def test_rejects_non_odd_factors(self, factor):
        h = CountHistogram(BinGrid(1.0, -3, 3), np.ones(7, dtype=np.int64))
        with pytest.raises(InvalidParameterError):
            rebin(h, factor)


class TestHistogramDensity:
    def test_densities_divide_by_width(self):
        d = DiscreteDistribution(BinGrid(0.25, 0, 3), np.array([0.1, 0.2, 0.3, 0.4]))
        h = histogram_density(d)
        assert isinstance(h, HistogramDensity)
        np.testing.assert_allclose(h.densities, d.masses / 0.25)

    def test_negative_masses_rejected(self):
        with pytest.raises(InvalidParameterError):
            DiscreteDistribution(BinGrid(1.0, 0, 1), np.array([0.5, -0.1]))
        with pytest.raises(InvalidParameterError):
            CountHistogram(BinGrid(1.0, 0, 1), np.array([1, -2]))
