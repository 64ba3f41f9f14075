"""Property-based invariants of the binning, statistics, and bound layers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgwitness import (
    discrete_entropy,
    discrete_variance,
    entropic_bound_constant,
    histogram_density,
    histogram_entropy,
    histogram_variance,
    shared_bound_table,
)
from cgwitness.binning import BinGrid, CountHistogram, DiscreteDistribution, rebin

FLAT = 1.0 / (2.0 * math.e * math.pi)


@st.composite
def discrete_distributions(draw):
    n = draw(st.integers(min_value=1, max_value=60))
    width = draw(st.floats(min_value=1e-3, max_value=30.0))
    j_min = draw(st.integers(min_value=-40, max_value=10))
    raw = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0),
            min_size=n,
            max_size=n,
        )
    )
    masses = np.asarray(raw) + 1e-9
    masses /= masses.sum()
    return DiscreteDistribution(BinGrid(width, j_min, j_min + n - 1), masses)


@st.composite
def count_histograms(draw):
    n = draw(st.integers(min_value=1, max_value=60))
    width = draw(st.floats(min_value=1e-3, max_value=30.0))
    j_min = draw(st.integers(min_value=-40, max_value=10))
    counts = draw(
        st.lists(st.integers(min_value=0, max_value=10_000), min_size=n, max_size=n)
    )
    return CountHistogram(BinGrid(width, j_min, j_min + n - 1), np.asarray(counts))


class TestCorrectionIdentities:
    @given(discrete_distributions())
    @settings(max_examples=120, deadline=None)
    def test_variance_correction(self, d):
        h = histogram_density(d)
        w = d.grid.width
        lhs = histogram_variance(h)
        rhs = discrete_variance(d) + w * w / 12.0
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    @given(discrete_distributions())
    @settings(max_examples=120, deadline=None)
    def test_entropy_correction(self, d):
        h = histogram_density(d)
        lhs = histogram_entropy(h)
        rhs = discrete_entropy(d) + math.log(d.grid.width)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    @given(discrete_distributions())
    @settings(max_examples=60, deadline=None)
    def test_discrete_entropy_nonnegative_and_bounded(self, d):
        h = discrete_entropy(d)
        assert -1e-12 <= h <= math.log(d.grid.n_bins) + 1e-12


class TestRebinProperties:
    @given(count_histograms(), st.sampled_from([1, 3, 5, 7, 9]))
    @settings(max_examples=120, deadline=None)
    def test_counts_conserved(self, h, factor):
        r = rebin(h, factor)
        assert r.counts.sum() == h.counts.sum()
        assert r.grid.width == pytest.approx(factor * h.grid.width, rel=1e-12)

    @given(count_histograms(), st.sampled_from([3, 5, 7]))
    @settings(max_examples=80, deadline=None)
    def test_every_fine_bin_lands_in_exactly_one_group(self, h, factor):
        r = rebin(h, factor)
        half = factor // 2
        for j in h.grid.indices:
            group = math.floor((j + half) / factor)
            assert r.grid.j_min <= group <= r.grid.j_max

    @given(count_histograms(), st.sampled_from([3, 5]))
    @settings(max_examples=80, deadline=None)
    def test_rebin_never_increases_entropy_resolution(self, h, factor):
        # merging bins cannot raise the discrete entropy
        total = h.counts.sum()
        if total == 0:
            return
        d = h.normalize()
        r = rebin(h, factor).normalize()
        assert discrete_entropy(r) <= discrete_entropy(d) + 1e-10


class TestGridProperties:
    @given(
        st.floats(min_value=1e-3, max_value=50.0),
        st.integers(min_value=-30, max_value=30),
    )
    @settings(max_examples=100, deadline=None)
    def test_index_of_center_roundtrip(self, width, j):
        g = BinGrid(width, min(j, -1), max(j, 1))
        assert g.index_of(j * width) == j

    @given(
        st.floats(min_value=1e-3, max_value=50.0),
        st.floats(min_value=-100.0, max_value=100.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_index_of_respects_edges(self, width, z):
        g = BinGrid(width, -10_000, 10_000)
        j = g.index_of(z)
        lo, hi = g.edges(j)
        assert lo <= z < hi or z == pytest.approx(lo, abs=1e-12)


class TestBoundProperties:
    @given(st.floats(min_value=0.0, max_value=400.0))
    @settings(max_examples=60, deadline=None)
    def test_bounded_and_positive(self, gamma):
        c = shared_bound_table().value(gamma)
        assert 0.0 < c <= FLAT * (1.0 + 1e-12)

    @given(
        st.floats(min_value=0.0, max_value=300.0),
        st.floats(min_value=1e-6, max_value=100.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_nonincreasing(self, gamma, step):
        table = shared_bound_table()
        a = table.value(gamma)
        b = table.value(gamma + step)
        assert b <= a * (1.0 + 1e-9)

    @given(
        st.floats(min_value=1e-3, max_value=300.0),
        st.floats(min_value=1.0001, max_value=4.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_gamma_times_c_nondecreasing(self, gamma, factor):
        # gamma * C(gamma) is the concentration eigenvalue branch: increasing
        table = shared_bound_table()
        lo = gamma * table.value(gamma)
        hi = gamma * factor * table.value(gamma * factor)
        assert hi >= lo * (1.0 - 1e-9)
