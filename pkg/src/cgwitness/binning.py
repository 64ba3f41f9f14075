"""Uniform one-dimensional coarse graining.

A grid of width eta puts bin j on [(j-1/2)*eta, (j+1/2)*eta] with center
j*eta, so a bin center always sits at the origin. Distributions over such
grids come in three forms: raw integer counts, normalized bin masses, and
the piecewise-constant density built from the masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import InvalidParameterError, NormalizationError, TruncationError

MASS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BinGrid:
    """Uniform bin lattice with centers z_j = j * width.

    Args:
        width: bin width, strictly positive.
        j_min: lowest bin index (inclusive).
        j_max: highest bin index (inclusive).
    """

    width: float
    j_min: int
    j_max: int

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise InvalidParameterError(f"bin width must be positive, got {self.width}")
        if self.j_min > self.j_max:
            raise InvalidParameterError(
                f"empty index range [{self.j_min}, {self.j_max}]"
            )

    @classmethod
    def spanning(cls, width: float, lo: float, hi: float) -> "BinGrid":
        """Smallest grid of the given width whose bins cover [lo, hi]."""
        if not lo <= hi:
            raise InvalidParameterError(f"invalid span [{lo}, {hi}]")
        return cls(width, math.floor(lo / width + 0.5), math.ceil(hi / width - 0.5))

    @property
    def index_range(self) -> tuple[int, int]:
        return (self.j_min, self.j_max)

    @property
    def n_bins(self) -> int:
        return self.j_max - self.j_min + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.indices * self.width

    def edges(self, j: int) -> tuple[float, float]:
        """Lower and upper boundary of bin j."""
        return ((j - 0.5) * self.width, (j + 0.5) * self.width)

    def index_of(self, z: float) -> int:
        """Bin owning coordinate z under the half-open tie-break.

        Bins share boundary points; for mass assignment each point belongs
        to exactly one bin, taken as [(j-1/2)w, (j+1/2)w).
        """
        return math.floor(z / self.width + 0.5)


def rect_indicator(j: int, eta: float, z: float) -> int:
    """Rectangular window: 1 if z lies in bin j of a width-eta grid.

    Both boundary points count as inside (the window is a closed interval,
    so adjacent windows share their boundary). Use BinGrid.index_of when a
    unique owner is needed.
    """
    if not eta > 0:
        raise InvalidParameterError(f"window width must be positive, got {eta}")
    return int((j - 0.5) * eta <= z <= (j + 0.5) * eta)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Normalized bin masses over a grid.

    Attributes:
        grid: the underlying BinGrid.
        masses: one nonnegative mass per bin index, summing to 1.
        captured_fraction: fraction of the source mass the grid captured
            before renormalization (1.0 when constructed directly).
    """

    grid: BinGrid
    masses: np.ndarray
    captured_fraction: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        if m.shape != (self.grid.n_bins,):
            raise InvalidParameterError(
                f"expected {self.grid.n_bins} masses, got shape {m.shape}"
            )
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise InvalidParameterError("masses must be finite and nonnegative")
        total = float(m.sum())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise NormalizationError(f"masses sum to {total!r}, expected 1")
        object.__setattr__(self, "masses", _readonly(m))


@dataclass(frozen=True, eq=False)
class CountHistogram:
    """Raw integer counts over a grid (the pre-normalization stage)."""

    grid: BinGrid
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if not np.issubdtype(c.dtype, np.integer):
            raise InvalidParameterError("counts must be integers")
        c = c.astype(np.int64)
        if c.shape != (self.grid.n_bins,):
            raise InvalidParameterError(
                f"expected {self.grid.n_bins} counts, got shape {c.shape}"
            )
        if np.any(c < 0):
            raise InvalidParameterError("counts must be nonnegative")
        object.__setattr__(self, "counts", _readonly(c))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def normalize(self) -> DiscreteDistribution:
        total = self.total
        if total <= 0:
            raise NormalizationError("cannot normalize a histogram with zero counts")
        return DiscreteDistribution(self.grid, self.counts / total)


@dataclass(frozen=True, eq=False)
class HistogramDensity:
    """Piecewise-constant probability density: mass_k / width on bin k."""

    grid: BinGrid
    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        if m.shape != (self.grid.n_bins,):
            raise InvalidParameterError(
                f"expected {self.grid.n_bins} masses, got shape {m.shape}"
            )
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise InvalidParameterError("masses must be finite and nonnegative")
        if abs(float(m.sum()) - 1.0) > MASS_TOLERANCE:
            raise NormalizationError(
                f"density integrates to {float(m.sum())!r}, expected 1"
            )
        object.__setattr__(self, "masses", _readonly(m))

    @property
    def densities(self) -> np.ndarray:
        return self.masses / self.grid.width


BinMassOracle = Callable[[float, float], float]


def coarse_grain(
    bin_mass_oracle: BinMassOracle,
    grid: BinGrid,
    *,
    min_captured: float = 0.999,
) -> DiscreteDistribution:
    """Integrate a density over every bin of a grid.

    Args:
        bin_mass_oracle: callable (lo, hi) -> exact probability mass of the
            underlying normalized density on [lo, hi]. May accept numpy
            arrays for lo/hi; scalars are used otherwise.
        grid: target grid.
        min_captured: total captured mass below this raises TruncationError.

    Returns:
        DiscreteDistribution with renormalized masses and the captured
        fraction recorded.
    """
    j = grid.indices
    lo = (j - 0.5) * grid.width
    hi = (j + 0.5) * grid.width
    try:
        masses = np.asarray(bin_mass_oracle(lo, hi), dtype=np.float64)
        if masses.shape != j.shape:
            raise TypeError
    except (TypeError, ValueError):
        masses = np.array(
            [float(bin_mass_oracle(a, b)) for a, b in zip(lo, hi)], dtype=np.float64
        )
    # tiny negatives from cancellation in tail CDF differences
    masses = np.clip(masses, 0.0, None)
    captured = float(masses.sum())
    if captured < min_captured:
        raise TruncationError(
            f"grid captured only {captured:.6g} of the distribution "
            f"(threshold {min_captured})",
            captured_fraction=captured,
        )
    return DiscreteDistribution(grid, masses / captured, captured_fraction=captured)


Binned = Union[CountHistogram, DiscreteDistribution]


def rebin(h: Binned, factor: int) -> Binned:
    """Merge runs of `factor` adjacent bins, keeping a bin centered at 0.

    Only odd factors keep the central bin centered on the origin, so even
    factors are rejected. Input bins are conceptually zero-padded (never
    trimmed) to complete the outermost groups; totals are conserved exactly.

    Args:
        h: CountHistogram or DiscreteDistribution.
        factor: odd positive merge factor.

    Returns:
        The same kind of object on a grid of width factor * width.
    """
    if not isinstance(factor, (int, np.integer)) or factor < 1 or factor % 2 == 0:
        raise InvalidParameterError(
            f"rebin factor must be an odd positive integer, got {factor!r}"
        )
    if factor == 1:
        return h
    half = (factor - 1) // 2
    values = h.counts if isinstance(h, CountHistogram) else h.masses
    grid = h.grid
    j = grid.indices
    groups = (j + half) // factor  # group J collects j in [J*factor - half, J*factor + half]
    g_min, g_max = int(groups[0]), int(groups[-1])
    out = np.zeros(g_max - g_min + 1, dtype=values.dtype)
    np.add.at(out, groups - g_min, values)
    new_grid = BinGrid(grid.width * factor, g_min, g_max)
    if isinstance(h, CountHistogram):
        return CountHistogram(new_grid, out)
    return DiscreteDistribution(new_grid, out, captured_fraction=h.captured_fraction)


def histogram_density(d: DiscreteDistribution) -> HistogramDensity:
    """Piecewise-constant density with value mass_k / width on bin k."""
    return HistogramDensity(d.grid, d.masses)
