"""Joint coincidence-count ingest and detector-to-source unit conversion.

A scan file is line-oriented text: "# key=value" header lines carrying the
optical geometry, then one comma-separated row of nonnegative integers per
detector-1 position. Diagonal sums of the count matrix give the binned
sum/difference marginals on the base global-variable grid, whose width
follows from the optics: 2*s_x*(f1/f2) for position scans and
2*s_p*(2*pi/(f3*lambda)) for momentum scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binning import BinGrid, CountHistogram, rebin
from .errors import ConfigurationError, InvalidParameterError, ParseError

_GEOMETRY_KEYS = (
    "f1_mm",
    "f2_mm",
    "f3_mm",
    "lambda_mm",
    "s_x_mm",
    "s_p_mm",
    "micrometer_step_mm",
)
_REQUIRED_KEYS = ("variable_pair", "step_mm") + _GEOMETRY_KEYS


@dataclass(frozen=True)
class OpticalGeometry:
    """Lens/slit parameters that map detector indices to source-plane units.

    All lengths in mm. Defaults reproduce the reference setup: a 4x imaging
    telescope (f1=50, f2=200) for position scans, a single f3=250 Fourier
    lens for momentum scans, 650 nm photons, and slit widths s_x=0.050 mm,
    s_p=0.020 mm. The micrometer step bounds the slit-placement error.
    """

    f1_mm: float = 50.0
    f2_mm: float = 200.0
    f3_mm: float = 250.0
    lambda_mm: float = 6.5e-4
    s_x_mm: float = 0.05
    s_p_mm: float = 0.02
    micrometer_step_mm: float = 0.01

    def __post_init__(self):
        for key in _GEOMETRY_KEYS:
            v = getattr(self, key)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{key} must be finite and positive, got {v}")


def detector_to_source_scale(geometry: OpticalGeometry, variable_pair: str) -> float:
    """Width of the base global-variable bin implied by the optics.

    A detector cell of side w covers an interval of length 2w of the
    sum/difference coordinate, hence the leading factor 2.
    """
    if variable_pair == "position":
        return 2.0 * geometry.s_x_mm * (geometry.f1_mm / geometry.f2_mm)
    if variable_pair == "momentum":
        return 2.0 * geometry.s_p_mm * (2.0 * math.pi / (geometry.f3_mm * geometry.lambda_mm))
    raise InvalidParameterError(
        f"variable_pair must be 'position' or 'momentum', got {variable_pair!r}"
    )


@dataclass(frozen=True, eq=False)
class JointCounts:
    """One joint scan: integer coincidence counts on a detector grid.

    counts[row, col] is the count with detector 1 at index i0+row and
    detector 2 at index j0+col; physical scan positions are index*step.
    By default the scan origin is the grid center.
    """

    variable_pair: str
    step: float
    counts: np.ndarray
    geometry: OpticalGeometry
    i0: int | None = None
    j0: int | None = None

    def __post_init__(self):
        if self.variable_pair not in ("position", "momentum"):
            raise InvalidParameterError(
                f"variable_pair must be 'position' or 'momentum', got {self.variable_pair!r}"
            )
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidParameterError(f"step must be positive, got {self.step}")
        c = np.asarray(self.counts)
        if c.ndim != 2 or c.size == 0:
            raise InvalidParameterError("counts must be a non-empty 2-D array")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(c == np.floor(c)):
                raise InvalidParameterError("counts must be integers")
        c = c.astype(np.int64)
        if np.any(c < 0):
            raise InvalidParameterError("counts must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        rows, cols = c.shape
        if self.i0 is None:
            object.__setattr__(self, "i0", -((rows - 1) // 2))
        if self.j0 is None:
            object.__setattr__(self, "j0", -((cols - 1) // 2))

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def global_marginal(jc: JointCounts, sign: str) -> CountHistogram:
    """Sum (sign '+') or difference (sign '-') marginal by diagonal summation.

    Bin k collects every cell with i+j = k (resp. i-j = k); the histogram
    lives on the base global-variable grid for this scan. Exact in integer
    arithmetic, so counts are conserved.
    """
    if sign not in ("+", "-"):
        raise InvalidParameterError(f"sign must be '+' or '-', got {sign!r}")
    rows, cols = jc.counts.shape
    i = jc.i0 + np.arange(rows)[:, None]
    j = jc.j0 + np.arange(cols)[None, :]
    k = i + j if sign == "+" else i - j
    k_min, k_max = int(k.min()), int(k.max())
    sums = np.zeros(k_max - k_min + 1, dtype=np.int64)
    np.add.at(sums, (k - k_min).ravel(), jc.counts.ravel())
    width = detector_to_source_scale(jc.geometry, jc.variable_pair)
    return CountHistogram(BinGrid(width, k_min, k_max), sums)


def rebin_marginal(h: CountHistogram, factor: int) -> CountHistogram:
    """Group a base marginal into bins factor times wider (factor odd)."""
    return rebin(h, factor)


def ensure_matching_geometry(a: JointCounts, b: JointCounts) -> None:
    """Require two scans to share one optical setup.

    Raises ConfigurationError naming the first differing field.
    """
    for key in _GEOMETRY_KEYS:
        va, vb = getattr(a.geometry, key), getattr(b.geometry, key)
        if va != vb:
            raise ConfigurationError(
                f"geometry mismatch between scans: {key} is {va} vs {vb}"
            )


def save_joint_counts(jc: JointCounts, path) -> None:
    """Write a JointCounts to the line-oriented text format."""
    g = jc.geometry
    lines = [
        f"# variable_pair={jc.variable_pair}",
        f"# step_mm={jc.step!r}",
    ]
    lines += [f"# {key}={getattr(g, key)!r}" for key in _GEOMETRY_KEYS]
    lines += [f"# i0={jc.i0}", f"# j0={jc.j0}"]
    lines += [",".join(str(v) for v in row) for row in jc.counts]
    Path(path).write_text("\n".join(lines) + "\n")


def load_joint_counts(path) -> JointCounts:
    """Parse a scan file, validating headers and the count matrix.

    Raises ParseError (with the offending line number) on missing or
    malformed headers, non-integer or negative counts, and ragged rows.
    """
    header: dict[str, str] = {}
    rows: list[list[int]] = []
    row_len = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if rows:
                    raise ParseError("header line after data", line_number=lineno)
                body = line.lstrip("#").strip()
                key, sep, value = body.partition("=")
                if not sep:
                    raise ParseError(f"malformed header {line!r}", line_number=lineno)
                header[key.strip()] = value.strip()
                continue
            try:
                row = [int(tok) for tok in line.split(",")]
            except ValueError:
                raise ParseError(f"non-integer count in {line!r}", line_number=lineno) from None
            if any(v < 0 for v in row):
                raise ParseError("negative count", line_number=lineno)
            if row_len is None:
                row_len = len(row)
            elif len(row) != row_len:
                raise ParseError(
                    f"ragged row: expected {row_len} values, got {len(row)}",
                    line_number=lineno,
                )
            rows.append(row)
    for key in _REQUIRED_KEYS:
        if key not in header:
            raise ParseError(f"missing required header key {key!r}")
    if not rows:
        raise ParseError("file contains no count rows")
    pair = header["variable_pair"]
    if pair not in ("position", "momentum"):
        raise ParseError(f"unknown variable_pair {pair!r}")

    def _float(key: str) -> float:
        try:
            return float(header[key])
        except ValueError:
            raise ParseError(f"header key {key!r} is not a number") from None

    def _int(key: str) -> int:
        try:
            return int(header[key])
        except ValueError:
            raise ParseError(f"header key {key!r} is not an integer") from None

    try:
        geometry = OpticalGeometry(**{key: _float(key) for key in _GEOMETRY_KEYS})
        return JointCounts(
            variable_pair=pair,
            step=_float("step_mm"),
            counts=np.array(rows, dtype=np.int64),
            geometry=geometry,
            i0=_int("i0") if "i0" in header else None,
            j0=_int("j0") if "j0" in header else None,
        )
    except InvalidParameterError as exc:
        raise ParseError(str(exc)) from exc
