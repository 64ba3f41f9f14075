"""Entanglement witnesses on global-variable marginals.

Every witness returns (left-hand side minus bound), so a negative value
certifies entanglement regardless of which criterion produced it. The two
continuous criteria take precomputed variances/entropies; the two
coarse-grained criteria take binned marginals at ANY bin widths and stay
nonnegative on separable states by construction (the variance one via the
histogram corrections, the entropic one via the band-limiting bound
constant). The naive discrete criterion applies the continuous variance
bound to uncorrected discrete variances — it is deliberately included as
the cautionary counterexample and is flagged unsafe: with bins a few
standard deviations wide it reports entanglement for product states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .binning import DiscreteDistribution, HistogramDensity, histogram_density
from .bound import BoundTable, entropic_bound_constant
from .errors import InvalidPairingError, InvalidParameterError
from .stats import (
    discrete_variance,
    histogram_entropy,
    histogram_variance,
)

WITNESS_IDS = (
    "mgvt_continuous",
    "entropic_continuous",
    "coarse_variance",
    "coarse_entropic",
    "naive_discrete",
)

#: Witnesses that can be evaluated from binned count data alone.
DATA_WITNESS_IDS = ("coarse_variance", "coarse_entropic", "naive_discrete")

#: pairing token -> (first variable, second variable)
PAIRINGS = {"pm": ("x+", "p-"), "mp": ("x-", "p+")}

CONTINUOUS_ENTROPIC_BOUND = math.log(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of one witness evaluation.

    value is LHS - bound: negative means entanglement detected. For the
    naive discrete criterion `unsafe` is always True — a negative value
    there may be a false positive.
    """

    witness_id: str
    pairing: str
    value: float
    inputs_summary: dict = field(default_factory=dict)
    bin_widths: tuple | None = None
    uncertainty: float | None = None
    unsafe: bool = False

    def __post_init__(self):
        if self.witness_id not in WITNESS_IDS:
            raise InvalidParameterError(f"unknown witness_id {self.witness_id!r}")
        if self.pairing not in PAIRINGS:
            raise InvalidPairingError(f"pairing must be one of {tuple(PAIRINGS)}, got {self.pairing!r}")
        if not math.isfinite(self.value):
            raise InvalidParameterError(f"witness value must be finite, got {self.value}")
        if self.witness_id == "naive_discrete" and not self.unsafe:
            object.__setattr__(self, "unsafe", True)

    @property
    def detected(self) -> bool:
        """Entanglement detected at face value (no uncertainty threshold)."""
        return self.value < 0


def _resolve_pairing(pairing: str | None, variable_r: str | None, variable_s: str | None) -> str:
    """Check variable labels against the pairing and return the pairing token.

    Valid combinations pair a position-type first variable with the
    opposite-sign momentum-type second variable: ("x+", "p-") or
    ("x-", "p+").
    """
    inferred = None
    if variable_r is not None or variable_s is not None:
        for token, (vr, vs) in PAIRINGS.items():
            if (variable_r is None or variable_r == vr) and (
                variable_s is None or variable_s == vs
            ):
                inferred = token
                break
        if inferred is None:
            raise InvalidPairingError(
                f"variables ({variable_r!r}, {variable_s!r}) do not form a "
                "sum/difference pairing: expected ('x+', 'p-') or ('x-', 'p+')"
            )
    if pairing is None:
        return inferred if inferred is not None else "pm"
    if pairing not in PAIRINGS:
        raise InvalidPairingError(f"pairing must be one of {tuple(PAIRINGS)}, got {pairing!r}")
    if inferred is not None and inferred != pairing:
        raise InvalidPairingError(
            f"variables ({variable_r!r}, {variable_s!r}) contradict pairing {pairing!r}"
        )
    return pairing


def _as_density(x) -> HistogramDensity:
    if isinstance(x, DiscreteDistribution):
        return histogram_density(x)
    if isinstance(x, HistogramDensity):
        return x
    raise InvalidParameterError(
        f"expected a DiscreteDistribution or HistogramDensity, got {type(x).__name__}"
    )


def mgvt_continuous(
    var_r: float,
    var_s: float,
    *,
    pairing: str = "pm",
    uncertainty: float | None = None,
) -> WitnessReport:
    """Product-of-variances criterion on continuous global variables.

    value = var_r * var_s - 1; separable states satisfy value >= 0.
    """
    for name, v in (("var_r", var_r), ("var_s", var_s)):
        if not (math.isfinite(v) and v > 0):
            raise InvalidParameterError(f"{name} must be finite and positive, got {v}")
    return WitnessReport(
        witness_id="mgvt_continuous",
        pairing=_resolve_pairing(pairing, None, None),
        value=var_r * var_s - 1.0,
        inputs_summary={"var_r": var_r, "var_s": var_s},
        uncertainty=uncertainty,
    )


def entropic_continuous(
    h_r: float,
    h_s: float,
    *,
    pairing: str = "pm",
    uncertainty: float | None = None,
) -> WitnessReport:
    """Sum-of-entropies criterion on continuous global variables.

    value = h_r + h_s - ln(2*pi*e); separable states satisfy value >= 0.
    Stronger than the variance product: it detects every state the variance
    criterion does, and more.
    """
    for name, v in (("h_r", h_r), ("h_s", h_s)):
        if not math.isfinite(v):
            raise InvalidParameterError(f"{name} must be finite, got {v}")
    return WitnessReport(
        witness_id="entropic_continuous",
        pairing=_resolve_pairing(pairing, None, None),
        value=h_r + h_s - CONTINUOUS_ENTROPIC_BOUND,
        inputs_summary={"h_r": h_r, "h_s": h_s},
        uncertainty=uncertainty,
    )


def coarse_variance_witness(
    r,
    s,
    *,
    pairing: str | None = None,
    variable_r: str | None = None,
    variable_s: str | None = None,
    uncertainty: float | None = None,
) -> WitnessReport:
    """Variance-product criterion corrected for finite bin widths.

    value = histogram_variance(r) * histogram_variance(s) - 1, where the
    histogram variances carry the width^2/12 term that restores reliability
    at any bin size: separable states give value >= 0 for every width pair.
    """
    r, s = _as_density(r), _as_density(s)
    token = _resolve_pairing(pairing, variable_r, variable_s)
    var_r, var_s = histogram_variance(r), histogram_variance(s)
    return WitnessReport(
        witness_id="coarse_variance",
        pairing=token,
        value=var_r * var_s - 1.0,
        inputs_summary={"hist_var_r": var_r, "hist_var_s": var_s},
        bin_widths=(r.grid.width, s.grid.width),
        uncertainty=uncertainty,
    )


def coarse_entropic_witness(
    r,
    s,
    *,
    pairing: str | None = None,
    variable_r: str | None = None,
    variable_s: str | None = None,
    uncertainty: float | None = None,
    bound_table: BoundTable | None = None,
) -> WitnessReport:
    """Entropy-sum criterion with the width-dependent bound constant.

    value = histogram_entropy(r) + histogram_entropy(s)
            + ln(bound_constant(width_r * width_s)).

    The bound constant never vanishes, so the criterion is nontrivial at
    every bin size; as widths shrink it recovers the continuous entropic
    criterion. Passing a BoundTable swaps the direct bound evaluation for
    the interpolated one (sweep speed).
    """
    r, s = _as_density(r), _as_density(s)
    token = _resolve_pairing(pairing, variable_r, variable_s)
    h_r, h_s = histogram_entropy(r), histogram_entropy(s)
    width_product = r.grid.width * s.grid.width
    if bound_table is not None:
        bound = bound_table.value(width_product)
    else:
        bound = entropic_bound_constant(width_product)
    return WitnessReport(
        witness_id="coarse_entropic",
        pairing=token,
        value=h_r + h_s + math.log(bound),
        inputs_summary={"hist_h_r": h_r, "hist_h_s": h_s, "bound_constant": bound},
        bin_widths=(r.grid.width, s.grid.width),
        uncertainty=uncertainty,
    )


def naive_discrete_witness(
    r: DiscreteDistribution,
    s: DiscreteDistribution,
    *,
    pairing: str | None = None,
    variable_r: str | None = None,
    variable_s: str | None = None,
    uncertainty: float | None = None,
) -> WitnessReport:
    """UNSAFE: continuous variance bound applied to uncorrected discrete variances.

    value = discrete_variance(r) * discrete_variance(s) - 1. Omitting the
    width^2/12 corrections makes this criterion invalid at finite bin size:
    once bins reach a few marginal standard deviations, nearly all mass
    falls in single bins, both discrete variances collapse toward zero and
    the value goes negative on separable states. Kept only to demonstrate
    that failure mode; never use it for detection.
    """
    if isinstance(r, HistogramDensity):
        r = DiscreteDistribution(r.grid, r.masses)
    if isinstance(s, HistogramDensity):
        s = DiscreteDistribution(s.grid, s.masses)
    token = _resolve_pairing(pairing, variable_r, variable_s)
    var_r, var_s = discrete_variance(r), discrete_variance(s)
    return WitnessReport(
        witness_id="naive_discrete",
        pairing=token,
        value=var_r * var_s - 1.0,
        inputs_summary={"discrete_var_r": var_r, "discrete_var_s": var_s},
        bin_widths=(r.grid.width, s.grid.width),
        uncertainty=uncertainty,
        unsafe=True,
    )
