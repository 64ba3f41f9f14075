"""Coarse-grained continuous-variable entanglement witnesses.

Detecting entanglement from binned coincidence counts needs witnesses that
stay valid at finite bin size. This package provides the corrected
variance-product and entropy-sum criteria on sum/difference marginals
(with the band-limiting bound constant behind the entropic one), the
Gaussian pair-state model used to synthesize and cross-check data, scan
ingest with detector-to-source unit conversion, and Monte Carlo error
propagation — plus the deliberately naive discrete criterion that shows
why the corrections matter.
"""

from ._kernels import backend_name
from .binning import (
    BinGrid,
    CountHistogram,
    DiscreteDistribution,
    HistogramDensity,
    coarse_grain,
    histogram_density,
    rebin,
    rect_indicator,
)
from .bound import (
    CONTINUOUS_BOUND_CONSTANT,
    BoundTable,
    CharacteristicSolution,
    branch_switch_gamma,
    characteristic_solution,
    characteristic_value_ode,
    concentration_eigenvalue,
    entropic_bound_constant,
    radial_first_kind,
    radial_first_kind_ode,
    shared_bound_table,
)
from .errors import (
    CGWitnessError,
    ConfigurationError,
    ConvergenceError,
    InvalidPairingError,
    InvalidParameterError,
    NormalizationError,
    ParseError,
    PropagationError,
    TruncationError,
)
from .ingest import (
    JointCounts,
    OpticalGeometry,
    detector_to_source_scale,
    ensure_matching_geometry,
    global_marginal,
    load_joint_counts,
    rebin_marginal,
    save_joint_counts,
)
from .model import (
    GaussianTwoPhotonState,
    GlobalMarginals,
    MarginalSpec,
    bin_mass_oracle,
    classify_separable,
    coarse_grained_marginal,
    exact_marginals,
    sample_joint_counts,
    sample_marginal_counts,
)
from .stats import (
    SummaryStat,
    discrete_entropy,
    discrete_mean,
    discrete_variance,
    histogram_entropy,
    histogram_variance,
    summarize_histogram,
)
from .uncertainty import ErrorModel, WitnessPipeline, propagate
from .witnesses import (
    CONTINUOUS_ENTROPIC_BOUND,
    DATA_WITNESS_IDS,
    PAIRINGS,
    WITNESS_IDS,
    WitnessReport,
    coarse_entropic_witness,
    coarse_variance_witness,
    entropic_continuous,
    mgvt_continuous,
    naive_discrete_witness,
)

__version__ = "0.1.0"

__all__ = [
    "BinGrid",
    "BoundTable",
    "CGWitnessError",
    "CONTINUOUS_BOUND_CONSTANT",
    "CharacteristicSolution",
    "ConfigurationError",
    "ConvergenceError",
    "CountHistogram",
    "CONTINUOUS_ENTROPIC_BOUND",
    "DATA_WITNESS_IDS",
    "DiscreteDistribution",
    "ErrorModel",
    "GaussianTwoPhotonState",
    "GlobalMarginals",
    "HistogramDensity",
    "InvalidPairingError",
    "InvalidParameterError",
    "JointCounts",
    "MarginalSpec",
    "NormalizationError",
    "OpticalGeometry",
    "PAIRINGS",
    "ParseError",
    "PropagationError",
    "SummaryStat",
    "TruncationError",
    "WITNESS_IDS",
    "WitnessPipeline",
    "WitnessReport",
    "backend_name",
    "bin_mass_oracle",
    "branch_switch_gamma",
    "characteristic_solution",
    "characteristic_value_ode",
    "classify_separable",
    "coarse_entropic_witness",
    "coarse_grain",
    "coarse_grained_marginal",
    "coarse_variance_witness",
    "concentration_eigenvalue",
    "detector_to_source_scale",
    "discrete_entropy",
    "discrete_mean",
    "discrete_variance",
    "ensure_matching_geometry",
    "entropic_bound_constant",
    "entropic_continuous",
    "exact_marginals",
    "global_marginal",
    "histogram_density",
    "histogram_entropy",
    "histogram_variance",
    "load_joint_counts",
    "mgvt_continuous",
    "naive_discrete_witness",
    "propagate",
    "radial_first_kind",
    "radial_first_kind_ode",
    "rebin",
    "rebin_marginal",
    "rect_indicator",
    "sample_joint_counts",
    "sample_marginal_counts",
    "save_joint_counts",
    "shared_bound_table",
    "summarize_histogram",
    "__version__",
]
