"""gpbounds: conditioning of Gaussian random variables, explicit concentration
bounds for the posterior-mean error, and Monte-Carlo verification harness.

The library side has five layers:

- kernels/conditioning: kernel evaluation, kriging, P-greedy designs and the
  power-function trace;
- sampling: spectral (Karhunen-Loeve) path sampling on grids;
- bounds: numeric tail bounds and closed forms for polynomial/exponential
  variance decay, including measured-trace (model-free) sequences;
- concentration: weighted chi-squared tail machinery;
- spheres: random fields on products of spheres with exact L2 truncation
  error.

The harness (config/experiments/reporting/cli) wires these into seeded,
worker-count-independent experiments; see the README for the CLI.
"""

from ._core import backend_name
from ._version import __version__
from .bounds import (
    BoundResult,
    ConstSeq,
    ExponentialDecay,
    ExpSeq,
    GeometricGrowth,
    IntPolyCounts,
    MeasuredSeq,
    PolynomialDecay,
    PolynomialMultiDecay,
    PolySeq,
    PowerGrowth,
    SequenceSpec,
    bound_exponential,
    bound_general,
    bound_polynomial,
    bound_polynomial_multi,
    bound_simple,
    default_weight_growth,
    exponential_window_start,
    tail_integral_bound,
)
from .concentration import (
    WeightSeq,
    centered_chisq_log_mgf,
    chisq_tail_bound,
    massart_tail_radius,
    mc_violation_rate,
    sample_many,
    sample_weighted_chisq,
    sub_gamma_log_mgf_bound,
)
from .conditioning import (
    DesignState,
    FiniteRankCov,
    GreedyResult,
    PowerTrace,
    add_point,
    cosine_basis_cov,
    eigen_condition_gap,
    greedy_design,
    pgreedy_select,
    posterior_mean,
    posterior_variance,
    truncation_opnorm_gap,
)
from .errors import (
    ConfigError,
    DimensionMismatchError,
    DomainError,
    DuplicatePointError,
    ExhaustedCandidatesError,
    FitFailureError,
    GpboundsError,
    HypothesisViolationError,
    InvalidParameterError,
    JmaxTooSmallError,
    NonsummableTailError,
    NumericalBreakdownError,
    NumericalError,
    TruncationUnreachableError,
)
from .kernels import (
    GaussianKernel,
    KernelSpec,
    MaternKernel,
    PointSet,
    TabulatedKernel,
    cross_gram,
    eval_kernel,
    gram_matrix,
)
from .sampling import (
    SamplePath,
    SpectralModel,
    build_spectral_model,
    path_matrix,
    sample_path,
    snap_to_grid,
    sup_error,
)
from .spheres import (
    ProductSphereSpec,
    SphericalField,
    build_field,
    l2_truncation_error,
    mc_truncation_errors,
    product_block_dim,
    sphere_bound,
    sphere_harmonic_dim,
    torus_truncation_opnorm,
)

__all__ = [
    "__version__",
    "backend_name",
    # errors
    "GpboundsError", "ConfigError", "NumericalError", "InvalidParameterError",
    "DomainError", "DimensionMismatchError", "DuplicatePointError",
    "JmaxTooSmallError", "NumericalBreakdownError", "ExhaustedCandidatesError",
    "NonsummableTailError", "HypothesisViolationError",
    "TruncationUnreachableError", "FitFailureError",
    # kernels
    "PointSet", "KernelSpec", "MaternKernel", "GaussianKernel",
    "TabulatedKernel", "eval_kernel", "gram_matrix", "cross_gram",
    # conditioning
    "PowerTrace", "DesignState", "GreedyResult", "posterior_variance",
    "posterior_mean", "add_point", "greedy_design", "pgreedy_select",
    "FiniteRankCov", "cosine_basis_cov", "eigen_condition_gap",
    "truncation_opnorm_gap",
    # sampling
    "SpectralModel", "SamplePath", "build_spectral_model", "sample_path",
    "path_matrix", "snap_to_grid", "sup_error",
    # bounds
    "PolynomialDecay", "PolynomialMultiDecay", "ExponentialDecay",
    "SequenceSpec", "PolySeq", "ExpSeq", "PowerGrowth", "GeometricGrowth",
    "ConstSeq", "IntPolyCounts", "MeasuredSeq", "BoundResult",
    "bound_general", "bound_simple", "bound_polynomial",
    "bound_polynomial_multi", "bound_exponential", "tail_integral_bound",
    "exponential_window_start", "default_weight_growth",
    # concentration
    "WeightSeq", "chisq_tail_bound", "massart_tail_radius",
    "sample_weighted_chisq", "sample_many", "mc_violation_rate",
    "centered_chisq_log_mgf", "sub_gamma_log_mgf_bound",
    # spheres
    "sphere_harmonic_dim", "product_block_dim", "ProductSphereSpec",
    "SphericalField", "build_field", "l2_truncation_error", "sphere_bound",
    "mc_truncation_errors", "torus_truncation_opnorm",
]
