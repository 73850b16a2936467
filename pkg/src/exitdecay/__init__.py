"""Exit-probability decay rates for randomly scaled Gaussian processes.

The library computes closed-form exponential decay rates for halfspace and
quadrant exits of processes of the form (random amplitude) x (Gaussian path)
+ (deterministic shift), reconstructs the most likely exit paths, and checks
every closed form against a discretized variational oracle and Monte Carlo
simulation.
"""

from .decay import (
    DecayResult,
    ExitHalfspace,
    ExitQuadrant,
    OptimizerConfig,
    SampledPath,
    decay_halfspace_equal,
    decay_halfspace_indep,
    decay_quadrant_equal,
    decay_quadrant_indep,
    most_likely_path,
)
from .errors import (
    ExitDecayError,
    InsufficientDataError,
    NumericalError,
    ValidationError,
)
from .kernels import JitterPolicy, KernelSpec, TimeGrid, eval_kernel, factor_psd, gram
from .montecarlo import (
    DecayCurveReport,
    EstimateRow,
    FixedScale,
    LbetaScale,
    SimConfig,
    WeibullScale,
    decay_curve,
    estimate_exit_prob,
    rows_from_csv,
    sample_gaussian_paths,
    sample_lbeta,
    sample_scale_weibull,
    wilson_interval,
)
from .oracle import DiscretizedProblem, OracleResult, oracle_halfspace, oracle_quadrant
from .rates import (
    AtomicComponent,
    AtomicPath,
    PerturbationModel,
    conditional_rate,
    eval_path,
    rate_equal,
    rate_indep,
    rkhs_norm_sq,
)
from .scalelaw import (
    GgbmParams,
    ScaleLaw,
    ggbm_scale_law,
    legendre_conjugate,
    mittag_leffler,
    mwright_density,
    profile_prefactor,
    scalar_profile,
    scale_rate,
)
from .scenario import Scenario, load_scenario, parse_scenario
from .shift import Shift

__version__ = "0.1.0"

__all__ = [
    "AtomicComponent",
    "AtomicPath",
    "DecayCurveReport",
    "DecayResult",
    "DiscretizedProblem",
    "EstimateRow",
    "ExitDecayError",
    "ExitHalfspace",
    "ExitQuadrant",
    "FixedScale",
    "GgbmParams",
    "InsufficientDataError",
    "JitterPolicy",
    "KernelSpec",
    "LbetaScale",
    "NumericalError",
    "OptimizerConfig",
    "OracleResult",
    "PerturbationModel",
    "SampledPath",
    "ScaleLaw",
    "Scenario",
    "Shift",
    "SimConfig",
    "TimeGrid",
    "ValidationError",
    "WeibullScale",
    "conditional_rate",
    "decay_curve",
    "decay_halfspace_equal",
    "decay_halfspace_indep",
    "decay_quadrant_equal",
    "decay_quadrant_indep",
    "estimate_exit_prob",
    "eval_kernel",
    "eval_path",
    "factor_psd",
    "ggbm_scale_law",
    "gram",
    "legendre_conjugate",
    "load_scenario",
    "mittag_leffler",
    "most_likely_path",
    "mwright_density",
    "oracle_halfspace",
    "oracle_quadrant",
    "parse_scenario",
    "profile_prefactor",
    "rate_equal",
    "rate_indep",
    "rkhs_norm_sq",
    "rows_from_csv",
    "sample_gaussian_paths",
    "sample_lbeta",
    "sample_scale_weibull",
    "scalar_profile",
    "scale_rate",
    "wilson_interval",
]
