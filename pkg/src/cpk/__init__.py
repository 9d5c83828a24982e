"""Observation-driven Poisson count processes.

Simulation, coupling and mixing diagnostics, intensity reconstruction from
past counts, conditional maximum-likelihood estimation, and a
dispersion-based specification test for contractive intensity families.
"""

from .coupling import (
    CoalescenceResult,
    CoupledPath,
    RecoveryReport,
    beta_mixing_bound,
    coalescence_experiment,
    couple_chains,
    couple_poisson,
    past_recovery_check,
)
from .estimate import (
    EstimationResult,
    filtered_intensities,
    fit_cmle,
    neg_log_likelihood,
    spec_from_theta,
)
from .model import (
    ContractionError,
    IntensitySpec,
    ValidationReport,
    conditional_mean_bound,
    eval_intensity,
    mean_bound,
    second_moment_bound,
    validate_contraction,
)
from .montecarlo import (
    MCSummary,
    ks_normal_distance,
    mixing_study,
    moment_study,
    normality_study,
    replicate_seed,
    size_study,
)
from .reconstruct import (
    ReconstructionResult,
    SweepRow,
    reconstruct_intensity,
    reconstruction_sweep,
)
from .simulate import (
    Trajectory,
    poisson_quantile,
    read_counts_csv,
    read_trajectory_csv,
    simulate,
    step,
    uniform_stream,
)
from .spectest import (
    TestReport,
    UndecidableTestError,
    dispersion_stat,
    normal_cdf,
    normal_quantile,
    oracle_report,
    run_test,
    variance_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "CoalescenceResult",
    "ContractionError",
    "CoupledPath",
    "EstimationResult",
    "IntensitySpec",
    "MCSummary",
    "ReconstructionResult",
    "RecoveryReport",
    "SweepRow",
    "TestReport",
    "Trajectory",
    "UndecidableTestError",
    "ValidationReport",
    "beta_mixing_bound",
    "coalescence_experiment",
    "conditional_mean_bound",
    "couple_chains",
    "couple_poisson",
    "dispersion_stat",
    "eval_intensity",
    "filtered_intensities",
    "fit_cmle",
    "ks_normal_distance",
    "mean_bound",
    "mixing_study",
    "moment_study",
    "neg_log_likelihood",
    "normal_cdf",
    "normal_quantile",
    "normality_study",
    "oracle_report",
    "past_recovery_check",
    "poisson_quantile",
    "read_counts_csv",
    "read_trajectory_csv",
    "reconstruct_intensity",
    "reconstruction_sweep",
    "replicate_seed",
    "run_test",
    "second_moment_bound",
    "simulate",
    "size_study",
    "spec_from_theta",
    "step",
    "uniform_stream",
    "validate_contraction",
    "variance_estimate",
]
