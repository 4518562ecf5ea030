"""Weighted step-up procedures for FDR-controlled multiple testing of
correlated normal means, two-sided, with known covariance (z tests) or
covariance known up to a scalar (t tests), plus FDR-controlled variable
selection for Gaussian linear models and a Monte Carlo validation harness.
"""

from .corr import (
    CorrelationModel,
    MeanSpec,
    build_model,
    conditional_noncentrality,
    equicorrelated_matrix,
    equicorrelated_weight,
    mean_spec,
    sample_mvn,
)
from .dist import (
    chi2_isf,
    chi2_sf,
    f_isf,
    f_sf,
    lemma3_ratio,
    lemma4_ratio,
    lemma5_ratio,
    nc_chi2_sf,
)
from .errors import (
    DecompositionError,
    DegenerateFitError,
    InvalidInputError,
    InvalidParameterError,
    NumericalError,
)
from .procedure import (
    CalibratedMethod,
    MethodKind,
    StepUpOutcome,
    calibrate_alpha1,
    calibrated_method,
    calibration_total,
    plain_bh,
    simes_global,
    statistic_space_stepup,
    stepup,
    transform_pvalue,
    weighted_bh_t,
    weighted_bh_z,
)
from .sim import (
    CovarianceSpec,
    FdrEstimate,
    GridSpec,
    Lemma2Diagnostic,
    ReplicationRecords,
    Scenario,
    SimulationReport,
    collect_replications,
    estimate_fdr_direct,
    estimate_fdr_leave_one_out,
    generate_scenario_grid,
    leave_one_out_terms,
    leave_one_out_value,
    lemma2_conditional_check,
    random_correlation,
    run_replication,
    selection_replications,
    simulate_report,
)
from .varselect import (
    OLSFit,
    RegressionProblem,
    ols_fit,
    select_variables,
    selection_weights,
    t_squared,
)

__version__ = "0.1.0"

__all__ = [
    "CalibratedMethod",
    "CorrelationModel",
    "CovarianceSpec",
    "DecompositionError",
    "DegenerateFitError",
    "FdrEstimate",
    "GridSpec",
    "InvalidInputError",
    "InvalidParameterError",
    "Lemma2Diagnostic",
    "MeanSpec",
    "MethodKind",
    "NumericalError",
    "OLSFit",
    "RegressionProblem",
    "ReplicationRecords",
    "Scenario",
    "SimulationReport",
    "StepUpOutcome",
    "build_model",
    "calibrate_alpha1",
    "calibrated_method",
    "calibration_total",
    "chi2_isf",
    "chi2_sf",
    "collect_replications",
    "conditional_noncentrality",
    "equicorrelated_matrix",
    "equicorrelated_weight",
    "estimate_fdr_direct",
    "estimate_fdr_leave_one_out",
    "f_isf",
    "f_sf",
    "generate_scenario_grid",
    "leave_one_out_terms",
    "leave_one_out_value",
    "lemma2_conditional_check",
    "lemma3_ratio",
    "lemma4_ratio",
    "lemma5_ratio",
    "mean_spec",
    "nc_chi2_sf",
    "ols_fit",
    "plain_bh",
    "random_correlation",
    "run_replication",
    "sample_mvn",
    "select_variables",
    "selection_replications",
    "selection_weights",
    "simes_global",
    "simulate_report",
    "statistic_space_stepup",
    "stepup",
    "t_squared",
    "transform_pvalue",
    "weighted_bh_t",
    "weighted_bh_z",
]
