"""Robust model-based clustering in regression settings via cluster-weighted
mixtures with contaminated Gaussian components."""

from .classify import (
    Category,
    ObservationLabel,
    categorize,
    classify_dataset,
    classify_responsibilities,
    map_component,
)
from .densities import (
    CovFactor,
    downweight,
    factor_covariance,
    log_contaminated_pdf,
    log_gaussian_pdf,
    mahalanobis_sq,
    typical_weight,
)
from .ecm import (
    FitConfig,
    FitResult,
    Responsibilities,
    aitken_converged,
    cm_step1,
    cm_step2,
    e_step,
    fit,
    initialize,
    observed_log_likelihood,
)
from .gaussian import (
    GaussianCwmFit,
    GaussianCwmParams,
    fit_gaussian,
    fit_gaussian_cwm,
    gaussian_cwm_log_likelihood,
)
from .model import (
    ComponentParams,
    ContaminatedBlock,
    CwmParams,
    LabeledSample,
    RegressionBlock,
    conditional_y_log_density,
    count_free_parameters,
    joint_log_density,
    marginal_x_log_density,
    params_from_dict,
    params_from_json,
    params_to_dict,
    params_to_json,
    sample_dataset,
    samples_to_arrays,
)
from .selection import SelectionResult, bic, select_k
from .simulate import (
    MonteCarloReport,
    ScenarioSpec,
    match_labels,
    perturb_with_point,
    perturb_with_uniform_noise,
    run_monte_carlo,
    scenario_params,
)

__version__ = "0.1.0"
