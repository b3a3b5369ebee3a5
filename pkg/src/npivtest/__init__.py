"""Adaptive hypothesis tests for shape and parametric restrictions on
structural functions in nonparametric IV models, with a Monte Carlo harness
and a CSV front end."""

from .adaptive import (
    CandidateGrid,
    CandidateRecord,
    NullSpec,
    RunConfig,
    TestReport,
    adaptive_test,
    build_grid,
    compute_D,
    compute_shat,
    compute_vhat,
    cs_contains,
    eta_hat,
    gamma_hat,
    image_space_test,
)
from .basis import BasisSpec, ConstraintMatrix, deriv_constraints, eval_design, tensor_design, zeta
from .dgp import Dataset, DesignConfig, HSpec, generate, h_mono, h_sin
from .errors import InputError, NumericalError
from .npiv import NpivFit, RestrictedFit, cone_project, fit_restricted_cone, fit_restricted_parametric, fit_unrestricted
from .randdist import CovarianceSpec, RngStream, chisq_quantile, mvn_sample, std_normal_cdf, std_normal_quantile
from .sim import ExperimentSpec, McSummary, reproduce, run_power, run_size

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "InputError",
    "NumericalError",
    "BasisSpec",
    "ConstraintMatrix",
    "deriv_constraints",
    "eval_design",
    "tensor_design",
    "zeta",
    "RngStream",
    "CovarianceSpec",
    "std_normal_cdf",
    "std_normal_quantile",
    "chisq_quantile",
    "mvn_sample",
    "NpivFit",
    "RestrictedFit",
    "fit_unrestricted",
    "fit_restricted_cone",
    "fit_restricted_parametric",
    "cone_project",
    "NullSpec",
    "RunConfig",
    "CandidateGrid",
    "CandidateRecord",
    "TestReport",
    "adaptive_test",
    "build_grid",
    "compute_D",
    "compute_vhat",
    "compute_shat",
    "gamma_hat",
    "eta_hat",
    "cs_contains",
    "image_space_test",
    "HSpec",
    "DesignConfig",
    "Dataset",
    "generate",
    "h_mono",
    "h_sin",
    "ExperimentSpec",
    "McSummary",
    "run_size",
    "run_power",
    "reproduce",
]
