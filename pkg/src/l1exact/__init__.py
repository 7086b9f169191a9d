"""Exact finite-dimensional performance of l1-based sparse recovery.

Computes the exact failure probability of (positive) l1 recovery from random
Gaussian linear systems through polyhedral-cone angle integrals, verifies it
with Monte Carlo linear-programming experiments, and evaluates the matching
large-deviation rate functions and phase-transition curves.
"""

__version__ = "0.1.0"

from .angles import (
    AngleFamily,
    AngleValue,
    FaceIndex,
    external_crosspolytope,
    external_pos_type1,
    external_pos_type2,
    external_simplex,
    external_std_type1,
    internal_full_cone,
    internal_simplex,
    internal_type1,
    internal_type2,
)
from .asymptotics import AsymParams, RateResult, pt_alpha, rate_positive, rate_standard
from .exactprob import (
    ProbBreakdown,
    ProblemDims,
    Variant,
    face_count,
    p_complement,
    p_err,
    p_err_crosspolytope,
    p_err_positive,
    p_err_positive_simplex,
    p_err_standard,
    sweep,
)
from .linprog import LPSolution, LPStatus, StandardFormLP, solve
from .montecarlo import (
    ErrorRateEstimate,
    TrialConfig,
    estimate,
    face_survival_trial,
    gen_instance,
    nullspace_failure_check,
    recover_positive,
    recover_standard,
    wilson_interval,
)
from .quadrature import (
    IntegralResult,
    ProbResult,
    QuadratureConfig,
    integrate_halfline,
    integrate_line,
    prob_nonneg_from_cf,
)
from .specialfn import LogComplex, dawson, entropy_H, erfc_log, log_binomial, log_one_minus_i_erfi
