"""Heteroscedasticity test for fixed-design linear regression.

The test statistic is the squared coefficient of variation of the squared OLS
residuals. Its null mean and variance are computed exactly from trace
functionals of the residual-maker matrix ``P``, so the test stays calibrated
when the number of covariates grows with the sample size.

>>> import numpy as np
>>> from fcvt import run_test
>>> rng = np.random.default_rng(0)
>>> X = rng.standard_normal((200, 10))
>>> report = run_test(X, rng.standard_normal(200))
>>> 0.0 <= report.p_value <= 1.0
True
"""

from .design import (
    DesignMatrix,
    GeneralSummary,
    ProjectionMatrix,
    ProjectionSummary,
    design_matrix,
    general_functionals,
    hadamard_power,
    ols_fit,
    projection_functionals,
    projection_matrix,
)
from .errors import *  # noqa: F401,F403
from .hetero import TestReport, normal_sf, report_from_residuals, run_test, statistic_T
from .moments import (
    GAUSSIAN,
    LAPLACE,
    TWO_POINT,
    UNIFORM,
    ErrorMomentProfile,
    GeneralMoments,
    NullMoments,
    cumulants_from_moments,
    delta_method_variance,
    general_moments,
    null_moments,
)
from .oracle import ExactMoments, OmegaPattern, enumerate_two_point, monte_carlo_moments, naive_omega_sum
from .simulation import (
    SimulationConfig,
    SimulationResult,
    apply_model,
    empirical_rate,
    gen_design,
    gen_errors,
    simulate,
)

__version__ = "0.1.0"
