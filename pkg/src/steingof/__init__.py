"""Normality testing via Stein's characterization.

The departure measure ``Delta(F) = E[(min(X1, X2)**2 - X1 X2) / 2] - 1/2`` is
zero for the standard normal law.  It is estimated by a U-statistic and
tested either with its asymptotic normal law or with a jackknife empirical
likelihood ratio.
"""

__version__ = "0.1.0"

from .classical import ClassicalTestResult, anderson_darling, jarque_bera
from .errors import (
    ConvergenceFailure,
    DegenerateSample,
    DomainError,
    EmptyInput,
    InfeasibleConstraint,
    ParseError,
    SampleTooSmall,
    ShapeError,
    SteinGofError,
)
from .jel import JelDiagnostics, JelTestResult, jel_statistic, jel_test, pseudo_values, solve_lambda
from .sample import Sample, StandardizedSample, load_sample, mean, standardize, variance_unbiased
from .stein import (
    AsymptoticTestResult,
    DeltaHat,
    asymptotic_test,
    delta_hat,
    delta_hat_naive,
    kernel_h,
    leave_one_out_deltas,
    null_sigma0_squared,
)
