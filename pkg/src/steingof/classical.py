"""Reference normality tests: Anderson-Darling and Jarque-Bera."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSample, DomainError
from .sample import SampleLike, StandardizedSample, as_array, check_test_size
from .special import chi2_sf, std_normal_cdf, std_normal_sf
from .stein import _check_alpha

# Asymptotic upper points of the Anderson-Darling statistic for a fully
# specified null distribution.
AD_CRITICAL = {0.05: 2.492, 0.01: 3.857}
_CLAMP = 1e-15


@dataclass(frozen=True)
class ClassicalTestResult:
    name: str
    statistic: float
    p_value: Optional[float]
    alpha: float
    reject: bool
    critical_value: Optional[float] = None


def _sorted_values(sample: SampleLike) -> np.ndarray:
    if isinstance(sample, StandardizedSample):
        return sample.sorted_y
    return np.sort(as_array(sample))


def ad_statistic(sample: SampleLike) -> float:
    """``-n - (1/n) sum (2i - 1) [log Z_i + log(1 - Z_{n+1-i})]`` with ``Z_i = Phi(x_(i))``.

    Applied to a standardized sample this is the usual composite-null
    statistic; applied to raw values it tests against N(0, 1) itself.
    """
    s = _sorted_values(sample)
    n = s.size
    lower = np.clip(std_normal_cdf(s), _CLAMP, 1.0 - _CLAMP)
    upper = np.clip(std_normal_sf(s), _CLAMP, 1.0 - _CLAMP)[::-1]
    i = np.arange(1, n + 1)
    return -n - math.fsum((2 * i - 1) * (np.log(lower) + np.log(upper))) / n


def anderson_darling(sample: SampleLike, alpha: float = 0.05) -> ClassicalTestResult:
    alpha = _check_alpha(alpha)
    crit = next((c for a, c in AD_CRITICAL.items() if math.isclose(a, alpha)), None)
    if crit is None:
        raise DomainError(f"Anderson-Darling supports alpha in {sorted(AD_CRITICAL)} only, got {alpha}")
    check_test_size(as_array(sample))
    stat = ad_statistic(sample)
    return ClassicalTestResult("ad", stat, None, alpha, bool(stat > crit), crit)


def moment_ratios(sample: SampleLike) -> tuple[float, float]:
    """Skewness ``m3 / m2**1.5`` and kurtosis ``m4 / m2**2`` with 1/n central moments."""
    x = as_array(sample)
    if x.min() == x.max():
        raise DegenerateSample("zero variance: skewness and kurtosis are undefined")
    d = x - x.mean()
    d2 = d * d
    m2 = math.fsum(d2) / x.size
    m3 = math.fsum(d2 * d) / x.size
    m4 = math.fsum(d2 * d2) / x.size
    return m3 / m2**1.5, m4 / (m2 * m2)


def jb_statistic(sample: SampleLike) -> float:
    n = as_array(sample).size
    skew, kurt = moment_ratios(sample)
    return n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) ** 2)


def jarque_bera(sample: SampleLike, alpha: float = 0.05) -> ClassicalTestResult:
    alpha = _check_alpha(alpha)
    check_test_size(as_array(sample))
    stat = jb_statistic(sample)
    p = chi2_sf(stat, 2)
    return ClassicalTestResult("jb", stat, p, alpha, bool(p < alpha))
