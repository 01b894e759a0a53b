"""U-statistic estimator of the Stein departure measure and its normal test.

The departure measure is ``Delta(F) = E[h(X1, X2)] - 1/2`` with the symmetric
kernel ``h(x, y) = (min(x, y)**2 - x*y) / 2``.  It vanishes for the standard
normal law.  Its U-statistic has a closed order-statistic form,

    Delta_hat = (T - P) / (n (n-1)) - 1/2,
    T = sum_i (n - i) x_(i)**2,   P = sum_{i<j} x_i x_j,

which :func:`delta_hat` evaluates in O(n log n).  :func:`delta_hat_naive`
sums the kernel over all pairs and is kept as an oracle.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateSample, DomainError, SampleTooSmall
from .sample import SampleLike, StandardizedSample, as_array, check_test_size
from .special import std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf


@dataclass(frozen=True)
class DeltaHat:
    value: float
    delta1: float
    n: int


@dataclass(frozen=True)
class AsymptoticTestResult:
    statistic_z: float
    sigma0: float
    p_value: float
    alpha: float
    reject: bool
    delta: float
    name: str = "asymptotic"


def kernel_h(x, y):
    """Symmetric kernel ``(min(x, y)**2 - x*y) / 2``; broadcasts over arrays."""
    m = np.minimum(x, y)
    out = 0.5 * (m * m - np.multiply(x, y))
    return float(out) if np.ndim(out) == 0 else out


def _make(delta1: float, n: int) -> DeltaHat:
    return DeltaHat(value=delta1 - 0.5, delta1=delta1, n=n)


def delta_hat_naive(sample: SampleLike) -> DeltaHat:
    x = as_array(sample)
    n = x.size
    if n < 2:
        raise SampleTooSmall(f"U-statistic needs n >= 2, got n = {n}")
    iu = np.triu_indices(n, k=1)
    h = kernel_h(x[:, None], x[None, :])[iu]
    return _make(math.fsum(h) / (n * (n - 1) / 2), n)


def _sorted(sample: SampleLike):
    if isinstance(sample, StandardizedSample):
        return sample.y, sample.order, sample.sorted_y
    x = as_array(sample)
    order = np.argsort(x, kind="stable")
    return x, order, x[order]


def _pair_sums(x: np.ndarray, s: np.ndarray):
    n = x.size
    w = np.arange(n - 1, -1, -1, dtype=float)  # n - i for 1-based rank i
    t = math.fsum(w * s * s)
    total = math.fsum(x)
    sq = math.fsum(x * x)
    p = 0.5 * (total * total - sq)
    return w, t, total, sq, p


def delta_hat(sample: SampleLike) -> DeltaHat:
    x, _, s = _sorted(sample)
    n = x.size
    if n < 2:
        raise SampleTooSmall(f"U-statistic needs n >= 2, got n = {n}")
    _, t, _, _, p = _pair_sums(x, s)
    return _make((t - p) / (n * (n - 1)), n)


def leave_one_out_deltas(sample: SampleLike, restandardize: bool = False) -> np.ndarray:
    """Delta_hat with observation i removed, for every i, in input order.

    By default the retained values are used as given.  With
    ``restandardize=True`` each reduced sample is re-centred and re-scaled
    (n - 2 denominator) before the statistic is evaluated.

    Removing the element of sorted rank r lowers the weight of every element
    ranked above it by one, so with prefix sums each deletion costs O(1).
    """
    x, order, s = _sorted(sample)
    n = x.size
    if n < 3:
        raise SampleTooSmall(f"leave-one-out replicates need n >= 3, got n = {n}")
    if restandardize:
        # the restandardized statistic is affine invariant; work on a
        # well-conditioned copy to avoid cancellation in the variances
        c = x.mean()
        scale = x.std()
        if scale == 0.0:
            raise DegenerateSample("constant sample")
        x = (x - c) / scale
        s = (s - c) / scale
    w, t, total, sq, p = _pair_sums(x, s)
    m = n - 1
    prefix_sq = np.concatenate(([0.0], np.cumsum(s * s)[:-1]))
    t_del = t - w * s * s - prefix_sq
    if not restandardize:
        p_del = 0.5 * ((total - s) ** 2 - (sq - s * s))
        sorted_out = (t_del - p_del) / (m * (m - 1)) - 0.5
    else:
        lin = math.fsum(w * s)
        prefix = np.concatenate(([0.0], np.cumsum(s)[:-1]))
        lin_del = lin - w * s - prefix
        mu = (total - s) / m
        var = (sq - s * s - m * mu * mu) / (m - 1)
        if np.any(var <= 0.0):
            raise DegenerateSample("a leave-one-out subsample has zero variance")
        pairs = m * (m - 1) / 2
        t_z = (t_del - 2.0 * mu * lin_del + pairs * mu * mu) / var
        p_z = -0.5 * (m - 1)
        sorted_out = (t_z - p_z) / (m * (m - 1)) - 0.5
    out = np.empty(n)
    out[order] = sorted_out
    return out


def _g(x):
    # E[min(X1, X2)^2 | X1 = x] under N(0, 1), using
    # int_{-inf}^x y^2 phi(y) dy = Phi(x) - x phi(x)
    return x * x * std_normal_sf(x) + std_normal_cdf(x) - x * std_normal_pdf(x)


_SIGMA0_LOCK = threading.Lock()
_SIGMA0_SQ: float | None = None


def _sigma0_squared_quadrature() -> float:
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    first, _ = integrate.quad(lambda x: _g(x) * std_normal_pdf(x), -10.0, 10.0, **opts)
    second, _ = integrate.quad(lambda x: _g(x) ** 2 * std_normal_pdf(x), -10.0, 10.0, **opts)
    return second - first * first


def null_sigma0_squared() -> float:
    """Null asymptotic variance of sqrt(n) * Delta_hat (standard normal data).

    Computed once per process by adaptive quadrature on [-10, 10].
    """
    global _SIGMA0_SQ
    if _SIGMA0_SQ is None:
        with _SIGMA0_LOCK:
            if _SIGMA0_SQ is None:
                _SIGMA0_SQ = _sigma0_squared_quadrature()
    return _SIGMA0_SQ


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def asymptotic_test(sample: SampleLike, alpha: float = 0.05) -> AsymptoticTestResult:
    """Two-sided normal test: reject when sqrt(n)|Delta_hat| / sigma0 > z_{alpha/2}."""
    alpha = _check_alpha(alpha)
    check_test_size(as_array(sample))
    d = delta_hat(sample)
    sigma0 = math.sqrt(null_sigma0_squared())
    z = math.sqrt(d.n) * d.value / sigma0
    p = min(1.0, 2.0 * std_normal_sf(abs(z)))
    crit = std_normal_quantile(1.0 - alpha / 2.0)
    return AsymptoticTestResult(
        statistic_z=z, sigma0=sigma0, p_value=p, alpha=alpha, reject=abs(z) > crit, delta=d.value
    )
