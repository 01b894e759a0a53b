"""Jackknife empirical likelihood (JEL) ratio test built on :mod:`steingof.stein`.

Pseudo-values ``nu_i = n * Delta_hat - (n - 1) * Delta_hat_{-i}`` are treated as
approximately independent observations of the departure measure.  The
empirical likelihood of the constraint ``sum p_i nu_i = 0`` is maximised by
``p_i = 1 / (n (1 + lam * nu_i))`` where ``lam`` solves

    (1/n) sum nu_i / (1 + lam * nu_i) = 0,

and ``-2 log R = 2 sum log(1 + lam * nu_i)`` is compared to chi-square(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, InfeasibleConstraint, SampleTooSmall, ShapeError
from .sample import SampleLike, as_array, check_test_size
from .special import chi2_isf, chi2_sf
from .stein import DeltaHat, _check_alpha, delta_hat, leave_one_out_deltas

LAMBDA_TOL = 1e-10
MAX_ITER = 200
_EDGE = 1e-12


@dataclass(frozen=True)
class JelDiagnostics:
    pseudo_values: np.ndarray = field(repr=False)
    lam: float
    minus2logR: float
    feasible: bool
    iterations: int

    @property
    def weights(self) -> np.ndarray:
        """Constrained-optimal probability weights p_i (NaN when infeasible)."""
        n = self.pseudo_values.size
        if not self.feasible:
            return np.full(n, np.nan)
        return 1.0 / (n * (1.0 + self.lam * self.pseudo_values))


@dataclass(frozen=True)
class JelTestResult:
    statistic: float
    p_value: float
    alpha: float
    reject: bool
    diagnostics: JelDiagnostics
    delta: float
    name: str = "jel"


def pseudo_values(delta: DeltaHat, loo) -> np.ndarray:
    loo = np.asarray(loo, dtype=float).reshape(-1)
    if loo.size != delta.n:
        raise ShapeError(f"expected {delta.n} leave-one-out values, got {loo.size}")
    if delta.n < 3:
        raise SampleTooSmall("pseudo-values need n >= 3")
    n = delta.n
    return n * delta.value - (n - 1) * loo


def _estimating_fn(nu: np.ndarray, lam: float):
    d = 1.0 + lam * nu
    r = nu / d
    return r.mean(), -(r * r).mean()


def solve_lambda(nu) -> tuple[float, int]:
    """Root of ``mean(nu / (1 + lam * nu))`` inside ``(-1/max nu, -1/min nu)``.

    Newton iterations from 0, falling back to bisection whenever a step
    leaves the current bracket.  The function is strictly decreasing there,
    so the root is unique.  Returns ``(lam, iterations)``.
    """
    nu = np.asarray(nu, dtype=float).reshape(-1)
    if nu.size < 3:
        raise SampleTooSmall("lambda equation needs at least 3 pseudo-values")
    lo_nu, hi_nu = nu.min(), nu.max()
    if not (lo_nu < 0.0 < hi_nu):
        raise InfeasibleConstraint("0 is not inside the convex hull of the pseudo-values")
    # absolute tolerance, floored at the rounding level of the sum
    tol = max(LAMBDA_TOL, 64 * np.finfo(float).eps * float(np.abs(nu).max()))
    a, b = -1.0 / hi_nu, -1.0 / lo_nu
    width = b - a
    a, b = a + _EDGE * width, b - _EDGE * width
    lam = 0.0
    f, df = _estimating_fn(nu, lam)

    def done():
        # sum(p_i) = 1 - lam * f, so both terms must be small
        return abs(f) <= tol and abs(lam * f) <= LAMBDA_TOL

    for it in range(1, MAX_ITER + 1):
        if done():
            return lam, it - 1
        # f decreasing: a positive value means the root lies to the right
        if f > 0.0:
            a = max(a, lam)
        else:
            b = min(b, lam)
        step = lam - f / df if df < 0.0 else math.nan
        lam = step if a < step < b else 0.5 * (a + b)
        f, df = _estimating_fn(nu, lam)
        if b - a <= 4 * np.finfo(float).eps * max(abs(a), abs(b)) and not done():
            break
    if done():
        return lam, MAX_ITER
    raise ConvergenceFailure(f"lambda solver did not converge (residual {f:.3g})", residual=f)


def jel_statistic(nu) -> JelDiagnostics:
    """Lagrange multiplier and ``-2 log R`` for the given pseudo-values.

    Infeasible pseudo-values (all of one sign) give ``minus2logR = inf``.
    """
    nu = np.array(nu, dtype=float).reshape(-1)
    if nu.size < 3:
        raise SampleTooSmall("JEL needs n >= 3")
    nu.setflags(write=False)
    try:
        lam, iterations = solve_lambda(nu)
    except InfeasibleConstraint:
        return JelDiagnostics(nu, math.nan, math.inf, False, 0)
    stat = 2.0 * math.fsum(np.log1p(lam * nu)) if lam != 0.0 else 0.0
    return JelDiagnostics(nu, lam, stat, True, iterations)


def jel_test(sample: SampleLike, alpha: float = 0.05, restandardize: bool = False) -> JelTestResult:
    """JEL ratio test of ``Delta(F) = 0``.

    ``sample`` is used as given: pass a :class:`~steingof.sample.StandardizedSample`
    to test composite normality, or raw values to test against N(0, 1).
    An infeasible constraint counts as a rejection with p-value 0.
    """
    alpha = _check_alpha(alpha)
    check_test_size(as_array(sample))
    d = delta_hat(sample)
    nu = pseudo_values(d, leave_one_out_deltas(sample, restandardize=restandardize))
    diag = jel_statistic(nu)
    stat = diag.minus2logR
    p = chi2_sf(max(stat, 0.0), 1)
    return JelTestResult(
        statistic=stat,
        p_value=p,
        alpha=alpha,
        reject=bool(stat > chi2_isf(alpha, 1)),
        diagnostics=diag,
        delta=d.value,
    )
