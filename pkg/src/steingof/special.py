"""Standard normal and low-order chi-square distribution functions.

All functions accept scalars or numpy arrays and return the same kind.
The heavy lifting is done by :mod:`scipy.special` (``erfc``/``ndtri``),
which is accurate to a few ulps over the ranges used here.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _out(value, scalar):
    return float(value) if scalar else value


def std_normal_pdf(x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    return _out(_INV_SQRT_2PI * np.exp(-0.5 * x * x), scalar)


def std_normal_cdf(x):
    """Phi(x), evaluated as ``erfc(-x / sqrt 2) / 2`` to keep the lower tail accurate."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    return _out(0.5 * _sp.erfc(-x * _INV_SQRT2), scalar)


def std_normal_sf(x):
    """Upper tail 1 - Phi(x) without cancellation."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    return _out(0.5 * _sp.erfc(x * _INV_SQRT2), scalar)


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf`, refined by one Newton step."""
    scalar = np.ndim(p) == 0
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("normal quantile needs 0 < p < 1")
    x = _sp.ndtri(p)
    # Newton polish; the pdf is bounded away from zero on the open interval
    x = x - (std_normal_cdf(x) - p) / std_normal_pdf(x)
    return _out(x, scalar)


def chi2_sf(x, df: int):
    """Upper-tail probability of the chi-square law with 1 or 2 degrees of freedom.

    df = 1: ``2 (1 - Phi(sqrt x)) = erfc(sqrt(x / 2))``; df = 2: ``exp(-x / 2)``.
    ``x = inf`` gives 0.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0.0):
        raise DomainError("chi-square upper tail needs x >= 0")
    if df == 1:
        out = _sp.erfc(np.sqrt(0.5 * x))
    elif df == 2:
        out = np.exp(-0.5 * x)
    else:
        raise DomainError(f"only df in {{1, 2}} is supported, got {df!r}")
    return _out(out, scalar)


def chi2_isf(alpha: float, df: int) -> float:
    """Upper alpha point of chi-square(df), df in {1, 2}."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if df == 1:
        return std_normal_quantile(1.0 - alpha / 2.0) ** 2
    if df == 2:
        return -2.0 * math.log(alpha)
    raise DomainError(f"only df in {{1, 2}} is supported, got {df!r}")
