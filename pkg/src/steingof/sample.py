"""Observation vectors, moments and the standardizing transformation.

Every test in the package consumes either a :class:`Sample` (raw values) or a
:class:`StandardizedSample` (``y_i = (x_i - mean) / sd`` with an ``n - 1``
denominator for the variance).  Both are immutable.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np

from .errors import DegenerateSample, EmptyInput, ParseError, SampleTooSmall

# Smallest sample size accepted by the tests (jackknife, lambda solving).
MIN_TEST_SIZE = 5

_DELIMITERS = re.compile(r"[\s,]+")
_DECIMAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Sample:
    """Raw observations in input order."""

    values: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.values)
        if arr.size < 1:
            raise EmptyInput("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ParseError("sample contains non-finite values")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class StandardizedSample:
    """Standardized values plus the raw location/scale they were built from.

    ``order`` is the stable argsort of ``y`` so ``sorted_y == y[order]``.
    """

    y: np.ndarray
    mean_raw: float
    sd_raw: float
    order: np.ndarray = field(repr=False)
    sorted_y: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.y.size)

    def __len__(self) -> int:
        return self.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.y, dtype=dtype)


SampleLike = Union[Sample, StandardizedSample, np.ndarray, list, tuple]


def as_array(sample: SampleLike) -> np.ndarray:
    """Return the float values a test operates on, for any accepted input."""
    if isinstance(sample, StandardizedSample):
        return sample.y
    if isinstance(sample, Sample):
        return sample.values
    return np.asarray(sample, dtype=float).reshape(-1)


def load_sample(source: Union[str, bytes, IO]) -> Sample:
    """Parse whitespace/comma separated decimal literals.

    ``source`` may be text, bytes or an open (text or binary) stream.
    Positions reported in :class:`ParseError` are 1-based token indices.
    """
    if isinstance(source, (io.IOBase,)) or hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8 text: {exc}") from exc
    tokens = [tok for tok in _DELIMITERS.split(source) if tok]
    if not tokens:
        raise EmptyInput("no observations found in input")
    values = []
    for pos, tok in enumerate(tokens, start=1):
        if not _DECIMAL.fullmatch(tok):
            raise ParseError(f"cannot parse token {pos} ({tok!r}) as a number", pos, tok)
        val = float(tok)
        if not math.isfinite(val):
            raise ParseError(f"token {pos} ({tok!r}) is not a finite number", pos, tok)
        values.append(val)
    return Sample(np.array(values))


def mean(s: SampleLike) -> float:
    x = as_array(s)
    if x.size < 1:
        raise EmptyInput("mean of an empty sample")
    m = math.fsum(x) / x.size
    # one refinement pass removes the rounding of the first division
    return m + math.fsum(x - m) / x.size


def variance_unbiased(s: SampleLike) -> float:
    """Sample variance with the ``n - 1`` denominator."""
    x = as_array(s)
    if x.size < 2:
        raise SampleTooSmall(f"variance needs n >= 2, got n = {x.size}")
    if x.min() == x.max():
        return 0.0
    m = mean(x)
    return math.fsum((x - m) ** 2) / (x.size - 1)


def standardize(s: SampleLike) -> StandardizedSample:
    x = as_array(s)
    if x.size < 2:
        raise SampleTooSmall(f"standardize needs n >= 2, got n = {x.size}")
    if not np.all(np.isfinite(x)):
        raise ParseError("sample contains non-finite values")
    var = variance_unbiased(x)
    if not var > 0.0:
        raise DegenerateSample("sample variance is zero; cannot standardize a constant sample")
    m = mean(x)
    sd = math.sqrt(var)
    y = _readonly((x - m) / sd)
    order = np.argsort(y, kind="stable")
    order.setflags(write=False)
    return StandardizedSample(y=y, mean_raw=m, sd_raw=sd, order=order, sorted_y=_readonly(y[order]))


def check_test_size(x: np.ndarray, minimum: int = MIN_TEST_SIZE) -> None:
    if x.size < minimum:
        raise SampleTooSmall(f"test needs n >= {minimum}, got n = {x.size}")
