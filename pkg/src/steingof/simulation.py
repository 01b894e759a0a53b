"""Seeded Monte Carlo estimation of rejection rates.

Every replicate draws from its own PCG64 stream, seeded by
``SeedSequence(seed, spawn_key=(table, cell, replicate, attempt))``.  Tallies
are integer counts summed over replicate blocks, so results do not depend
on the number of worker processes or on scheduling order.

By default tests are applied to the raw draws, i.e. against the fully
specified N(0, 1) null; ``standardize=True`` standardizes each draw first
and tests composite normality instead.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .classical import AD_CRITICAL, ad_statistic, jb_statistic
from .errors import DegenerateSample, DomainError
from .jel import jel_statistic, pseudo_values
from .sample import MIN_TEST_SIZE, Sample, standardize
from .special import chi2_isf, std_normal_quantile
from .stein import delta_hat, leave_one_out_deltas, null_sigma0_squared

RNG_NAME = "numpy.PCG64 via SeedSequence(seed, spawn_key=(table, cell, replicate, attempt))"
TESTS = ("jel", "asymptotic", "ad", "jb")
FAMILIES = {
    "normal": ("mu", "sigma"),
    "gumbel": ("loc", "scale"),
    "lognormal": ("meanlog", "sdlog"),
    "student_t": ("df",),
    "gamma": ("shape", "scale"),
}
DEFAULT_PARAMS = {
    "normal": (0.0, 1.0),
    "gumbel": (0.0, 1.0),
    "lognormal": (0.0, 1.0),
    "student_t": (1.0,),
    "gamma": (1.0, 2.0),
}
CSV_HEADER = ("table", "dist", "param", "n", "test", "alpha", "rate", "se", "reps", "seed")
MAX_REDRAWS = 100


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown distribution family {self.family!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != len(FAMILIES[self.family]):
            raise DomainError(f"{self.family} takes parameters {FAMILIES[self.family]}, got {params}")
        if not all(math.isfinite(p) for p in params):
            raise DomainError("distribution parameters must be finite")
        # every family's trailing parameter is a scale/sd/df/shape
        positive = params[1:] if self.family in ("normal", "gumbel", "lognormal") else params
        if any(p <= 0.0 for p in positive):
            raise DomainError(f"{self.family} scale/shape/df parameters must be positive, got {params}")
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, family: str, params: Sequence[float] | None = None) -> "DistributionSpec":
        """Build a spec, filling trailing parameters from the family defaults.

        A single number given for ``lognormal`` is the log-sd (``meanlog`` stays 0).
        """
        defaults = DEFAULT_PARAMS.get(family)
        if defaults is None:
            raise DomainError(f"unknown distribution family {family!r}")
        params = list(params or [])
        if family == "lognormal" and len(params) == 1:
            params = [0.0, params[0]]
        if len(params) > len(defaults):
            raise DomainError(f"too many parameters for {family}")
        return cls(family, tuple(params) + defaults[len(params):])

    @property
    def param_label(self) -> str:
        return ";".join(f"{p:g}" for p in self.params)

    def __str__(self) -> str:
        return f"{self.family}({', '.join(f'{p:g}' for p in self.params)})"


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    # midpoints of a 2**-53 grid: strictly inside (0, 1)
    return (rng.integers(0, 2**53, size=n, dtype=np.int64) + 0.5) * 2.0**-53


def draw(spec: DistributionSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise DomainError("n must be at least 1")
    fam, p = spec.family, spec.params
    if fam == "normal":
        return p[0] + p[1] * rng.standard_normal(n)
    if fam == "gumbel":
        return p[0] - p[1] * np.log(-np.log(_open_uniform(rng, n)))
    if fam == "lognormal":
        return np.exp(p[0] + p[1] * rng.standard_normal(n))
    if fam == "student_t":
        z = rng.standard_normal(n)
        v = rng.chisquare(p[0], n)
        while np.any(v == 0.0):
            bad = v == 0.0
            v[bad] = rng.chisquare(p[0], int(bad.sum()))
        return z / np.sqrt(v / p[0])
    return rng.gamma(p[0], p[1], n)


def sample_distribution(spec: DistributionSpec, n: int, stream: np.random.Generator) -> Sample:
    return Sample(draw(spec, n, stream))


def replicate_stream(seed: int, replicate: int, table: int = 0, cell: int = 0, attempt: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(table), int(cell), int(replicate), int(attempt)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SimulationConfig:
    dist: DistributionSpec
    n: int
    reps: int = 10_000
    alphas: tuple[float, ...] = (0.05, 0.01)
    tests: tuple[str, ...] = ("jel",)
    seed: int = 0
    standardize: bool = False
    restandardize: bool = False
    table: int = 0
    cell: int = 0

    def __post_init__(self):
        if int(self.reps) < 1:
            raise DomainError("reps must be at least 1")
        if int(self.n) < MIN_TEST_SIZE:
            raise DomainError(f"n must be at least {MIN_TEST_SIZE}")
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas or any(not 0.0 < a < 1.0 for a in alphas):
            raise DomainError("every alpha must lie in (0, 1)")
        tests = tuple(self.tests)
        unknown = [t for t in tests if t not in TESTS]
        if unknown or not tests:
            raise DomainError(f"unknown tests {unknown}; choose from {TESTS}")
        if "ad" in tests:
            bad = [a for a in alphas if not any(math.isclose(a, k) for k in AD_CRITICAL)]
            if bad:
                raise DomainError(f"Anderson-Darling supports alpha in {sorted(AD_CRITICAL)} only")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "tests", tests)


@dataclass(frozen=True)
class PowerRow:
    table: str
    dist: str
    param: str
    n: int
    test: str
    alpha: float
    rate: float
    se: float
    reps: int
    seed: int
    reference: float | None = None


@dataclass
class PowerTable:
    rows: list[PowerRow]
    seed: int
    metadata: dict = field(default_factory=dict)

    def rate(self, test: str, alpha: float, n: int | None = None, param: str | None = None) -> float:
        hits = [r for r in self.rows
                if r.test == test and math.isclose(r.alpha, alpha)
                and (n is None or r.n == n) and (param is None or r.param == param)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match test={test} alpha={alpha} n={n} param={param}")
        return hits[0].rate

    def row(self, **match) -> PowerRow:
        hits = [r for r in self.rows if all(
            math.isclose(getattr(r, k), v) if isinstance(v, float) else getattr(r, k) == v
            for k, v in match.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {match}")
        return hits[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.table, r.dist, r.param, r.n, r.test, repr(r.alpha), repr(r.rate), repr(r.se), r.reps, r.seed])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "metadata": self.metadata,
                           "rows": [asdict(r) for r in self.rows]}, indent=2)

    def to_text(self) -> str:
        has_ref = any(r.reference is not None for r in self.rows)
        head = ["table", "dist", "param", "n", "test", "alpha", "rate", "se"] + (["ref"] if has_ref else [])
        body = []
        for r in self.rows:
            cells = [r.table, r.dist, r.param, str(r.n), r.test, f"{r.alpha:g}", f"{r.rate:.4f}", f"{r.se:.4f}"]
            if has_ref:
                cells.append("" if r.reference is None else f"{r.reference:.4f}")
            body.append(cells)
        widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(head)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(c.rjust(w) for c, w in zip(b, widths)) for b in body]
        reps = sorted({r.reps for r in self.rows})
        lines.append(f"seed={self.seed} reps={','.join(map(str, reps))} rng={self.metadata.get('rng', RNG_NAME)}")
        return "\n".join(lines) + "\n"


def _decisions(x: np.ndarray, config: SimulationConfig, thresholds: dict) -> np.ndarray:
    """Boolean matrix (tests x alphas) of rejections for one replicate."""
    y = standardize(x) if config.standardize else x
    out = np.zeros((len(config.tests), len(config.alphas)), dtype=bool)
    d = None
    for ti, test in enumerate(config.tests):
        if test in ("jel", "asymptotic") and d is None:
            d = delta_hat(y)
        if test == "jel":
            nu = pseudo_values(d, leave_one_out_deltas(y, restandardize=config.restandardize))
            out[ti] = jel_statistic(nu).minus2logR > thresholds["jel"]
        elif test == "asymptotic":
            z = math.sqrt(d.n) * d.value / math.sqrt(null_sigma0_squared())
            out[ti] = abs(z) > thresholds["asymptotic"]
        elif test == "ad":
            out[ti] = ad_statistic(y) > thresholds["ad"]
        else:
            out[ti] = jb_statistic(x) > thresholds["jb"]
    return out


def _thresholds(config: SimulationConfig) -> dict:
    a = np.array(config.alphas)
    return {
        "jel": np.array([chi2_isf(v, 1) for v in a]),
        "asymptotic": np.array([std_normal_quantile(1 - v / 2) for v in a]),
        "ad": np.array([next(c for k, c in AD_CRITICAL.items() if math.isclose(k, v)) if "ad" in config.tests else np.nan for v in a]),
        "jb": np.array([chi2_isf(v, 2) for v in a]),
    }


def _run_block(config: SimulationConfig, start: int, stop: int) -> tuple[np.ndarray, int]:
    thresholds = _thresholds(config)
    counts = np.zeros((len(config.tests), len(config.alphas)), dtype=np.int64)
    redraws = 0
    for rep in range(start, stop):
        for attempt in range(MAX_REDRAWS):
            rng = replicate_stream(config.seed, rep, config.table, config.cell, attempt)
            x = draw(config.dist, config.n, rng)
            if x.min() == x.max():
                redraws += 1
                continue
            try:
                counts += _decisions(x, config, thresholds)
            except DegenerateSample:
                redraws += 1
                continue
            break
        else:
            raise DegenerateSample(f"replicate {rep} stayed degenerate after {MAX_REDRAWS} redraws")
    return counts, redraws


def _blocks(reps: int, workers: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(reps / max(1, workers * 4)))
    return [(s, min(reps, s + size)) for s in range(0, reps, size)]


def _tally(configs: list[SimulationConfig], workers: int) -> list[tuple[np.ndarray, int]]:
    if workers <= 1:
        return [_run_block(c, 0, c.reps) for c in configs]
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [[pool.submit(_run_block, c, s, e) for s, e in _blocks(c.reps, workers)] for c in configs]
        for fs in futures:
            parts = [f.result() for f in fs]
            results.append((sum(p[0] for p in parts), sum(p[1] for p in parts)))
    return results


def _rows(config: SimulationConfig, counts: np.ndarray, table_label: str, references=None) -> list[PowerRow]:
    rows = []
    for ti, test in enumerate(config.tests):
        for ai, alpha in enumerate(config.alphas):
            r = counts[ti, ai] / config.reps
            ref = None if references is None else references.get((test, alpha))
            rows.append(PowerRow(table_label, config.dist.family, config.dist.param_label, config.n, test,
                                 alpha, float(r), math.sqrt(r * (1 - r) / config.reps), config.reps,
                                 config.seed, ref))
    return rows


def _metadata(configs: Iterable[SimulationConfig], redraws: int) -> dict:
    configs = list(configs)
    return {
        "rng": RNG_NAME,
        "redraws": int(redraws),
        "standardize": configs[0].standardize,
        "restandardize": configs[0].restandardize,
    }


def estimate_rejection_rate(config: SimulationConfig, workers: int = 1) -> PowerTable:
    (counts, redraws), = _tally([config], workers)
    label = str(config.table) if config.table else "sim"
    return PowerTable(_rows(config, counts, label), config.seed, _metadata([config], redraws))


def run_configs(configs: list[SimulationConfig], workers: int = 1, table_label: str = "sim",
                references: list | None = None) -> PowerTable:
    if not configs:
        raise DomainError("no simulation cells to run")
    tallies = _tally(configs, workers)
    rows = []
    for i, (c, (counts, _)) in enumerate(zip(configs, tallies)):
        rows += _rows(c, counts, table_label, None if references is None else references[i])
    return PowerTable(rows, configs[0].seed, _metadata(configs, sum(t[1] for t in tallies)))
