"""Command-line interface: ``steingof test | simulate | tables``.

Exit codes: 0 = no test rejected, 1 = at least one rejection, 2 = error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .classical import anderson_darling, jarque_bera
from .errors import SteinGofError
from .jel import jel_test
from .sample import Sample, load_sample, standardize
from .simulation import FAMILIES, TESTS, DistributionSpec, SimulationConfig, estimate_rejection_rate
from .stein import asymptotic_test
from .tables import run_table

DEMO_SEED = 20201
DEMO_SIZE = 100


@dataclass
class Report:
    n: int
    mean: float
    sd: float
    results: list[dict] = field(default_factory=list)
    version: str = __version__
    seed: int | None = None

    @property
    def any_reject(self) -> bool:
        return any(r["reject"] for r in self.results)

    def to_dict(self) -> dict:
        out = {"version": self.version, "input": {"n": self.n, "mean": self.mean, "sd": self.sd},
               "results": self.results}
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        lines = ["test,statistic,p_value,alpha,reject"]
        for r in self.results:
            p = "" if r["p_value"] is None else repr(r["p_value"])
            lines.append(f"{r['test']},{r['statistic']!r},{p},{r['alpha']!r},{str(r['reject']).lower()}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"steingof {self.version}",
                 f"n = {self.n}   mean = {self.mean:.4f}   sd = {self.sd:.4f}"]
        if self.seed is not None:
            lines.append(f"demo seed = {self.seed}")
        lines.append("")
        lines.append(f"{'test':<11}{'statistic':>12}{'p / crit':>13}{'alpha':>8}  decision")
        for r in self.results:
            p = f"{r['p_value']:.4f}" if r["p_value"] is not None else f"crit {r['critical_value']:.3f}"
            decision = "reject" if r["reject"] else "do not reject"
            lines.append(f"{r['test']:<11}{r['statistic']:>12.4f}{p:>13}{r['alpha']:>8.4f}  {decision}")
        return "\n".join(lines) + "\n"


def demo_sample() -> Sample:
    """Fixed N(0, 1) demo dataset; no test rejects it at the 5% level."""
    rng = np.random.Generator(np.random.PCG64(DEMO_SEED))
    return Sample(rng.standard_normal(DEMO_SIZE))


def _parse_list(text: str, allowed, what: str) -> list[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in allowed]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"unknown {what} {bad}; choose from {sorted(allowed)}")
    return items


def _tests_arg(text: str) -> list[str]:
    items = _parse_list(text, set(TESTS) | {"all"}, "tests")
    if "all" in items:
        return list(TESTS)
    return list(dict.fromkeys(items))


def _alphas_arg(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def run_tests(sample: Sample, tests: list[str], alpha: float, restandardize: bool = False) -> Report:
    """Standardize once and run the requested tests on the standardized values."""
    y = standardize(sample)
    report = Report(n=y.n, mean=y.mean_raw, sd=y.sd_raw)
    for name in tests:
        if name == "jel":
            r = jel_test(y, alpha, restandardize=restandardize)
            report.results.append(dict(test="jel", statistic=r.statistic, p_value=r.p_value, alpha=alpha,
                                       reject=r.reject, critical_value=None, delta=r.delta,
                                       lam=r.diagnostics.lam, feasible=r.diagnostics.feasible))
        elif name == "asymptotic":
            r = asymptotic_test(y, alpha)
            report.results.append(dict(test="asymptotic", statistic=r.statistic_z, p_value=r.p_value,
                                       alpha=alpha, reject=r.reject, critical_value=None, delta=r.delta,
                                       sigma0=r.sigma0))
        elif name == "ad":
            r = anderson_darling(y, alpha)
            report.results.append(dict(test="ad", statistic=r.statistic, p_value=None, alpha=alpha,
                                       reject=r.reject, critical_value=r.critical_value))
        elif name == "jb":
            r = jarque_bera(sample, alpha)
            report.results.append(dict(test="jb", statistic=r.statistic, p_value=r.p_value, alpha=alpha,
                                       reject=r.reject, critical_value=None))
    return report


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_table(table, fmt: str) -> str:
    return {"text": table.to_text, "json": table.to_json, "csv": table.to_csv}[fmt]()


def cmd_test(args) -> int:
    if args.demo:
        sample, seed = demo_sample(), DEMO_SEED
    elif args.file is None:
        raise SteinGofError("give a data file, '-' for stdin, or --demo")
    elif args.file == "-":
        sample, seed = load_sample(sys.stdin.read()), None
    else:
        with open(args.file, "rb") as fh:
            sample, seed = load_sample(fh), None
    report = run_tests(sample, args.tests, args.alpha, restandardize=args.restandardize)
    report.seed = seed
    _emit({"text": report.to_text, "json": report.to_json, "csv": report.to_csv}[args.format](), args.out)
    return 1 if report.any_reject else 0


def cmd_simulate(args) -> int:
    dist = DistributionSpec.parse(args.dist, args.param)
    config = SimulationConfig(dist=dist, n=args.n, reps=args.reps, alphas=tuple(args.alpha),
                              tests=tuple(args.tests), seed=args.seed, standardize=args.standardize,
                              restandardize=args.restandardize)
    table = estimate_rejection_rate(config, workers=args.threads)
    _emit(_render_table(table, args.format), args.out)
    return 0


def cmd_tables(args) -> int:
    table = run_table(args.id, reps=args.reps, seed=args.seed, workers=args.threads,
                             standardize=args.standardize, restandardize=args.restandardize)
    text = _render_table(table, args.format)
    if args.format == "text":
        text = f"Table {args.id}: {table.metadata['title']}\n" + text
    _emit(text, args.out)
    return 0


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="steingof", formatter_class=fmt,
                                     description="Stein-characterization normality tests and power studies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_sim(p):
        p.add_argument("--reps", type=int, default=10_000, help="Monte Carlo replicates per cell")
        p.add_argument("--seed", type=int, default=0, help="master seed (unsigned 64-bit)")
        p.add_argument("--threads", type=_positive_int, default=1, help="worker processes; results do not depend on it")
        p.add_argument("--standardize", action="store_true",
                       help="standardize each draw before testing (default: test raw draws against N(0,1))")
        p.add_argument("--restandardize", action="store_true",
                       help="restandardize every jackknife subsample in the JEL test")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text", help="output format")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("test", formatter_class=fmt, help="test a data file for normality")
    p.add_argument("file", nargs="?", default=None, help="data file of numbers ('-' for stdin)")
    p.add_argument("--tests", type=_tests_arg, default=list(TESTS), help="comma list from jel,asymptotic,ad,jb,all")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--restandardize", action="store_true",
                   help="restandardize every jackknife subsample in the JEL test")
    p.add_argument("--demo", action="store_true", help="use the embedded 100-point N(0,1) demo dataset")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text", help="output format")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", formatter_class=fmt, help="estimate rejection rates for one distribution")
    p.add_argument("--dist", choices=sorted(FAMILIES), default="normal", help="distribution family")
    p.add_argument("--param", type=float, action="append", default=None,
                   help="family parameter, repeatable; e.g. gumbel location, lognormal log-sd, t df")
    p.add_argument("--n", type=int, default=100, help="sample size")
    p.add_argument("--alpha", type=_alphas_arg, default=[0.05], help="comma list of levels")
    p.add_argument("--tests", type=_tests_arg, default=["jel"], help="comma list from jel,asymptotic,ad,jb,all")
    common_sim(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tables", formatter_class=fmt, help="reproduce one of the seven rejection-rate tables")
    p.add_argument("--id", type=int, required=True, choices=range(1, 8), metavar="{1..7}", help="table number")
    common_sim(p)
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (SteinGofError, OSError, ValueError) as exc:
        print(f"steingof: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
