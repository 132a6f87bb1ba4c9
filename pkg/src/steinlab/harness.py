"""Experiment configuration, Monte Carlo driver and report records.

Every CLI command runs through :func:`run`, which returns an exit status
(0 ok, 1 usage error, 2 failed verification) and a list of
:class:`ReportRecord` rows.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from statistics import NormalDist
from typing import List, Optional, Union

import numpy as np

from steinlab.diagram import DiagramError, Rng, double_factorial, from_pairs, sample_partners
from steinlab.limitlab.bounds import (
    VARIANCE_CONSTANT,
    exact_kolmogorov_crossings,
    sb_variance_term,
    stein_normal_bound,
    tv_bound_simple,
)
from steinlab.limitlab.distances import (
    dkw_radius,
    empirical_kolmogorov_counts,
    tv_distance_to_poisson,
)
from steinlab.limitlab.exact import (
    catalan,
    crossing_pmf_exact,
    scfree_bounds,
    simple_chord_free_count,
    simple_chord_pmf_exact,
)
from steinlab.parallel import block_sizes, map_blocks
from steinlab.sizebias import verify_size_bias_exact
from steinlab.statistics import (
    crossing_mean_variance,
    crossings_batch,
    diagram_stats,
    simple_chords_batch,
)

SCHEMA_VERSION = "1"
CONFIDENCE_ALPHA = 1e-4
COMMANDS = ("sample", "stats", "exact-crossings", "exact-simple", "scfree",
            "sb-verify", "stein-bound", "distance", "report")
MC_STATISTICS = ("crossings", "simple_chords", "kolmogorov", "sb_variance")


class UsageError(ValueError):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class ExperimentConfig:
    command: str
    n: int = 1
    samples: int = 0
    seed: int = 0
    workers: int = 1
    format: str = "json"
    out: Optional[str] = None
    statistic: str = "crossings"
    kind: str = "kolmogorov-normal"
    mode: str = "theoretical"
    pairs: Optional[list] = None
    inject_corrupt_pmf: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError("command", f"unknown command {self.command!r}")
        if self.n < 1:
            raise UsageError("--n", "must be at least 1")
        if self.workers < 1:
            raise UsageError("--workers", "must be at least 1")
        if self.samples < 0:
            raise UsageError("--samples", "must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed", "must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise UsageError("--format", "must be json or csv")
        if self.command == "sample" and self.samples < 1:
            raise UsageError("--samples", "sample needs at least one sample")
        if self.command == "stats" and self.pairs is None and self.samples < 1:
            raise UsageError("--samples", "Monte Carlo stats need --samples > 0 (or give --pairs)")


@dataclass
class ReportRecord:
    schema_version: str
    command: str
    n: int
    seed: Optional[int]
    samples: int
    statistic: str
    estimate: Union[Fraction, float]
    exact: bool
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    bound: Optional[float] = None
    elapsed_ms: int = 0

    def __post_init__(self):
        if "\x00" in self.statistic or "\x00" in self.command:
            raise ValueError("labels may not contain NUL (not representable in CSV)")
        if self.exact and (self.ci_low is not None or self.ci_high is not None):
            raise ValueError("exact records carry no confidence interval")
        if self.ci_low is not None and self.ci_high is not None:
            if not self.ci_low <= float(self.estimate) <= self.ci_high:
                raise ValueError("estimate outside its confidence interval")


FIELD_NAMES = [f.name for f in fields(ReportRecord)]


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def _json_value(name: str, value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return json.dumps(str(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"{name} is not finite")
        return _fmt_float(value)
    return json.dumps(value)


def to_json(record: ReportRecord) -> str:
    body = ", ".join(f'"{k}": {_json_value(k, v)}' for k, v in asdict(record).items())
    return "{" + body + "}"


def _parse_estimate(raw, exact: bool):
    if exact:
        return Fraction(raw)
    return float(raw)


def from_json(line: str) -> ReportRecord:
    data = json.loads(line)
    data["estimate"] = _parse_estimate(data["estimate"], data["exact"])
    return ReportRecord(**data)


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt_float(value)
    return str(value)


def to_csv(records: List[ReportRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(FIELD_NAMES)
    for r in records:
        writer.writerow([_csv_value(v) for v in asdict(r).values()])
    return buf.getvalue()


def from_csv(text: str) -> List[ReportRecord]:
    reader = csv.DictReader(io.StringIO(text, newline=""))
    if reader.fieldnames != FIELD_NAMES:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    opt_float = lambda s: float(s) if s != "" else None
    out = []
    for row in reader:
        exact = row["exact"] == "true"
        out.append(ReportRecord(
            schema_version=row["schema_version"],
            command=row["command"],
            n=int(row["n"]),
            seed=int(row["seed"]) if row["seed"] != "" else None,
            samples=int(row["samples"]),
            statistic=row["statistic"],
            estimate=_parse_estimate(row["estimate"], exact),
            exact=exact,
            ci_low=opt_float(row["ci_low"]),
            ci_high=opt_float(row["ci_high"]),
            bound=opt_float(row["bound"]),
            elapsed_ms=int(row["elapsed_ms"]),
        ))
    return out


def serialize(records: List[ReportRecord], fmt: str = "json") -> str:
    if fmt == "json":
        return "".join(to_json(r) + "\n" for r in records)
    if fmt == "csv":
        return to_csv(records)
    raise ValueError(f"unknown format {fmt!r}")


def parse(text: str, fmt: str = "json") -> List[ReportRecord]:
    if fmt == "json":
        return [from_json(line) for line in text.splitlines() if line.strip()]
    if fmt == "csv":
        return from_csv(text)
    raise ValueError(f"unknown format {fmt!r}")


# -- Monte Carlo -------------------------------------------------------------

def _histogram_block(statistic: str, n: int, size: int, seed: int, stream: int) -> Counter:
    partners = sample_partners(n, size, Rng(seed, stream))
    if statistic == "simple_chords":
        values = simple_chords_batch(partners)
    else:
        values = crossings_batch(partners)
    return Counter(dict(zip(*(a.tolist() for a in np.unique(values, return_counts=True)))))


def sample_histogram(statistic: str, n: int, samples: int, seed: int, workers: int = 1) -> Counter:
    """Histogram of a statistic over ``samples`` uniform diagrams, drawn in fixed blocks."""
    args = [(statistic, n, size, seed, b) for b, size in enumerate(block_sizes(samples))]
    merged = Counter()
    for part in map_blocks(_histogram_block, args, workers):
        merged.update(part)
    return merged


def _z() -> float:
    return NormalDist().inv_cdf(1.0 - CONFIDENCE_ALPHA / 2.0)


def mc_estimate(statistic: str, n: int, samples: int, seed: int, workers: int = 1,
                command: str = "mc") -> ReportRecord:
    """Monte Carlo estimate with a ``1 - 1e-4`` confidence interval.

    ``crossings`` and ``simple_chords`` estimate the mean (normal-approximation
    CI); ``kolmogorov`` estimates the Kolmogorov distance of the standardized
    crossing count to N(0,1) (DKW CI); ``sb_variance`` estimates the variance
    of the conditional mean crossing increment using ``samples`` outer
    diagrams (bootstrap CI).  Results depend only on ``(statistic, n,
    samples, seed)``, never on ``workers``.
    """
    if samples < 1:
        raise UsageError("--samples", "Monte Carlo needs at least one sample")
    if statistic not in MC_STATISTICS:
        raise UsageError("--statistic", f"unknown statistic {statistic!r}")
    start = time.perf_counter()
    bound = None
    if statistic == "sb_variance":
        if n < 2:
            raise UsageError("--n", "sb_variance needs n >= 2")
        if samples < 2:
            raise UsageError("--samples", "sb_variance needs at least two outer samples")
        res = sb_variance_term(n, "monte_carlo", outer=samples, seed=seed, workers=workers)
        est = float(res.value)
        half = _z() * res.stderr
        lo, hi = min(est, max(0.0, est - half)), est + half
        bound = float(VARIANCE_CONSTANT * n)
    else:
        hist = sample_histogram("crossings" if statistic == "kolmogorov" else statistic,
                                n, samples, seed, workers)
        values = np.array(sorted(hist), dtype=float)
        counts = np.array([hist[int(v)] for v in values], dtype=np.int64)
        if statistic == "kolmogorov":
            if n < 2:
                raise UsageError("--n", "kolmogorov needs n >= 2")
            mu, var = crossing_mean_variance(n)
            z = (values - float(mu)) / math.sqrt(var)
            est = empirical_kolmogorov_counts(z, counts)
            r = dkw_radius(samples, CONFIDENCE_ALPHA)
            lo, hi = max(0.0, est - r), min(1.0, est + r)
            bound = 12920.0 / math.sqrt(n)
        else:
            mean = float((values * counts).sum() / samples)
            var = float((counts * (values - mean) ** 2).sum() / max(samples - 1, 1))
            half = _z() * math.sqrt(var / samples)
            est, lo, hi = mean, mean - half, mean + half
    elapsed = int((time.perf_counter() - start) * 1000)
    return ReportRecord(SCHEMA_VERSION, command, n, seed, samples, statistic, est, False,
                        lo, hi, bound, elapsed)


# -- commands ----------------------------------------------------------------

@dataclass
class RunResult:
    status: int
    records: List[ReportRecord] = field(default_factory=list)
    messages: List[str] = field(default_factory=list)


class _Recorder:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.records: List[ReportRecord] = []
        self.failures: List[str] = []
        self._start = time.perf_counter()

    def exact(self, statistic: str, value, bound=None):
        self._add(statistic, Fraction(value), True, bound=bound)

    def approx(self, statistic: str, value: float, bound=None):
        self._add(statistic, float(value), False, bound=bound)

    def _add(self, statistic, estimate, exact, bound=None):
        c = self.config
        elapsed = int((time.perf_counter() - self._start) * 1000)
        self.records.append(ReportRecord(
            SCHEMA_VERSION, c.command, c.n, c.seed, c.samples, statistic, estimate, exact,
            bound=None if bound is None else float(bound), elapsed_ms=elapsed))

    def check(self, ok: bool, claim: str, detail: str):
        if not ok:
            self.failures.append(f"{claim} violated: {detail}")


def _pmf_rows(rec: _Recorder, pmf):
    for k, w in pmf.items():
        rec.exact(f"pmf[{k}]", w)


def _cmd_sample(c: ExperimentConfig, rec: _Recorder):
    partners = sample_partners(c.n, c.samples, Rng(c.seed, 0))
    crossings = crossings_batch(partners)
    for k, row in enumerate(partners):
        cycle = "".join(f"({i + 1} {p + 1})" for i, p in enumerate(row) if i < p)
        rec.exact(f"sample[{k}] {cycle} crossings", int(crossings[k]))


def _cmd_stats(c: ExperimentConfig, rec: _Recorder):
    if c.pairs is not None:
        try:
            d = from_pairs(c.pairs)
        except DiagramError as exc:
            raise UsageError("--pairs", str(exc)) from exc
        c.n = d.n
        s = diagram_stats(d)
        rec.exact("crossings", s.crossings)
        rec.exact("nestings", s.nestings)
        rec.exact("simple_chords", s.simple_chords)
        rec.exact("components", s.components)
        for j, v in s.length_counts.items():
            rec.exact(f"length[{j}]", v)
        return
    for stat in ("crossings", "simple_chords"):
        r = mc_estimate(stat, c.n, c.samples, c.seed, c.workers, command=c.command)
        rec.records.append(r)


def _cmd_exact_crossings(c: ExperimentConfig, rec: _Recorder):
    pmf = crossing_pmf_exact(c.n)
    _pmf_rows(rec, pmf)
    mu, var = crossing_mean_variance(c.n)
    rec.exact("mean", pmf.mean(), bound=mu)
    rec.exact("variance", pmf.variance(), bound=var)
    rec.check(pmf.mean() == mu and pmf.variance() == var, "crossing mean/variance identity",
              f"got ({pmf.mean()}, {pmf.variance()}), expected ({mu}, {var})")
    zero = Fraction(catalan(c.n), double_factorial(2 * c.n - 1))
    rec.check(pmf[0] == zero, "noncrossing diagrams counted by Catalan numbers",
              f"mass at 0 is {pmf[0]}, expected {zero}")


def _cmd_exact_simple(c: ExperimentConfig, rec: _Recorder):
    pmf = simple_chord_pmf_exact(c.n)
    _pmf_rows(rec, pmf)
    lam = Fraction(2 * c.n, 2 * c.n - 1)
    rec.exact("mean", pmf.mean(), bound=lam)
    rec.check(pmf.mean() == lam, "simple-chord mean 2n/(2n-1)", f"got {pmf.mean()}")


def _cmd_scfree(c: ExperimentConfig, rec: _Recorder):
    s = simple_chord_free_count(c.n)
    total = double_factorial(2 * c.n - 1)
    lower, upper = scfree_bounds(c.n)
    ratio = Fraction(s, total)
    rec.exact("s(n)", s)
    rec.exact("s(n)/(2n-1)!!", ratio, bound=upper)
    rec.approx("lower_factor", lower)
    rec.approx("upper_factor", upper)
    rec.check(lower <= ratio <= upper, "simple-chord-free count bounds",
              f"s(n)/(2n-1)!! = {float(ratio)!r} outside [{lower!r}, {upper!r}]")


def _cmd_sb_verify(c: ExperimentConfig, rec: _Recorder):
    report = verify_size_bias_exact(c.n, c.statistic)
    if report.coupled_law is None:
        gap = Fraction(1)
    else:
        gap = sum((abs(a - b) for a, b in report.per_point.values()), Fraction(0)) / 2
    rec.exact(f"match: {'true' if report.match else 'false'}", gap)
    rec.check(report.match, f"size-bias coupling law ({c.statistic})", report.message)


def _cmd_stein_bound(c: ExperimentConfig, rec: _Recorder):
    if c.n < 2:
        raise UsageError("--n", "stein-bound needs n >= 2")
    if c.mode not in ("theoretical", "empirical"):
        raise UsageError("--mode", "must be theoretical or empirical")
    outer = c.samples if c.samples >= 2 else 2000
    report = stein_normal_bound(c.n, c.mode, outer=outer, seed=c.seed, workers=c.workers)
    cap = 12920.0 / math.sqrt(c.n)
    rec.approx("term1", report.term1)
    rec.approx("term2", report.term2)
    rec.approx("total", report.total, bound=cap if c.mode == "theoretical" else None)
    if not math.isnan(report.comparison):
        rec.approx("exact_kolmogorov", report.comparison, bound=report.total)
    if c.mode == "theoretical":
        rec.check(report.total <= cap * (1 + 1e-12), "crossing Stein bound 12920 n^(-1/2)",
                  f"total {report.total!r} > {cap!r}")
    rec.check(report.dominates, "size-bias Stein normal bound",
              f"total {report.total!r} < exact distance {report.comparison!r}")


def _corrupt(pmf) -> dict:
    # test hook: unnormalised weights, four times the true mass
    return {k: 4 * w for k, w in pmf.items()}


def _cmd_distance(c: ExperimentConfig, rec: _Recorder):
    if c.kind == "kolmogorov-normal":
        if c.n < 2:
            raise UsageError("--n", "kolmogorov-normal needs n >= 2")
        cap = 12920.0 / math.sqrt(c.n)
        if c.samples > 0:
            r = mc_estimate("kolmogorov", c.n, c.samples, c.seed, c.workers, command=c.command)
            rec.records.append(r)
            value = r.estimate
        else:
            value = exact_kolmogorov_crossings(c.n)
            rec.approx("kolmogorov_distance", value, bound=cap)
        rec.check(0 <= value <= min(1.0, cap), "crossing Kolmogorov bound 12920 n^(-1/2)",
                  f"distance {value!r} exceeds {min(1.0, cap)!r}")
    elif c.kind == "tv-poisson":
        pmf = simple_chord_pmf_exact(c.n)
        weights = _corrupt(pmf) if c.inject_corrupt_pmf else pmf
        lam = 2 * c.n / (2 * c.n - 1)
        value = tv_distance_to_poisson(weights, lam)
        bound = tv_bound_simple(c.n)[2]
        rec.approx("tv_distance", value, bound=bound)
        rec.check(0 <= value <= min(1.0, float(bound)), "simple-chord Poisson TV bound 10n/(2n-1)^2",
                  f"distance {value!r} exceeds {float(bound)!r}")
    else:
        raise UsageError("--kind", "must be kolmogorov-normal or tv-poisson")


def _cmd_report(c: ExperimentConfig, rec: _Recorder):
    for n in range(2, c.n + 1):
        pmf = crossing_pmf_exact(n)
        mu, var = crossing_mean_variance(n)
        rec.check(pmf.mean() == mu and pmf.variance() == var,
                  "crossing mean/variance identity", f"n={n}")
        rec.check(pmf[0] == Fraction(catalan(n), double_factorial(2 * n - 1)),
                  "Catalan count of noncrossing diagrams", f"n={n}")
        dk = exact_kolmogorov_crossings(n)
        rec.approx(f"n={n} kolmogorov_distance", dk, bound=12920.0 / math.sqrt(n))
        rec.check(dk <= 12920.0 / math.sqrt(n), "crossing Kolmogorov bound", f"n={n}")
        tv = tv_distance_to_poisson(simple_chord_pmf_exact(n), 2 * n / (2 * n - 1))
        bound = tv_bound_simple(n)[2]
        rec.approx(f"n={n} tv_distance", tv, bound=bound)
        rec.check(tv <= bound, "simple-chord Poisson TV bound", f"n={n}: {tv!r}")
        lower, upper = scfree_bounds(n)
        ratio = Fraction(simple_chord_free_count(n), double_factorial(2 * n - 1))
        rec.exact(f"n={n} s(n)/(2n-1)!!", ratio, bound=upper)
        rec.check(lower <= ratio <= upper, "simple-chord-free count bounds", f"n={n}")
        for stat, limit in (("crossings", 4), ("simple_chords", 5)):
            if n <= limit:
                ok = verify_size_bias_exact(n, stat).match
                rec.exact(f"n={n} size-bias {stat} match: {'true' if ok else 'false'}", int(ok))
                rec.check(ok, f"size-bias coupling law ({stat})", f"n={n}")


_DISPATCH = {
    "sample": _cmd_sample,
    "stats": _cmd_stats,
    "exact-crossings": _cmd_exact_crossings,
    "exact-simple": _cmd_exact_simple,
    "scfree": _cmd_scfree,
    "sb-verify": _cmd_sb_verify,
    "stein-bound": _cmd_stein_bound,
    "distance": _cmd_distance,
    "report": _cmd_report,
}


def run(config: ExperimentConfig) -> RunResult:
    """Execute one experiment; usage errors give status 1, failed checks status 2."""
    try:
        config.validate()
        rec = _Recorder(config)
        _DISPATCH[config.command](config, rec)
    except UsageError as exc:
        return RunResult(1, [], [f"usage error: {exc}"])
    if rec.failures:
        return RunResult(2, rec.records, rec.failures)
    return RunResult(0, rec.records, [])
