"""Numerical evaluation of the size-bias Stein bounds for crossings and simple chords."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

import numpy as np

from steinlab.diagram import Rng, all_partners, sample_partners
from steinlab.limitlab.distances import kolmogorov_distance_to_normal
from steinlab.limitlab.exact import crossing_pmf_exact
from steinlab.parallel import map_blocks
from steinlab.sizebias import _random_quadruples, couple_crossings_batch
from steinlab.statistics import crossing_mean_variance, crossings_batch

EXACT_LIMIT = 7
EXACT_DK_LIMIT = 60
VARIANCE_CONSTANT = 432**2
ROWS_PER_CHUNK = 16384


@dataclass(frozen=True)
class SBVariance:
    """Variance of the pi-conditioned mean crossing increment.

    ``value`` is a ``Fraction`` for the exact method and a float otherwise;
    ``max_increment`` is the largest ``|X^s - X|`` seen (over all pairs when exact).
    """

    n: int
    value: Union[Fraction, float]
    exact: bool
    stderr: float
    max_increment: int
    outer: int = 0
    inner: int = 0

    def __float__(self):
        return float(self.value)


@lru_cache(maxsize=4)
def _increment_sums_exact(n: int):
    """Per-diagram sums over all quadruples of ``X^(i) - X`` and the max ``|X^(i) - X|``."""
    partners = all_partners(n)
    before = crossings_batch(partners)
    sums = np.zeros(len(partners), dtype=np.int64)
    worst = 0
    for quad in combinations(range(2 * n), 4):
        delta = crossings_batch(couple_crossings_batch(partners, np.array(quad))) - before
        sums += delta
        worst = max(worst, int(np.abs(delta).max()))
    assert worst <= 4 * n
    sums.setflags(write=False)
    return sums, worst


def _mc_block(n: int, rows: int, inner: int, seed: int, stream: int):
    gen = Rng(seed, stream).generator()
    partners = sample_partners(n, rows, gen)
    before = crossings_batch(partners)
    deltas = np.empty((rows, inner), dtype=np.int64)
    per = max(1, ROWS_PER_CHUNK // inner)
    for start in range(0, rows, per):
        stop = min(rows, start + per)
        rep = np.repeat(partners[start:stop], inner, axis=0)
        quads = _random_quadruples(gen, 2 * n, len(rep))
        after = crossings_batch(couple_crossings_batch(rep, quads))
        deltas[start:stop] = after.reshape(stop - start, inner) - before[start:stop, None]
    return deltas.mean(axis=1), deltas.var(axis=1, ddof=1), int(np.abs(deltas).max())


def _two_stage_variance(means: np.ndarray, within: np.ndarray, inner: int) -> float:
    # the spread of inner means overstates Var(Delta) by E[within variance]/inner
    return float(means.var(ddof=1) - within.mean() / inner)


def sb_variance_term(
    n: int,
    method: str = "exact",
    outer: int = 2000,
    inner: int = 64,
    seed: int = 0,
    workers: int = 1,
    bootstrap: int = 200,
    block: int = 256,
) -> SBVariance:
    """``Var(E[X^s - X | pi])`` over a uniform diagram ``pi``.

    ``exact`` enumerates every diagram and quadruple.  ``monte_carlo`` draws
    ``outer`` diagrams and ``inner`` quadruples each, corrects the variance of
    the inner means for inner noise, and reports a bootstrap standard error
    over diagrams.  The estimate is clipped at zero.
    """
    if n < 2:
        raise ValueError("crossing coupling needs n >= 2")
    if method == "exact":
        if n > EXACT_LIMIT:
            raise ValueError(f"exact enumeration is limited to n <= {EXACT_LIMIT}")
        sums, worst = _increment_sums_exact(n)
        m = len(sums)
        total = math.comb(2 * n, 4)
        s1 = int(sums.sum())
        s2 = sum(int(s) * int(s) for s in sums)
        value = Fraction(m * s2 - s1 * s1, m * m * total * total)
        return SBVariance(n, value, True, 0.0, worst)
    if method != "monte_carlo":
        raise ValueError(f"unknown method {method!r}")
    if outer < 2 or inner < 2:
        raise ValueError("monte_carlo needs outer >= 2 and inner >= 2")
    args = []
    for b, start in enumerate(range(0, outer, block)):
        args.append((n, min(block, outer - start), inner, seed, b))
    parts = map_blocks(_mc_block, args, workers)
    means = np.concatenate([p[0] for p in parts])
    within = np.concatenate([p[1] for p in parts])
    worst = max(p[2] for p in parts)
    estimate = _two_stage_variance(means, within, inner)
    boot_gen = Rng(seed, 2**32).generator()
    reps = []
    for _ in range(bootstrap):
        idx = boot_gen.integers(0, outer, size=outer)
        reps.append(_two_stage_variance(means[idx], within[idx], inner))
    stderr = float(np.std(reps, ddof=1))
    return SBVariance(n, max(estimate, 0.0), False, stderr, worst, outer, inner)


@dataclass(frozen=True)
class BoundReport:
    n: int
    term1: float
    term2: float
    total: float
    mode: str
    comparison: float
    notes: dict = field(default_factory=dict)

    @property
    def dominates(self) -> bool:
        return math.isnan(self.comparison) or self.total >= self.comparison


def exact_kolmogorov_crossings(n: int) -> float:
    """Exact Kolmogorov distance between the standardized crossing count and N(0,1)."""
    mu, var = crossing_mean_variance(n)
    return kolmogorov_distance_to_normal(crossing_pmf_exact(n), mu, math.sqrt(var))


def stein_normal_bound(
    n: int,
    mode: str = "theoretical",
    variance: Optional[SBVariance] = None,
    outer: int = 2000,
    inner: int = 64,
    seed: int = 0,
    workers: int = 1,
) -> BoundReport:
    """``2 mu/sigma^2 sqrt(V) + 8 mu D^2 / sigma^3`` for the crossing count.

    ``theoretical`` uses ``mu <= n^2/6``, ``sigma^2 >= n^3/45``,
    ``V <= 432^2 n`` and ``D = 4n``.  ``empirical`` uses the exact ``mu``
    and ``sigma``, ``V`` from :func:`sb_variance_term` (exact up to n = 6,
    Monte Carlo above unless ``variance`` is given) and ``D`` the largest
    observed ``|X^s - X|``.
    """
    if n < 2:
        raise ValueError("bound needs n >= 2")
    if mode == "theoretical":
        mu, var = n * n / 6.0, n**3 / 45.0
        v, d = VARIANCE_CONSTANT * n, 4.0 * n
        notes = {"second_term": "almost-sure bound |X^s - X| <= 4n"}
    elif mode == "empirical":
        mu_q, var_q = crossing_mean_variance(n)
        mu, var = float(mu_q), float(var_q)
        if variance is None:
            method = "exact" if n <= 6 else "monte_carlo"
            variance = sb_variance_term(n, method, outer=outer, inner=inner, seed=seed,
                                        workers=workers)
        v, d = float(variance.value), float(variance.max_increment)
        notes = {
            "second_term": "observed maximum of |X^s - X|",
            "variance_method": "exact" if variance.exact else "monte_carlo",
            "variance_conditioning": "pi (upper bound for conditioning on X)",
        }
    else:
        raise ValueError(f"unknown mode {mode!r}")
    term1 = 2.0 * mu / var * math.sqrt(v)
    term2 = 8.0 * mu * d * d / var**1.5
    comparison = exact_kolmogorov_crossings(n) if n <= EXACT_DK_LIMIT else float("nan")
    return BoundReport(n, term1, term2, term1 + term2, mode, comparison, notes)


def tv_bound_simple(n: int) -> tuple:
    """``(2n/(2n-1)^2, 8n/(2n-1)^2, 10n/(2n-1)^2)``: the two coupling terms and their sum."""
    if n < 1:
        raise ValueError("n must be at least 1")
    denom = (2 * n - 1) ** 2
    return Fraction(2 * n, denom), Fraction(8 * n, denom), Fraction(10 * n, denom)
