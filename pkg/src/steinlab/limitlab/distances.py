"""Reference laws and distances: Kolmogorov to the normal, total variation to Poisson."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Union

import numpy as np
from scipy.special import ndtr

from steinlab.pmf import Pmf

POISSON_TAIL = 1e-12


class EmptySample(ValueError):
    pass


def normal_cdf(x: float) -> float:
    """Standard normal CDF as ``erfc(-x / sqrt 2) / 2``.

    ``erfc`` keeps full relative precision in the lower tail, where
    ``(1 + erf)/2`` would cancel.
    """
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def poisson_pmf(lam: float, k: int) -> float:
    if lam <= 0:
        raise ValueError("Poisson mean must be positive")
    if k < 0:
        return 0.0
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))


def poisson_cutoff(lam: float, tail: float = POISSON_TAIL) -> int:
    """Smallest ``K >= lam`` with ``P(Y > K) <= tail``, using the geometric tail bound.

    For ``k >= lam`` the ratio of consecutive terms is ``lam/(k+1) <= r < 1``,
    so ``P(Y > K) <= pmf(K+1) / (1 - r)``.
    """
    k = max(int(math.ceil(lam)), 1)
    while True:
        r = lam / (k + 2)
        if poisson_pmf(lam, k + 1) / (1.0 - r) <= tail:
            return k
        k += 1


def _standardized_cdf_points(p: Pmf, mu, sigma):
    mu, sigma = float(mu), float(sigma)
    for x, left, right in p.cdf_points():
        yield (x - mu) / sigma, float(left), float(right)


def kolmogorov_distance_to_normal(p: Pmf, mu, sigma) -> float:
    """``sup_x |P((X - mu)/sigma <= x) - Phi(x)|`` for a lattice law ``p``.

    Between atoms the law's CDF is flat and ``Phi`` is monotone, so the
    supremum is attained at an atom, either at the atom or just left of it.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    best = 0.0
    for z, left, right in _standardized_cdf_points(p, mu, sigma):
        phi = normal_cdf(z)
        best = max(best, abs(right - phi), abs(left - phi))
    return best


def empirical_kolmogorov(samples) -> float:
    """``sup_x |F_m(x) - Phi(x)|`` for the empirical CDF of ``samples``, left limits included."""
    values, counts = np.unique(np.asarray(samples, dtype=float), return_counts=True)
    if values.size == 0:
        raise EmptySample("need at least one sample")
    return empirical_kolmogorov_counts(values, counts)


def empirical_kolmogorov_counts(values, counts) -> float:
    """Same as :func:`empirical_kolmogorov` for a histogram of distinct ascending values."""
    values = np.asarray(values, dtype=float)
    counts = np.asarray(counts, dtype=np.int64)
    total = counts.sum()
    if total == 0:
        raise EmptySample("need at least one sample")
    right = np.cumsum(counts) / total
    left = right - counts / total
    phi = ndtr(values)
    return float(max(np.abs(right - phi).max(), np.abs(left - phi).max()))


def dkw_radius(m: int, delta: float) -> float:
    """Radius ``eps`` with ``P(sup |F_m - F| > eps) <= delta`` (Massart's constant)."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * m))


def tv_distance_to_poisson(
    p: Union[Pmf, Mapping[int, Fraction]],
    lam: float,
    with_error: bool = False,
):
    """``(1/2) sum_k |p(k) - Poisson(lam)(k)|``.

    The sum runs to ``K = max(max support, poisson_cutoff(lam))``; past ``K``
    only Poisson mass remains, and its total is added as ``tail/2``.  With
    ``with_error`` the truncation bound on that tail mass is returned too.
    """
    weights = p.weights if isinstance(p, Pmf) else dict(p)
    top = max(max(weights, default=0), poisson_cutoff(lam))
    total = 0.0
    for k in range(top + 1):
        q = poisson_pmf(lam, k)
        total += abs(float(weights.get(k, 0)) - q)
    tail = _poisson_upper_tail(lam, top)
    value = 0.5 * (total + tail)
    if with_error:
        return value, 0.5 * POISSON_TAIL
    return value


def _poisson_upper_tail(lam: float, k: int) -> float:
    """``P(Y > k)`` by summing terms until they stop contributing."""
    tail, j = 0.0, k + 1
    term = poisson_pmf(lam, j)
    while term > 0 and term > 1e-18 * max(tail, 1e-300):
        tail += term
        j += 1
        term *= lam / j
    return tail
