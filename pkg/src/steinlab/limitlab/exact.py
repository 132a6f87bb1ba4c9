"""Exact laws of the crossing and simple-chord counts, and simple-chord-free counts."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from steinlab.diagram import double_factorial
from steinlab.pmf import Pmf


@lru_cache(maxsize=None)
def touchard_riordan_counts(n: int) -> tuple:
    """Coefficients ``T[k]`` = number of size-``n`` diagrams with exactly ``k`` crossings.

    Left-to-right sweep over the linearized diagram, tracking the number of
    open chords.  Opening a chord leaves the polynomial unchanged; closing one
    of ``m`` open chords multiplies by ``1 + q + ... + q^(m-1)``, since closing
    the chord with ``j`` later-opened chords still open creates ``j`` crossings.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    # state[m] = coefficient list of the polynomial for m open chords
    state = {0: [1]}
    for pos in range(2 * n):
        remaining = 2 * n - pos
        nxt = {}
        for m, poly in state.items():
            if m + 1 <= remaining - 1:
                _accumulate(nxt, m + 1, poly)
            if m >= 1:
                _accumulate(nxt, m - 1, _times_qint(poly, m))
        state = nxt
    return tuple(state[0])


def _times_qint(poly: list, m: int) -> list:
    """Multiply by ``1 + q + ... + q^(m-1)`` using prefix sums."""
    prefix = [0]
    for c in poly:
        prefix.append(prefix[-1] + c)
    deg = len(poly) + m - 1
    out = []
    for k in range(deg):
        hi = min(k, len(poly) - 1)
        lo = max(0, k - m + 1)
        out.append(prefix[hi + 1] - prefix[lo])
    return out


def _accumulate(table: dict, key: int, poly: list) -> None:
    cur = table.get(key)
    if cur is None:
        table[key] = list(poly)
        return
    if len(cur) < len(poly):
        cur.extend([0] * (len(poly) - len(cur)))
    for k, c in enumerate(poly):
        cur[k] += c


def crossing_pmf_exact(n: int) -> Pmf:
    counts = touchard_riordan_counts(n)
    total = double_factorial(2 * n - 1)
    return Pmf({k: Fraction(c, total) for k, c in enumerate(counts) if c})


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def cycle_independent_sets(size: int, k: int) -> int:
    """Ways to choose ``k`` pairwise non-adjacent positions on a ``size``-cycle."""
    if k == 0:
        return 1
    if size < 2 * k:
        return 0
    return size * math.comb(size - k, k) // (size - k)


@lru_cache(maxsize=None)
def _simple_chord_factorial_moments(n: int) -> tuple:
    """``(2n-1)!! * E[C(S_n, k)]`` for ``k = 0..n`` as integers.

    Positions whose simple chords share a point cannot occur together, so the
    sum over k-sets of positions only runs over non-adjacent positions on the
    2n-cycle, each occurring with probability ``(2n-2k-1)!!/(2n-1)!!``.
    """
    size = 2 * n
    return tuple(cycle_independent_sets(size, k) * double_factorial(size - 2 * k - 1)
                 for k in range(n + 1))


def _simple_chord_counts(n: int) -> dict:
    if n == 1:
        # (1,2) and (2,1) name the same chord, so the positions are not disjoint events
        return {2: 1}
    e = _simple_chord_factorial_moments(n)
    counts = {}
    for m in range(n + 1):
        c = sum((-1) ** (k - m) * math.comb(k, m) * e[k] for k in range(m, n + 1))
        if c:
            counts[m] = c
    return counts


def simple_chord_pmf_exact(n: int) -> Pmf:
    """Exact law of the simple-chord count by inclusion-exclusion over chord positions."""
    if n < 1:
        raise ValueError("n must be at least 1")
    total = double_factorial(2 * n - 1)
    return Pmf({m: Fraction(c, total) for m, c in _simple_chord_counts(n).items()})


def simple_chord_free_count(n: int) -> int:
    """Number of size-``n`` diagrams without a simple chord."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _simple_chord_counts(n).get(0, 0)


def scfree_bounds(n: int) -> tuple:
    """Lower and upper bounds on ``s(n) / (2n-1)!!``: ``(exp(-1/(2n-1)) -/+ 10/n) / e``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    centre = math.exp(-1.0 / (2 * n - 1))
    return (centre - 10.0 / n) / math.e, (centre + 10.0 / n) / math.e
