"""Size-bias couplings for the crossing and simple-chord counts.

Both couplings follow the same recipe: for a sum of 0/1 indicators, pick an
index ``I`` with probability proportional to its mean, then modify the
diagram minimally so that indicator ``I`` is switched on while the rest of
the diagram keeps the conditional law given that event.  The crossing count
of the modified diagram then has the size-bias law of the original count.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from steinlab.diagram import (
    ChordDiagram,
    DiagramError,
    RngLike,
    _as_generator,
    enumerate_all,
    num_diagrams,
)
from steinlab.pmf import Pmf
from steinlab.statistics import (
    count_crossings_fast,
    count_simple_chords,
    crossings_batch,
)


_CHUNK = 8192


class ZeroMean(ValueError):
    pass


class Quadruple(NamedTuple):
    """Four 1-based points ``a < b < c < d``."""

    a: int
    b: int
    c: int
    d: int

    def check(self, size: int) -> "Quadruple":
        if not (1 <= self.a < self.b < self.c < self.d <= size):
            raise ValueError(f"{tuple(self)} is not a strictly increasing quadruple in [1, {size}]")
        return self


def quadruples(n: int) -> list:
    """All ``C(2n, 4)`` quadruples in colexicographic order."""
    quads = [Quadruple(*q) for q in combinations(range(1, 2 * n + 1), 4)]
    quads.sort(key=lambda q: (q.d, q.c, q.b, q.a))
    return quads


@dataclass(frozen=True)
class CouplingOutcome:
    original: ChordDiagram
    coupled: ChordDiagram
    index: Union[Quadruple, int]
    stat_before: int
    stat_after: int

    @property
    def delta(self) -> int:
        return self.stat_after - self.stat_before


def size_bias_pmf(p: Pmf) -> Pmf:
    """The law ``P(X^s = x) = x P(X = x) / E X``."""
    mu = p.mean()
    if mu == 0:
        raise ZeroMean("size-bias law needs a strictly positive mean")
    return Pmf({k: k * w / mu for k, w in p.items() if k})


def _rematch_crossing(partner: list, quad: Quadruple, rematch_pairs: bool = True) -> list:
    a, b, c, d = (x - 1 for x in quad)
    old = [partner[a], partner[b], partner[c], partner[d]]
    inside = {a, b, c, d}
    out = list(partner)
    out[a], out[c] = c, a
    out[b], out[d] = d, b
    loose = [p for p in old if p not in inside]
    if len(loose) == 4:
        # the partners of a,c and of b,d are joined
        pa, pb, pc, pd = loose
        out[pa], out[pc] = pc, pa
        out[pb], out[pd] = pd, pb
    elif len(loose) == 2 and rematch_pairs:
        u, v = loose
        out[u], out[v] = v, u
    return out


def couple_crossings(d: ChordDiagram, quad, *, _rematch_pairs: bool = True) -> CouplingOutcome:
    """Force a crossing at ``quad = (a, b, c, d)``.

    If ``(a, c)`` and ``(b, d)`` are already chords the diagram is returned
    unchanged.  Otherwise every chord touching ``{a, b, c, d}`` is removed,
    ``(a, c)`` and ``(b, d)`` are added, and the now unmatched outside points
    are rejoined: with four of them, ``(pi(a), pi(c))`` and ``(pi(b), pi(d))``;
    with two, the single chord between them.
    """
    quad = Quadruple(*quad).check(d.size)
    before = count_crossings_fast(d)
    if d.has_chord(quad.a, quad.c) and d.has_chord(quad.b, quad.d):
        return CouplingOutcome(d, d, quad, before, before)
    coupled = ChordDiagram(tuple(_rematch_crossing(d.partner, quad, _rematch_pairs)))
    return CouplingOutcome(d, coupled, quad, before, count_crossings_fast(coupled))


def couple_simple(d: ChordDiagram, i: int) -> CouplingOutcome:
    """Force the simple chord ``(i, i+1)`` (positions mod 2n, 1-based).

    Otherwise the chords ``(i, pi(i))`` and ``(i+1, pi(i+1))`` are replaced by
    ``(i, i+1)`` and ``(pi(i), pi(i+1))``.
    """
    size = d.size
    x = (i - 1) % size
    y = (x + 1) % size
    before = count_simple_chords(d)
    if d.partner[x] == y:
        return CouplingOutcome(d, d, x + 1, before, before)
    px, py = d.partner[x], d.partner[y]
    out = list(d.partner)
    out[x], out[y] = y, x
    out[px], out[py] = py, px
    coupled = ChordDiagram(tuple(out))
    return CouplingOutcome(d, coupled, x + 1, before, count_simple_chords(coupled))


def couple_crossings_batch(partners: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """Vectorised :func:`couple_crossings` on 0-based partner rows.

    ``quads`` is either one 0-based quadruple (shape ``(4,)``) applied to all
    rows or one per row (shape ``(m, 4)``).  Returns new partner rows.
    """
    partners = np.asarray(partners)
    m = partners.shape[0]
    quads = np.broadcast_to(np.asarray(quads, dtype=np.int64), (m, 4))
    rows = np.arange(m)
    a, b, c, d = quads.T
    old = np.stack([partners[rows, a], partners[rows, b], partners[rows, c], partners[rows, d]], axis=1)
    already = (old[:, 0] == c) & (old[:, 1] == d)
    inside = (old[:, :, None] == quads[:, None, :]).any(axis=2)
    n_loose = (~inside).sum(axis=1)

    out = partners.copy()
    out[rows, a], out[rows, c] = c, a
    out[rows, b], out[rows, d] = d, b

    four = np.flatnonzero((n_loose == 4) & ~already)
    if four.size:
        pa, pb, pc, pd = old[four].T
        out[four, pa], out[four, pc] = pc, pa
        out[four, pb], out[four, pd] = pd, pb
    two = np.flatnonzero(n_loose == 2)
    if two.size:
        # the two outside partners, kept in (a, b, c, d) order
        order = np.argsort(inside[two], axis=1, kind="stable")[:, :2]
        uv = np.take_along_axis(old[two], order, axis=1)
        u, v = uv[:, 0], uv[:, 1]
        out[two, u], out[two, v] = v, u
    out[already] = partners[already]
    return out


def couple_simple_batch(partners: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Vectorised :func:`couple_simple` with 0-based positions."""
    partners = np.asarray(partners)
    m, size = partners.shape
    rows = np.arange(m)
    x = np.broadcast_to(np.asarray(positions, dtype=np.int64), (m,)) % size
    y = (x + 1) % size
    px, py = partners[rows, x], partners[rows, y]
    change = px != y
    out = partners.copy()
    r, x, y, px, py = rows[change], x[change], y[change], px[change], py[change]
    out[r, x], out[r, y] = y, x
    out[r, px], out[r, py] = py, px
    return out


def conditional_mean_increment(
    d: ChordDiagram,
    samples: Optional[int] = None,
    rng: Optional[RngLike] = None,
) -> Union[Fraction, float]:
    """``E[X^s - X | pi]``, the crossing increment averaged over quadruples.

    Exact (a ``Fraction``) when ``samples`` is None, otherwise the mean over
    ``samples`` uniformly drawn quadruples.
    """
    n = d.n
    if n < 2:
        raise ValueError("crossing coupling needs n >= 2")
    size = d.size
    row = d.to_array()[None, :]
    before = count_crossings_fast(d)
    if samples is None:
        quads = np.array(list(combinations(range(size), 4)), dtype=np.int64)
        total = comb(size, 4)
    else:
        if rng is None:
            raise ValueError("subsampled mode needs an rng")
        quads = _random_quadruples(_as_generator(rng), size, samples)
        total = samples
    after = 0
    for start in range(0, len(quads), _CHUNK):
        chunk = quads[start:start + _CHUNK]
        coupled = couple_crossings_batch(np.repeat(row, len(chunk), axis=0), chunk)
        after += int(crossings_batch(coupled).sum())
    delta_sum = after - before * total
    if samples is None:
        return Fraction(delta_sum, total)
    return delta_sum / total


def _random_quadruples(gen: np.random.Generator, size: int, m: int) -> np.ndarray:
    """``m`` uniform 4-subsets of ``range(size)``, each sorted ascending."""
    keys = gen.random((m, size))
    return np.sort(np.argpartition(keys, 4, axis=1)[:, :4], axis=1)


@dataclass
class VerificationReport:
    n: int
    statistic: str
    coupled_law: Optional[Pmf]
    size_bias_law: Pmf
    per_point: dict
    match: bool
    message: str = ""


def verify_size_bias_exact(
    n: int,
    statistic: str = "crossings",
    coupler: Optional[Callable] = None,
) -> VerificationReport:
    """Compare the exact law of the coupled statistic with the size-bias law.

    The coupled law enumerates every (diagram, index) pair with weight
    ``1/((2n-1)!! * #indices)``; the reference applies :func:`size_bias_pmf`
    to the histogram of the statistic over all diagrams.  A coupling that
    produces an invalid diagram fails the check.
    """
    if statistic == "crossings":
        if n < 2:
            raise ZeroMean("no crossings possible for n < 2")
        stat = count_crossings_fast
        coupler = coupler or couple_crossings
        indices = quadruples(n)
    elif statistic == "simple_chords":
        stat = count_simple_chords
        coupler = coupler or couple_simple
        indices = list(range(1, 2 * n + 1))
    else:
        raise ValueError(f"unknown statistic {statistic!r}")

    diagrams = list(enumerate_all(n))
    base = Pmf.from_values(stat(d) for d in diagrams)
    target = size_bias_pmf(base)
    counts = Counter()
    try:
        for d in diagrams:
            for idx in indices:
                counts[coupler(d, idx).stat_after] += 1
    except DiagramError as exc:
        per_point = {k: (None, w) for k, w in target.items()}
        return VerificationReport(n, statistic, None, target, per_point, False,
                                  f"coupling produced an invalid diagram: {exc}")
    assert sum(counts.values()) == num_diagrams(n) * len(indices)
    coupled = Pmf.from_counts(counts)
    support = sorted(set(coupled.support) | set(target.support))
    per_point = {k: (coupled[k], target[k]) for k in support}
    match = coupled == target
    msg = "coupled law equals size-bias law" if match else "laws differ at " + ", ".join(
        str(k) for k in support if coupled[k] != target[k])
    return VerificationReport(n, statistic, coupled, target, per_point, match, msg)
