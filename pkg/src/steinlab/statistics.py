"""Statistics of a chord diagram: crossings, nestings, simple chords, lengths, components."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from steinlab.diagram import ChordDiagram


class FenwickTree:
    """Binary indexed tree over positions ``1..size`` holding integer counts."""

    def __init__(self, size: int):
        self.size = size
        self._tree = [0] * (size + 1)

    def add(self, index: int, value: int = 1) -> None:
        while index <= self.size:
            self._tree[index] += value
            index += index & -index

    def prefix_sum(self, index: int) -> int:
        """Sum of positions ``1..index`` (0 when ``index <= 0``)."""
        total = 0
        while index > 0:
            total += self._tree[index]
            index -= index & -index
        return total

    def range_sum(self, lo: int, hi: int) -> int:
        """Sum of positions ``lo..hi`` inclusive."""
        if hi < lo:
            return 0
        return self.prefix_sum(hi) - self.prefix_sum(lo - 1)


def _chord_arrays(d: ChordDiagram):
    partner = d.to_array()
    lo = np.flatnonzero(partner > np.arange(partner.size))
    return lo, partner[lo]


def count_crossings_naive(d: ChordDiagram) -> int:
    """Count chord pairs ``(a,c), (b,d)`` with ``a < b < c < d`` by checking every pair."""
    lo, hi = _chord_arrays(d)
    # lo is ascending, so for i < j only lo_j < hi_i < hi_j needs checking
    cross = (lo[None, :] < hi[:, None]) & (hi[:, None] < hi[None, :])
    return int(np.triu(cross, k=1).sum())


def count_crossings_fast(d: ChordDiagram) -> int:
    """Sweep the linearized diagram, counting open chords that started inside each closing chord.

    When chord ``(q, p)`` closes at ``p``, every chord still open whose left
    end lies in ``(q, p)`` crosses it.  O(n log n).
    """
    tree = FenwickTree(d.size)
    total = 0
    for i, p in enumerate(d.partner):
        pos = i + 1
        if p > i:
            tree.add(pos, 1)
        else:
            q = p + 1
            tree.add(q, -1)
            total += tree.range_sum(q + 1, pos - 1)
    return total


def count_crossings_nestings(d: ChordDiagram) -> tuple:
    """``(crossings, nestings)`` by pair scan."""
    lo, hi = _chord_arrays(d)
    later_starts_inside = lo[None, :] < hi[:, None]
    upper = np.triu(np.ones((lo.size, lo.size), dtype=bool), k=1)
    cross = later_starts_inside & (hi[:, None] < hi[None, :]) & upper
    nest = later_starts_inside & (hi[None, :] < hi[:, None]) & upper
    return int(cross.sum()), int(nest.sum())


def count_nestings(d: ChordDiagram) -> int:
    """Count chord pairs ``(i,l), (j,k)`` with ``i < j < k < l``."""
    return count_crossings_nestings(d)[1]


def count_length_j(d: ChordDiagram, j: int) -> int:
    """Number of positions ``i`` in ``[2n]`` with ``partner(i) = i + j + 1 (mod 2n)``.

    Valid for ``0 <= j <= n - 2``, plus ``j = 0`` when ``n = 1``.
    """
    n = d.n
    if j < 0 or (j > n - 2 and not (j == 0 and n == 1)):
        raise ValueError(f"chord length j={j} outside [0, {max(n - 2, 0)}] for n={n}")
    size = d.size
    return sum(1 for i, p in enumerate(d.partner) if p == (i + j + 1) % size)


def count_simple_chords(d: ChordDiagram) -> int:
    """Number of positions ``i`` with ``partner(i) = i + 1 (mod 2n)``.

    By this indicator definition the single chord of the ``n = 1`` diagram
    is counted twice.
    """
    return count_length_j(d, 0)


def count_components(d: ChordDiagram) -> int:
    """Connected components of the chord intersection graph (chords adjacent iff they cross)."""
    lo, hi = _chord_arrays(d)
    n = lo.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cross = np.triu((lo[None, :] < hi[:, None]) & (hi[:, None] < hi[None, :]), k=1)
    components = n
    for a, b in zip(*np.nonzero(cross)):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[ra] = rb
            components -= 1
    return components


@dataclass(frozen=True)
class DiagramStats:
    crossings: int
    nestings: int
    simple_chords: int
    components: int
    length_counts: dict = field(default_factory=dict)


def diagram_stats(d: ChordDiagram) -> DiagramStats:
    crossings, nestings = count_crossings_nestings(d)
    lengths = {j: count_length_j(d, j) for j in range(max(d.n - 1, 1))}
    return DiagramStats(
        crossings=crossings,
        nestings=nestings,
        simple_chords=count_simple_chords(d),
        components=count_components(d),
        length_counts=lengths,
    )


def crossing_mean_variance(n: int) -> tuple:
    """Exact mean ``n(n-1)/6`` and variance ``n(n-1)(n+3)/45`` of the crossing count."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(n * (n - 1), 6), Fraction(n * (n - 1) * (n + 3), 45)


def crossings_batch(partners: np.ndarray) -> np.ndarray:
    """Crossing counts for every row of an ``(m, 2n)`` 0-based partner array."""
    partners = np.asarray(partners)
    m, size = partners.shape
    n = size // 2
    opens = partners > np.arange(size)
    lo = np.nonzero(opens)[1].reshape(m, n)
    hi = np.take_along_axis(partners, lo, axis=1)
    cross = (lo[:, None, :] < hi[:, :, None]) & (hi[:, :, None] < hi[:, None, :])
    cross &= np.triu(np.ones((n, n), dtype=bool), k=1)
    return cross.sum(axis=(1, 2))


def simple_chords_batch(partners: np.ndarray) -> np.ndarray:
    partners = np.asarray(partners)
    size = partners.shape[1]
    nxt = (np.arange(size) + 1) % size
    return (partners == nxt).sum(axis=1)
