"""Chord diagrams: representation, validation, uniform sampling and enumeration.

Points are numbered ``1..2n`` in clockwise order around the circle.  A diagram
is stored as a tuple ``partner`` of 0-based indices so that ``partner[i]`` is
the point matched to point ``i + 1`` (minus one).  All public methods speak
1-based points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

import numpy as np


class DiagramError(ValueError):
    """Base class for invalid chord diagram input."""


class DuplicateEndpoint(DiagramError):
    pass


class IncompleteMatching(DiagramError):
    pass


class SelfLoop(DiagramError):
    pass


class OutOfRange(DiagramError):
    pass


def double_factorial(m: int) -> int:
    """Return m!! for m >= -1 (with (-1)!! = 0!! = 1)."""
    if m < -1:
        raise ValueError("double factorial undefined below -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def num_diagrams(n: int) -> int:
    return double_factorial(2 * n - 1)


@dataclass(frozen=True)
class Rng:
    """Reproducible random stream identified by ``(seed, stream)``.

    Backed by numpy's PCG64 seeded with ``SeedSequence(seed, spawn_key=(stream,))``,
    so distinct streams of one seed are statistically independent.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream < 0:
            raise ValueError("stream must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


RngLike = Union[Rng, np.random.Generator]


def _as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, Rng):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class ChordDiagram:
    """A fixed-point-free involution on ``[2n]``.

    Construct with :func:`from_pairs`, :meth:`from_partner` or one of the
    samplers; the constructor validates the involution invariants.
    """

    partner: tuple

    def __post_init__(self):
        _validate_partner(self.partner)

    @classmethod
    def from_partner(cls, partner: Sequence[int], one_based: bool = False) -> "ChordDiagram":
        if one_based:
            return cls(tuple(int(p) - 1 for p in partner))
        return cls(tuple(int(p) for p in partner))

    @property
    def n(self) -> int:
        return len(self.partner) // 2

    @property
    def size(self) -> int:
        """Number of points, 2n."""
        return len(self.partner)

    def partner_of(self, point: int) -> int:
        """Partner of a 1-based point."""
        return self.partner[point - 1] + 1

    def pairs(self) -> list:
        """Chords as sorted 1-based ``(low, high)`` tuples, ordered by ``low``."""
        return [(i + 1, p + 1) for i, p in enumerate(self.partner) if i < p]

    def has_chord(self, x: int, y: int) -> bool:
        return self.partner[x - 1] == y - 1

    def to_array(self) -> np.ndarray:
        return np.asarray(self.partner, dtype=np.int64)

    def cycle_notation(self) -> str:
        return "".join(f"({a} {b})" for a, b in self.pairs())

    def __repr__(self):
        return f"ChordDiagram({self.cycle_notation()})"


def _validate_partner(partner: Sequence[int]) -> None:
    size = len(partner)
    if size == 0 or size % 2:
        raise IncompleteMatching(f"need a positive even number of points, got {size}")
    for i, p in enumerate(partner):
        if not 0 <= p < size:
            raise OutOfRange(f"point {i + 1} matched to {p + 1}, outside [1, {size}]")
        if p == i:
            raise SelfLoop(f"point {i + 1} matched to itself")
        if partner[p] != i:
            raise DuplicateEndpoint(
                f"partner is not an involution at point {i + 1} -> {p + 1} -> {partner[p] + 1}"
            )


def from_pairs(pairs: Iterable[Sequence[int]]) -> ChordDiagram:
    """Build a diagram from 1-based chords; the points used must be exactly ``[2n]``."""
    pairs = [tuple(int(x) for x in pair) for pair in pairs]
    if not pairs:
        raise IncompleteMatching("no chords given")
    size = 2 * len(pairs)
    partner = [-1] * size
    for pair in pairs:
        if len(pair) != 2:
            raise DiagramError(f"chord {pair!r} does not have two endpoints")
        x, y = pair
        if x == y:
            raise SelfLoop(f"chord ({x},{y}) joins a point to itself")
        for z in (x, y):
            if not 1 <= z <= size:
                raise OutOfRange(f"point {z} outside [1, {size}] for {len(pairs)} chords")
            if partner[z - 1] != -1:
                raise DuplicateEndpoint(f"point {z} appears in more than one chord")
        partner[x - 1] = y - 1
        partner[y - 1] = x - 1
    # With |pairs| = n and no repeats every point is hit; kept as a guard.
    missing = [i + 1 for i, p in enumerate(partner) if p == -1]
    if missing:
        raise IncompleteMatching(f"points {missing} are unmatched")
    return ChordDiagram(tuple(partner))


def sample_partners(n: int, m: int, rng: RngLike) -> np.ndarray:
    """Draw ``m`` uniform diagrams of size ``n`` as an ``(m, 2n)`` 0-based partner array.

    Each step matches the least unmatched point to a uniformly chosen other
    unmatched point; after ``n`` steps every diagram has probability
    ``1/(2n-1)!!``.  Rows are drawn in lockstep, one ``integers`` call per step.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    gen = _as_generator(rng)
    size = 2 * n
    rows = np.arange(m)
    remaining = np.tile(np.arange(size, dtype=np.int64), (m, 1))
    partner = np.empty((m, size), dtype=np.int64)
    for step in range(n):
        k = size - 2 * step
        first = remaining[:, 0]
        j = gen.integers(1, k, size=m)
        other = remaining[rows, j]
        partner[rows, first] = other
        partner[rows, other] = first
        keep = np.ones((m, k), dtype=bool)
        keep[:, 0] = False
        keep[rows, j] = False
        remaining = remaining[keep].reshape(m, k - 2)
    return partner


def sample_uniform(n: int, rng: RngLike) -> ChordDiagram:
    """A single uniform diagram; identical ``Rng(seed, stream)`` gives an identical diagram."""
    return ChordDiagram(tuple(int(p) for p in sample_partners(n, 1, rng)[0]))


def _enumerate(partner: list, free: list) -> Iterator[tuple]:
    if not free:
        yield tuple(partner)
        return
    first = free[0]
    for idx in range(1, len(free)):
        other = free[idx]
        partner[first] = other
        partner[other] = first
        yield from _enumerate(partner, free[1:idx] + free[idx + 1:])
    partner[first] = -1


def enumerate_all(n: int) -> Iterator[ChordDiagram]:
    """Yield all ``(2n-1)!!`` diagrams of size ``n``.

    Order: the least unmatched point is matched to each candidate in
    increasing order, then the rest is enumerated recursively.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    for partner in _enumerate([-1] * (2 * n), list(range(2 * n))):
        yield ChordDiagram(partner)


@lru_cache(maxsize=8)
def all_partners(n: int) -> np.ndarray:
    """All diagrams of size ``n`` as a read-only ``((2n-1)!!, 2n)`` array, in enumeration order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    arr = np.array(list(_enumerate([-1] * (2 * n), list(range(2 * n)))), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def chord_set_probability(n: int, k: int) -> Fraction:
    """Probability that a uniform diagram of size ``n`` contains ``k`` given disjoint chords."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return Fraction(double_factorial(2 * n - 2 * k - 1), double_factorial(2 * n - 1))
