"""Exact probability mass functions on the non-negative integers."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


@dataclass(frozen=True, eq=False)
class Pmf:
    """A law on the non-negative integers with exact rational weights.

    Zero weights are dropped; the remaining weights must be positive and sum
    to exactly one.
    """

    weights: Mapping[int, Fraction]

    def __post_init__(self):
        clean = {}
        for k, w in self.weights.items():
            if int(k) != k or k < 0:
                raise ValueError(f"support point {k!r} is not a non-negative integer")
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative weight {w} at {k}")
            if w:
                clean[int(k)] = w
        if sum(clean.values()) != 1:
            raise ValueError(f"weights sum to {sum(clean.values())}, not 1")
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "Pmf":
        total = sum(counts.values())
        return cls({k: Fraction(c, total) for k, c in counts.items()})

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "Pmf":
        return cls.from_counts(Counter(values))

    @classmethod
    def point_mass(cls, k: int) -> "Pmf":
        return cls({k: Fraction(1)})

    @property
    def support(self) -> list:
        return list(self.weights)

    def __getitem__(self, k: int) -> Fraction:
        return self.weights.get(k, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Pmf):
            return NotImplemented
        return self.weights == other.weights

    def __repr__(self):
        body = ", ".join(f"{k}: {w}" for k, w in self.weights.items())
        return f"Pmf({{{body}}})"

    def items(self):
        return self.weights.items()

    def mean(self) -> Fraction:
        return sum((k * w for k, w in self.weights.items()), Fraction(0))

    def moment(self, r: int) -> Fraction:
        return sum((k**r * w for k, w in self.weights.items()), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return self.moment(2) - mu * mu

    def cdf_points(self) -> list:
        """``[(x, F(x^-), F(x))]`` for each support point in ascending order."""
        out, acc = [], Fraction(0)
        for k, w in self.weights.items():
            out.append((k, acc, acc + w))
            acc += w
        return out

    def shift(self, c: int) -> "Pmf":
        return Pmf({k + c: w for k, w in self.weights.items()})
