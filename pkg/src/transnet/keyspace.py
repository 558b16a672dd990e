"""Key-assignment schemes and multi-dimensional point placement.

Scheme A reads a permutation as a base ``n + 1`` number; scheme B gives
each permutation a block of ``K`` keys ordered by lexicographic rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, floor
from numbers import Rational
from typing import Sequence

from .permutation import (
    PermutationId,
    check_arity,
    inverse_value_base,
    rank_lehmer,
    unrank_lehmer,
    value_base,
)


class UnsupportedOperation(Exception):
    """Raised when an operation is not defined for the configured scheme."""


@dataclass(frozen=True)
class SchemeConfig:
    variant: str = "B"
    n: int = 7
    K: int = 1

    def __post_init__(self):
        if self.variant not in ("A", "B"):
            raise ValueError(f"variant must be 'A' or 'B', got {self.variant!r}")
        check_arity(self.n)
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.variant == "A" and self.K != 1:
            raise ValueError("K only applies to scheme B")

    @property
    def size(self) -> int:
        """Number of keys in the key space."""
        if self.variant == "A":
            return (self.n + 1) ** self.n
        return factorial(self.n) * self.K


def bounds(scheme: SchemeConfig) -> tuple[int, int]:
    return 0, scheme.size - 1


def _check_key(scheme: SchemeConfig, k: int) -> None:
    if not 0 <= k < scheme.size:
        raise ValueError(f"key {k} outside [0, {scheme.size - 1}]")


def valuation(scheme: SchemeConfig, p: PermutationId) -> int:
    """Order-defining value of ``p``: positional value (A) or rank (B)."""
    return value_base(p) if scheme.variant == "A" else rank_lehmer(p)


def node_key(scheme: SchemeConfig, p: PermutationId) -> int:
    """Ring position of the node whose identifier is ``p``.

    Under scheme B the node sits at the top of its K-block so that its
    responsible interval ``(predecessor, key]`` is exactly that block when
    all ``n!`` nodes are present.
    """
    if p.n != scheme.n:
        raise ValueError(f"arity mismatch: permutation has {p.n}, scheme has {scheme.n}")
    if scheme.variant == "A":
        return value_base(p)
    return rank_lehmer(p) * scheme.K - 1


def owner(scheme: SchemeConfig, k: int) -> PermutationId:
    """Identifier that would own ``k`` if every permutation were a live node."""
    _check_key(scheme, k)
    if scheme.variant == "A":
        return inverse_value_base(k, scheme.n)
    return unrank_lehmer(k // scheme.K + 1, scheme.n)


def perfect_load(scheme: SchemeConfig, count: int) -> Fraction:
    """Ideal spacing between adjacent valuations of ``count`` sampled ids."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if scheme.variant == "A":
        return Fraction((scheme.n + 1) ** scheme.n, count)
    return Fraction(factorial(scheme.n), count)


@dataclass(frozen=True)
class DataPoint:
    """An n-dimensional record with every coordinate in ``[lo, hi]``."""

    coords: tuple
    lo: Rational = 0
    hi: Rational = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.lo < self.hi:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")
        for x in self.coords:
            if not self.lo <= x <= self.hi:
                raise ValueError(f"coordinate {x} outside [{self.lo}, {self.hi}]")

    def inside(self, low: "DataPoint", high: "DataPoint") -> bool:
        return all(a <= x <= b for a, x, b in zip(low.coords, self.coords, high.coords))


def normalize_point(x: DataPoint) -> tuple[int, ...]:
    """Min-max scale each coordinate onto the digits 1..n (repeats allowed)."""
    n = len(x.coords)
    span = Fraction(x.hi) - Fraction(x.lo)
    if span == 0:
        raise ValueError("degenerate domain")
    return tuple(
        floor((Fraction(c) - Fraction(x.lo)) / span * (n - 1)) + 1 for c in x.coords
    )


def point_key(scheme: SchemeConfig, y: Sequence[int]) -> int:
    """Key of a normalized digit vector; the point lands on the node with the
    smallest identifier value at or above it."""
    if scheme.variant != "A":
        raise UnsupportedOperation(
            "multi-dimensional placement needs scheme A: Lehmer ranks are "
            "undefined for digit vectors with repeated symbols"
        )
    n = scheme.n
    if len(y) != n:
        raise ValueError(f"expected {n} digits, got {len(y)}")
    v = 0
    for d in y:
        if not 1 <= d <= n:
            raise ValueError(f"digit {d} outside 1..{n}")
        v = v * (n + 1) + d
    return v
