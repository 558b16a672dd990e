"""Permutation identifiers and the full-transposition generator set.

Symbols and positions are 1-based throughout the public API.
"""

from __future__ import annotations

import random
from functools import lru_cache
from math import factorial
from typing import Iterable, NamedTuple

MIN_ARITY = 3
MAX_ARITY = 25  # (n + 1) ** n must stay below 2 ** 128


def check_arity(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"arity must be an int, got {type(n).__name__}")
    if not MIN_ARITY <= n <= MAX_ARITY:
        raise ValueError(f"arity must be in [{MIN_ARITY}, {MAX_ARITY}], got {n}")
    return n


class PermutationId(tuple):
    """An arrangement of the symbols 1..n.

    Tuple ordering is lexicographic, which is the ring order used by both
    key-assignment schemes.

    >>> PermutationId((3, 1, 2)).n
    3
    """

    __slots__ = ()

    def __new__(cls, symbols: Iterable[int]) -> "PermutationId":
        symbols = tuple(symbols)
        n = check_arity(len(symbols))
        if sorted(symbols) != list(range(1, n + 1)):
            raise ValueError(f"{symbols!r} is not a permutation of 1..{n}")
        return tuple.__new__(cls, symbols)

    @classmethod
    def _trusted(cls, symbols: Iterable[int]) -> "PermutationId":
        # Internal fast path: caller guarantees validity.
        return tuple.__new__(cls, symbols)

    @classmethod
    def parse(cls, text: str) -> "PermutationId":
        """Parse ``"365241"`` (n < 10) or ``"3,6,5,2,4,1"``."""
        text = text.strip()
        if "," in text:
            return cls(int(s) for s in text.split(","))
        return cls(int(c) for c in text)

    @classmethod
    def identity(cls, n: int) -> "PermutationId":
        return cls._trusted(range(1, check_arity(n) + 1))

    @property
    def n(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"PermutationId({tuple(self)!r})"

    def __str__(self) -> str:
        if self.n < 10:
            return "".join(map(str, self))
        return ",".join(map(str, self))


class Transposition(NamedTuple):
    """Exchange of the symbols at 1-based positions ``i < j``."""

    i: int
    j: int

    @classmethod
    def of(cls, i: int, j: int) -> "Transposition":
        if i == j:
            raise ValueError("a transposition needs two distinct positions")
        if i > j:
            i, j = j, i
        if i < 1:
            raise ValueError(f"positions are 1-based, got {i}")
        return cls(i, j)


def transpose(p: PermutationId, t: Transposition) -> PermutationId:
    """Return ``p`` with the symbols at positions ``t.i`` and ``t.j`` swapped."""
    i, j = t
    if not (1 <= i <= p.n and 1 <= j <= p.n) or i == j:
        raise ValueError(f"{t} is not a valid transposition for arity {p.n}")
    s = list(p)
    s[i - 1], s[j - 1] = s[j - 1], s[i - 1]
    return PermutationId._trusted(s)


@lru_cache(maxsize=None)
def generator_set(n: int) -> tuple[Transposition, ...]:
    """All ``n(n-1)/2`` transpositions in row-major ``(i, j)`` order."""
    check_arity(n)
    return tuple(
        Transposition(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
    )


def value_base(p: PermutationId) -> int:
    """Read the symbols as the digits of a base ``n + 1`` number."""
    base = p.n + 1
    v = 0
    for d in p:
        v = v * base + d
    return v


def _digits(k: int, n: int) -> list[int]:
    base = n + 1
    out = [0] * n
    for pos in range(n - 1, -1, -1):
        k, out[pos] = divmod(k, base)
    return out


def inverse_value_base(k: int, n: int) -> PermutationId:
    """Smallest permutation whose :func:`value_base` is ``>= k``.

    Keys above the largest permutation value wrap around to the identity.
    """
    check_arity(n)
    if not 0 <= k < (n + 1) ** n:
        raise ValueError(f"key {k} outside [0, {(n + 1) ** n - 1}]")
    d = _digits(k, n)

    # Longest prefix of d that can still be the start of a permutation.
    used = [False] * (n + 2)
    prefix = 0
    while prefix < n and 1 <= d[prefix] <= n and not used[d[prefix]]:
        used[d[prefix]] = True
        prefix += 1
    if prefix == n:
        return PermutationId._trusted(d)

    # Backtrack: keep d[:i], put the smallest unused symbol > d[i] at i,
    # fill the rest ascending. The deepest feasible i gives the minimum.
    for i in range(prefix, -1, -1):
        if i < prefix:
            used[d[i]] = False
        bigger = [s for s in range(d[i] + 1, n + 1) if not used[s]]
        if bigger:
            head = d[:i] + [bigger[0]]
            rest = sorted(set(range(1, n + 1)) - set(head))
            return PermutationId._trusted(head + rest)
    return PermutationId.identity(n)


def lehmer_code(p: PermutationId) -> list[int]:
    """Count of smaller symbols to the right of each position."""
    return [sum(1 for y in p[i + 1:] if y < x) for i, x in enumerate(p)]


def rank_lehmer(p: PermutationId) -> int:
    """1-based lexicographic rank of ``p`` among all ``n!`` permutations."""
    n = p.n
    r = 0
    for i, w in enumerate(lehmer_code(p)):
        r += w * factorial(n - 1 - i)
    return r + 1


def unrank_lehmer(r: int, n: int) -> PermutationId:
    """Inverse of :func:`rank_lehmer`."""
    check_arity(n)
    if not 1 <= r <= factorial(n):
        raise ValueError(f"rank {r} outside [1, {n}!]")
    r -= 1
    pool = list(range(1, n + 1))
    out = []
    for i in range(n - 1, -1, -1):
        w, r = divmod(r, factorial(i))
        out.append(pool.pop(w))
    return PermutationId._trusted(out)


def random_permutation(n: int, rng: random.Random) -> PermutationId:
    """Uniform draw via a swap-down shuffle; deterministic for a seeded ``rng``."""
    s = list(range(1, check_arity(n) + 1))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        s[i], s[j] = s[j], s[i]
    return PermutationId._trusted(s)


def matching_prefix_length(p: PermutationId, q: PermutationId) -> int:
    if p.n != q.n:
        raise ValueError(f"arity mismatch: {p.n} vs {q.n}")
    k = 0
    for a, b in zip(p, q):
        if a != b:
            break
        k += 1
    return k
