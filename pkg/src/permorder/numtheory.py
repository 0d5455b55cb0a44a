"""Exact arithmetic-function layer.

Factorizations, divisor lattices with an lcm composition table, lcms of
initial ranges, the order-forcing k set, and Landau's function. Everything
is exact integer arithmetic; floats never appear here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "FactoredInt",
    "DivisorLattice",
    "ForcingSet",
    "factorize",
    "divisors_of",
    "divisors_up_to",
    "tau",
    "sigma",
    "omega",
    "lcm_range",
    "compute_forcing_set",
    "landau_g",
    "primes_up_to",
]


@dataclass(frozen=True)
class FactoredInt:
    """A natural number >= 1 together with its prime factorization.

    ``factors`` is a tuple of (prime, exponent) pairs with strictly
    increasing primes and exponents >= 1; the empty tuple encodes 1.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError(f"need a positive integer, got {self.value}")
        prod = 1
        prev = 1
        for p, e in self.factors:
            if p <= prev or e < 1:
                raise ValueError(f"malformed factorization of {self.value}")
            prod *= p**e
            prev = p
        if prod != self.value:
            raise ValueError(f"factors do not reconstruct {self.value}")


@lru_cache(maxsize=None)
def factorize(m: int) -> FactoredInt:
    """Prime factorization by trial division (2, 3, then 6k+-1 up to sqrt)."""
    if m < 1:
        raise ValueError(f"cannot factorize {m}; need m >= 1")
    factors = []
    rem = m
    for p in (2, 3):
        if rem % p == 0:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            factors.append((p, e))
    d = 5
    while d * d <= rem:
        for p in (d, d + 2):
            if rem % p == 0:
                e = 0
                while rem % p == 0:
                    rem //= p
                    e += 1
                factors.append((p, e))
        d += 6
    if rem > 1:
        factors.append((rem, 1))
    return FactoredInt(m, tuple(factors))


def tau(f: FactoredInt) -> int:
    """Number of divisors."""
    out = 1
    for _, e in f.factors:
        out *= e + 1
    return out


def sigma(f: FactoredInt) -> int:
    """Sum of divisors."""
    out = 1
    for p, e in f.factors:
        out *= (p ** (e + 1) - 1) // (p - 1)
    return out


def omega(f: FactoredInt) -> int:
    """Number of distinct prime factors."""
    return len(f.factors)


class DivisorLattice:
    """All divisors of m, sorted ascending, with pair composition by lcm.

    ``lcm_index[i][j]`` is the index of lcm(divisors[i], divisors[j]). The
    dense table is built lazily because only the order-counting DP needs it;
    plain divisor queries should stay linear in tau(m).
    """

    def __init__(self, m: FactoredInt):
        self.m = m
        divs = [1]
        for p, e in m.factors:
            pk = 1
            more = []
            for _ in range(e):
                pk *= p
                more.extend(d * pk for d in divs)
            divs.extend(more)
        divs.sort()
        self.divisors: tuple[int, ...] = tuple(divs)
        self._pos = {d: i for i, d in enumerate(divs)}
        self._lcm_index: tuple[tuple[int, ...], ...] | None = None

    def index_of(self, d: int) -> int:
        return self._pos[d]

    @property
    def lcm_index(self) -> tuple[tuple[int, ...], ...]:
        if self._lcm_index is None:
            self._lcm_index = self._build_lcm_index()
        return self._lcm_index

    def _build_lcm_index(self) -> tuple[tuple[int, ...], ...]:
        primes = [p for p, _ in self.m.factors]
        vecs = []
        for d in self.divisors:
            v = []
            for p in primes:
                a = 0
                while d % p == 0:
                    d //= p
                    a += 1
                v.append(a)
            vecs.append(v)
        pos = self._pos
        table = []
        for vi in vecs:
            row = []
            for vj in vecs:
                val = 1
                for p, a, b in zip(primes, vi, vj):
                    val *= p ** (a if a >= b else b)
                row.append(pos[val])
            table.append(tuple(row))
        return tuple(table)

    def __repr__(self) -> str:  # pragma: no cover
        return f"DivisorLattice(m={self.m.value}, tau={len(self.divisors)})"


def divisors_of(f: FactoredInt) -> DivisorLattice:
    return DivisorLattice(f)


def divisors_up_to(factors: tuple[tuple[int, int], ...], bound: int) -> list[int]:
    """Sorted divisors of the factored number that are <= bound.

    Safe to filter while building: every divisor's partial products are
    themselves divisors no larger than the final value.
    """
    divs = [1] if bound >= 1 else []
    for p, e in factors:
        pk = 1
        more = []
        for _ in range(e):
            pk *= p
            if pk > bound:
                break
            more.extend(d * pk for d in divs if d * pk <= bound)
        divs.extend(more)
    divs.sort()
    return divs


@lru_cache(maxsize=None)
def lcm_range(k: int) -> int:
    """lcm(1..k); the empty range (k <= 1) gives 1."""
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    if k <= 1:
        return 1
    return math.lcm(lcm_range(k - 1), k)


@dataclass(frozen=True)
class ForcingSet:
    """k values for which an (n-k)-cycle pins the order of the permutation.

    k is a member when lcm(1..k) divides n-k: a permutation of [n]
    containing an (n-k)-cycle then has all remaining cycle lengths <= k
    dividing n-k, so its order is exactly n-k. Always contains 0 and 1 for
    n >= 2; members are ascending and max_k is the largest.
    """

    n: int
    members: tuple[int, ...]
    max_k: int


def compute_forcing_set(n: int) -> ForcingSet:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    members = []
    k = 0
    while k < n:
        ell = lcm_range(k)
        if ell > n:
            break  # lcm(1..k) only grows and cannot divide any n-k >= 1
        if (n - k) % ell == 0:
            members.append(k)
        k += 1
    return ForcingSet(n, tuple(members), members[-1])


def primes_up_to(n: int) -> list[int]:
    """Primes <= n by a plain sieve."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i, f in enumerate(flags) if f]


def landau_g(n: int) -> int:
    """Largest order of any permutation of [n] (largest lcm of a partition).

    Knapsack over prime powers: each prime p <= n contributes either nothing
    or one power p^a at additive cost p^a. best[b] is the largest product
    attainable with total cost <= b; descending budget order keeps each
    prime to a single power per pass.
    """
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    best = [1] * (n + 1)
    for p in primes_up_to(n):
        powers = []
        pk = p
        while pk <= n:
            powers.append(pk)
            pk *= p
        for budget in range(n, p - 1, -1):
            b = best[budget]
            for q in powers:
                if q > budget:
                    break
                cand = best[budget - q] * q
                if cand > b:
                    b = cand
            best[budget] = b
    return best[n]
