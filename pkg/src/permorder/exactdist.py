"""Exact distribution of the order of a uniform random permutation of [n].

The order of a permutation is the lcm of its cycle lengths.  Everything
here is exact: counts are Python ints and probabilities are Fractions
with denominator n!.  Floats appear in one place only — a slack-guarded
pre-filter inside the mode scan — and that filter can only discard
values whose permutation count is strictly below an already-known one.

Two independent exact routes are provided on purpose: a DP over the
divisor lattice of m (`order_counts_on_lattice`) and inclusion-exclusion
over prime-exponent drops (`count_order_exactly_mobius`).  They share no
intermediate results, so agreement between them is a real cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .numtheory import DivisorLattice, FactoredInt, factorize, primes_up_to

DEFAULT_MAX_N = 100
DEFAULT_MAX_SUPPORT = 5_000_000
BRUTE_FORCE_LIMIT = 9

# Relative slack for the float pre-filter in mode().  The float scan sums
# positive terms only, so its accumulated relative error stays below ~1e-7
# even with hundreds of millions of addends; 1e-6 leaves a wide margin.
# The guard is two-sided, so a borderline candidate merely costs one extra
# exact DP — it can never change the answer.
_FLOAT_SLACK = 1e-6


class BudgetExceededError(Exception):
    """A computation would exceed its configured size budget.

    Raised loudly instead of silently truncating, so the caller can
    decide whether to raise the budget or pick a cheaper route.
    """


@dataclass(frozen=True)
class OrderPmf:
    """Exact pmf of the order: ``entries[m]`` = #{pi in S_n : ord(pi) = m}."""

    n: int
    entries: dict[int, int]

    def prob(self, m: int) -> Fraction:
        return Fraction(self.entries.get(m, 0), math.factorial(self.n))


@dataclass(frozen=True)
class LatticeCountVector:
    """Permutation counts of [n] by exact order, for every order dividing m.

    ``counts`` is sparse: divisors of m realized by no permutation are
    simply absent.  ``count_for`` returns 0 for those.
    """

    n: int
    lattice: DivisorLattice
    counts: dict[int, int]

    def count_for(self, d: int) -> int:
        return self.counts.get(d, 0)


@dataclass(frozen=True)
class ModeResult:
    """The most likely order(s) of a uniform random permutation of [n].

    ``argmax`` lists every maximizer in increasing order; ties are real
    (n = 2 has two) and are never silently collapsed.
    """

    n: int
    argmax: tuple[int, ...]
    max_count: int
    max_prob: Fraction


def count_lengths_divide(n: int, f: FactoredInt) -> int:
    """Number of permutations of [n] whose cycle lengths all divide f.value.

    Classify by the cycle containing the largest remaining label: if that
    cycle has length j there are (nu-1)(nu-2)...(nu-j+1) ways to fill it,
    times the count for the nu-j leftover labels.  The falling factorial
    is extended incrementally as j walks up the divisor list.
    """
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    js = [d for d in DivisorLattice(f).divisors if d <= n]
    w = [1] + [0] * n
    for nu in range(1, n + 1):
        ff = 1
        built = 1
        acc = 0
        for j in js:
            if j > nu:
                break
            for i in range(built, j):
                ff *= nu - i
            built = j
            acc += ff * w[nu - j]
        w[nu] = acc
    return w[n]


def order_counts_on_lattice(n: int, f: FactoredInt) -> LatticeCountVector:
    """Exact-order counts for all divisors of f.value at once.

    Same cycle-peeling recursion as `count_lengths_divide`, but the state
    tracks the running lcm of the cycle lengths used so far, encoded as a
    position in the divisor lattice of f.value.  Appending a j-cycle moves
    state d to lcm(d, j), which is a table lookup.
    """
    if n < 0:
        raise ValueError(f"need n >= 0, got {n}")
    lattice = DivisorLattice(f)
    divisors = lattice.divisors
    compose = lattice.lcm_index
    js = [(j, lattice.index_of(j)) for j in divisors if j <= n]
    width = len(divisors)
    rows: list[list[int]] = [[0] * width for _ in range(n + 1)]
    rows[0][0] = 1
    for nu in range(1, n + 1):
        row = rows[nu]
        ff = 1
        built = 1
        for j, ji in js:
            if j > nu:
                break
            for i in range(built, j):
                ff *= nu - i
            built = j
            comp = compose[ji]
            for di, b in enumerate(rows[nu - j]):
                if b:
                    row[comp[di]] += ff * b
    counts = {divisors[i]: c for i, c in enumerate(rows[n]) if c}
    return LatticeCountVector(n=n, lattice=lattice, counts=counts)


def count_order_exactly_mobius(n: int, f: FactoredInt) -> int:
    """#{pi in S_n : ord(pi) = f.value} by inclusion-exclusion.

    ord(pi) = m means every cycle length divides m and, for each prime
    p | m, some cycle length carries p's full power in m.  Replacing the
    exponent of p by one less captures the permutations that miss that
    full power, so alternating over subsets of the primes of m isolates
    the exact count.  Deliberately independent of the lattice DP route.
    """
    pf = f.factors
    total = 0
    for bits in range(1 << len(pf)):
        sign = 1
        value = 1
        lowered = []
        for i, (p, e) in enumerate(pf):
            if bits >> i & 1:
                sign = -sign
                e -= 1
            if e:
                lowered.append((p, e))
                value *= p**e
        total += sign * count_lengths_divide(n, FactoredInt(value, tuple(lowered)))
    return total


def p_exact(n: int, m: int) -> Fraction:
    """P(ord = m) for a uniform random permutation of [n], exactly."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    f = factorize(m)
    # m is an achievable order iff its maximal prime powers fit into [n]
    # as disjoint cycles; everything else can be padded with fixed points.
    if sum(p**e for p, e in f.factors) > n:
        return Fraction(0)
    count = order_counts_on_lattice(n, f).count_for(m)
    return Fraction(count, math.factorial(n))


@lru_cache(maxsize=None)
def _support_values(n: int, max_support: int) -> tuple[int, ...]:
    primes = primes_up_to(n)
    out: list[int] = []

    def walk(start: int, budget: int, value: int) -> None:
        if len(out) >= max_support:
            raise BudgetExceededError(
                f"support of n={n} exceeds max_support={max_support}"
            )
        out.append(value)
        for i in range(start, len(primes)):
            p = primes[i]
            if p > budget:
                break
            q = p
            while q <= budget:
                walk(i + 1, budget - q, value * q)
                q *= p

    walk(0, n, 1)
    out.sort()
    return tuple(out)


def support(n: int, max_support: int = DEFAULT_MAX_SUPPORT) -> list[int]:
    """All achievable orders of a permutation of [n], sorted ascending.

    These are exactly the m whose maximal prime-power parts sum to at
    most n; enumerated by a DFS that assigns each prime an exponent and
    charges p^e against the remaining budget.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return list(_support_values(n, max_support))


@lru_cache(maxsize=None)
def _full_counts(n: int, max_support: int) -> tuple[tuple[int, int], ...]:
    entries = dict.fromkeys(_support_values(n, max_support), 0)
    f_n = math.factorial(n)
    lcm = math.lcm
    factorial = math.factorial

    # Walk all partitions of n by descending part size.  `denom` carries
    # prod(j^c * c!) over the multiplicities chosen so far, so a finished
    # partition contributes the multinomial n!/denom to its lcm's count.
    def scan(rem: int, maxpart: int, denom: int, value: int) -> None:
        for j in range(min(maxpart, rem), 1, -1):
            vj = lcm(value, j)
            weight = denom
            c = 0
            while j * (c + 1) <= rem:
                c += 1
                weight *= j * c
                scan(rem - j * c, j - 1, weight, vj)
        # whatever remains is fixed points: 1^c * c! = rem!
        entries[value] += f_n // (denom * factorial(rem))

    scan(n, n, 1, 1)
    missing = [m for m, c in entries.items() if c == 0]
    if missing:
        raise RuntimeError(
            f"internal inconsistency at n={n}: no partition produced lcm "
            f"{missing[:5]}{'...' if len(missing) > 5 else ''}"
        )
    return tuple(sorted(entries.items()))


def full_pmf(
    n: int,
    max_n: int = DEFAULT_MAX_N,
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> OrderPmf:
    """The complete exact pmf of the order, as counts out of n!.

    Computed by a single scan over all partitions of n (independent of
    the per-m DP routes), so the result doubles as a global cross-check:
    the counts must sum to n! and the nonzero keys must equal support(n).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > max_n:
        raise BudgetExceededError(f"n={n} exceeds max_n={max_n}")
    return OrderPmf(n=n, entries=dict(_full_counts(n, max_support)))


def _float_order_estimates(n: int, keys: tuple[int, ...]) -> dict[int, float]:
    """Float estimates of every order count at once, by a partition scan.

    Same walk as `_full_counts` but in float arithmetic.  Every term is
    positive, so each estimate equals the true count up to a relative
    error far below _FLOAT_SLACK.  Caller must ensure float(n!) is finite.
    """
    est = dict.fromkeys(keys, 0.0)
    f_n = float(math.factorial(n))
    lcm = math.lcm
    inv_fact = [1.0 / math.factorial(r) for r in range(n + 1)]

    def scan(rem: int, maxpart: int, denom: float, value: int) -> None:
        for j in range(min(maxpart, rem), 1, -1):
            vj = lcm(value, j)
            weight = denom
            c = 0
            while j * (c + 1) <= rem:
                c += 1
                weight *= j * c
                scan(rem - j * c, j - 1, weight, vj)
        est[value] += f_n / denom * inv_fact[rem]

    scan(n, n, 1.0, 1)
    return est


def mode(
    n: int,
    max_n: int = DEFAULT_MAX_N,
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> ModeResult:
    """All most-likely orders, without exact arithmetic on the whole pmf.

    Strategy: a single float partition scan estimates every count at
    once; only candidates within a two-sided relative slack of the float
    maximum can possibly attain the true maximum, and in practice that
    leaves one or two.  Survivors are settled by the exact lattice DP
    (with the cheap divides-count upper bound as a secondary skip), and
    the exact count at m = n is always computed as an anchor.  Pruning
    is strictly conservative, so ties are never lost.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > max_n:
        raise BudgetExceededError(f"n={n} exceeds max_n={max_n}")

    candidates = _support_values(n, max_support)
    seed = order_counts_on_lattice(n, factorize(n)).count_for(n)
    exact_counts: dict[int, int] = {n: seed}

    if n <= 170:  # float(n!) is finite up to exactly 170!
        est = _float_order_estimates(n, candidates)
        best_est = max(est.values())
        cut = best_est * (1 - _FLOAT_SLACK)
        survivors = [
            (est[m], m)
            for m in candidates
            if m != n and est[m] * (1 + _FLOAT_SLACK) >= cut
        ]
    else:
        # float(n!) overflows: no estimates, every candidate survives and
        # the integer bound below does all the pruning.
        survivors = [(math.inf, m) for m in candidates if m != n]

    incumbent = seed
    # Most promising first, so the incumbent is strong early and the
    # integer upper bound can skip the rest.
    survivors.sort(key=lambda t: (-t[0], t[1]))
    for _, m in survivors:
        f = factorize(m)
        if count_lengths_divide(n, f) < incumbent:
            continue
        c = order_counts_on_lattice(n, f).count_for(m)
        exact_counts[m] = c
        if c > incumbent:
            incumbent = c

    best = max(exact_counts.values())
    argmax = tuple(sorted(m for m, c in exact_counts.items() if c == best))
    return ModeResult(
        n=n, argmax=argmax, max_count=best, max_prob=Fraction(best, math.factorial(n))
    )


def collision_norm(
    n: int,
    max_n: int = DEFAULT_MAX_N,
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> Fraction:
    """P(two independent uniform permutations of [n] have the same order)."""
    pmf = full_pmf(n, max_n=max_n, max_support=max_support)
    fact_sq = math.factorial(n) ** 2
    return Fraction(sum(c * c for c in pmf.entries.values()), fact_sq)


def tail_max(
    n: int,
    eps: Fraction | int | str,
    max_n: int = DEFAULT_MAX_N,
    max_support: int = DEFAULT_MAX_SUPPORT,
) -> tuple[int, Fraction] | None:
    """Most likely order among those >= n^(1+eps); None if that tail is empty.

    eps must be a positive rational p/q; the cutoff m >= n^(1+p/q) is
    evaluated exactly as m**q >= n**(p+q).  On tied counts the smallest
    qualifying m is returned.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"need eps > 0, got {eps}")
    p, q = eps.numerator, eps.denominator
    pmf = full_pmf(n, max_n=max_n, max_support=max_support)
    cutoff = n ** (p + q)
    best: tuple[int, int] | None = None  # (count, m)
    for m in sorted(pmf.entries):
        if m**q >= cutoff:
            c = pmf.entries[m]
            if best is None or c > best[0]:
                best = (c, m)
    if best is None:
        return None
    return best[1], Fraction(best[0], math.factorial(n))


def count_restricted_cycles(n: int, cycles: int, allowed: Iterable[int]) -> int:
    """Permutations of [n] with exactly `cycles` cycles, all lengths in `allowed`.

    Same cycle-peeling recursion as `count_lengths_divide`, with the cycle
    count carried as a second DP dimension.
    """
    js = sorted(set(allowed))
    for j in js:
        if not 1 <= j <= n:
            raise ValueError(f"cycle lengths must lie in 1..{n}, got {j}")
    if n < 0 or cycles < 0:
        raise ValueError(f"need n >= 0 and cycles >= 0, got n={n}, cycles={cycles}")
    rows: list[list[int]] = [[0] * (cycles + 1) for _ in range(n + 1)]
    rows[0][0] = 1
    for nu in range(1, n + 1):
        row = rows[nu]
        ff = 1
        built = 1
        for j in js:
            if j > nu:
                break
            for i in range(built, j):
                ff *= nu - i
            built = j
            prev = rows[nu - j]
            for ell in range(1, cycles + 1):
                b = prev[ell - 1]
                if b:
                    row[ell] += ff * b
    return rows[n][cycles]


@lru_cache(maxsize=None)
def _brute_tables(n: int) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[tuple[int, int], int], ...]]:
    pmf: dict[int, int] = {}
    joint: dict[tuple[int, int], int] = {}
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        lengths = []
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            i = start
            while not seen[i]:
                seen[i] = True
                i = perm[i]
                length += 1
            lengths.append(length)
        order = math.lcm(*lengths) if lengths else 1
        pmf[order] = pmf.get(order, 0) + 1
        key = (len(lengths), order)
        joint[key] = joint.get(key, 0) + 1
    return tuple(sorted(pmf.items())), tuple(sorted(joint.items()))


def brute_force_pmf(n: int) -> OrderPmf:
    """Order pmf by direct enumeration of all n! permutations (n <= 9)."""
    if not 1 <= n <= BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force needs 1 <= n <= {BRUTE_FORCE_LIMIT}, got {n}")
    return OrderPmf(n=n, entries=dict(_brute_tables(n)[0]))


def brute_force_joint(n: int) -> dict[tuple[int, int], int]:
    """(number of cycles, order) -> count, by direct enumeration (n <= 9)."""
    if not 1 <= n <= BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force needs 1 <= n <= {BRUTE_FORCE_LIMIT}, got {n}")
    return dict(_brute_tables(n)[1])
