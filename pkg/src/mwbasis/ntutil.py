"""Exact integer number theory: primality, factoring, valuations.

Primality is deterministic: a sieve answers below ``SIEVE_LIMIT`` and a
Miller-Rabin test with the first thirteen prime bases answers above it.
That base set is proven correct for n < 3.3 * 10**24, which covers every
integer this package factors (discriminants are ~16 * 4 * p**6).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SIEVE_LIMIT = 10**6
TRIAL_BOUND = 10**4
DEFAULT_SEED = 20240601
DEFAULT_RHO_BUDGET = 2_000_000

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class FactoringBudgetExceeded(ArithmeticError):
    """Raised when Pollard rho exhausts its iteration budget."""


@lru_cache(maxsize=1)
def _sieve() -> bytearray:
    flags = bytearray([1]) * SIEVE_LIMIT
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(SIEVE_LIMIT - 1) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, SIEVE_LIMIT, i)))
    return flags


@lru_cache(maxsize=1)
def _smallest_factor() -> list[int]:
    spf = np.arange(SIEVE_LIMIT, dtype=np.int64)
    for i in range(2, math.isqrt(SIEVE_LIMIT - 1) + 1):
        if spf[i] == i:
            block = spf[i * i :: i]
            block[block == np.arange(i * i, SIEVE_LIMIT, i)] = i
    return spf.tolist()


@lru_cache(maxsize=1)
def small_primes() -> tuple[int, ...]:
    """All primes up to ``TRIAL_BOUND``."""
    sieve = _sieve()
    return tuple(i for i in range(TRIAL_BOUND + 1) if sieve[i])


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes in the closed interval [lo, hi]."""
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


def _miller_rabin(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 0:
        raise ValueError(f"is_prime expects n >= 0, got {n}")
    if n < SIEVE_LIMIT:
        return bool(_sieve()[n])
    for p in _MR_BASES:
        if n % p == 0:
            return False
    return all(_miller_rabin(n, a) for a in _MR_BASES)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ``((prime, exponent), ...)`` with increasing primes."""

    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = 1
        for prime, exp in self.factors:
            out *= prime**exp
        return out

    def primes(self) -> list[int]:
        return [prime for prime, _ in self.factors]

    def exponent(self, prime: int) -> int:
        return dict(self.factors).get(prime, 0)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)


def _brent_rho(n: int, rng: random.Random, budget: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    spent = 0
    while spent < budget:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
            if spent >= budget:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise FactoringBudgetExceeded(f"rho budget {budget} exhausted on {n}")


def factor(n: int, *, seed: int = DEFAULT_SEED, budget: int = DEFAULT_RHO_BUDGET) -> Factorization:
    """Factor ``n >= 1`` by trial division then Brent's rho.

    Raises FactoringBudgetExceeded if a cofactor resists ``budget`` rho
    iterations; callers treat that as "skip this input", never as a result.
    """
    if n < 1:
        raise ValueError(f"factor expects n >= 1, got {n}")
    counts: dict[int, int] = {}
    if n < SIEVE_LIMIT:
        spf = _smallest_factor()
        while n > 1:
            counts[spf[n]] = counts.get(spf[n], 0) + 1
            n //= spf[n]
        return Factorization(tuple(sorted(counts.items())))
    for p in small_primes():
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _brent_rho(m, rng, budget)
        stack += [d, m // d]
    return Factorization(tuple(sorted(counts.items())))


def is_squarefree(n: int, **kw) -> bool:
    return all(e == 1 for _, e in factor(n, **kw))


def valuation(n: int, r: int) -> int:
    """Largest e with r**e dividing the nonzero integer n."""
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    e = 0
    while n % r == 0:
        n //= r
        e += 1
    return e


def divisors(n: int, **kw) -> list[int]:
    """Positive divisors of ``n != 0`` in increasing order."""
    divs = [1]
    for prime, exp in factor(abs(n), **kw):
        divs = [d * prime**k for d in divs for k in range(exp + 1)]
    return sorted(divs)

