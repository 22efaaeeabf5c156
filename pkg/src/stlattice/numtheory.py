"""Totient machinery: sieved tables, point queries, restricted totients, coprime pairs."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "TotientTable", "totient_table", "factorize", "phi", "omega", "mobius",
    "phi_m", "phi_m_bruteforce", "totient_sum", "totient_over_j_sum",
    "two_pow_omega_sum", "coprime_pairs",
]


def _check_positive(**kw):
    for name, v in kw.items():
        if v < 1:
            raise InvalidArgument(f"{name} must be >= 1, got {v}")


@dataclass(frozen=True)
class TotientTable:
    """phi, omega and mu for 1..limit; index 0 is padding."""

    limit: int
    phi: np.ndarray
    omega: np.ndarray
    mobius: np.ndarray


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.flatnonzero(is_p)


@lru_cache(maxsize=8)
def totient_table(limit: int) -> TotientTable:
    """Eratosthenes-style sieve for phi, omega, mu up to ``limit``."""
    _check_positive(limit=limit)
    phi_arr = np.arange(limit + 1, dtype=np.int64)
    om = np.zeros(limit + 1, dtype=np.int64)
    mu = np.ones(limit + 1, dtype=np.int64)
    for p in _primes_upto(limit).tolist():
        sl = slice(p, limit + 1, p)
        phi_arr[sl] -= phi_arr[sl] // p
        om[sl] += 1
        mu[sl] = -mu[sl]
        if p * p <= limit:
            mu[p * p::p * p] = 0
    mu[0] = 0
    for arr in (phi_arr, om, mu):
        arr.flags.writeable = False
    return TotientTable(limit, phi_arr, om, mu)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
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
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Prime factorization; trial division then Pollard-Brent for what is left."""
    _check_positive(n=n)
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f, step = 7, (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while f * f <= n and f < 10_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += step[i]
        i = (i + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def phi(n: int) -> int:
    """Euler's totient of a single n."""
    _check_positive(n=n)
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def omega(n: int) -> int:
    """Number of distinct prime divisors."""
    _check_positive(n=n)
    return len(factorize(n))


def mobius(n: int) -> int:
    _check_positive(n=n)
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def phi_m_bruteforce(m: int, n: int) -> int:
    """|{a in [m] : gcd(a, n) = 1}| by direct gcd counting."""
    _check_positive(m=m, n=n)
    return sum(1 for a in range(1, m + 1) if math.gcd(a, n) == 1)


@lru_cache(maxsize=4096)
def _mobius_terms(n: int) -> tuple[tuple[int, int], ...]:
    """(e, mu(e)) for the squarefree divisors e of n."""
    terms = [(1, 1)]
    # subsets of the prime divisors are exactly the squarefree divisors
    for p in factorize(n):
        terms += [(e * p, -sgn) for e, sgn in terms]
    return tuple(terms)


def phi_m(m: int, n: int) -> int:
    """Restricted totient via sum over squarefree e | n of mu(e) * floor(m/e)."""
    _check_positive(m=m, n=n)
    return sum(sgn * (m // e) for e, sgn in _mobius_terms(n))


def totient_sum(n: int) -> int:
    """Exact sum of phi(1..n)."""
    _check_positive(n=n)
    return int(totient_table(n).phi[1:].sum())


def totient_over_j_sum(n: int) -> Fraction:
    """Exact rational sum of phi(j)/j for j = 1..n."""
    _check_positive(n=n)
    ph = totient_table(n).phi
    den = math.lcm(*range(1, n + 1))
    num = sum(int(ph[j]) * (den // j) for j in range(1, n + 1))
    return Fraction(num, den)


def two_pow_omega_sum(n: int) -> int:
    """Sum of 2**omega(r) for r = 1..n (number of squarefree divisors)."""
    _check_positive(n=n)
    om = totient_table(n).omega[1:]
    return int(np.left_shift(np.int64(1), om).sum())


def coprime_pairs(t_lo: int, t_hi: int, s_bound: Callable[[int], Fraction | int]) -> list[tuple[int, int]]:
    """All (s, t) with t_lo <= t <= t_hi, 1 <= s <= floor(s_bound(t)), gcd(s, t) = 1.

    Sorted by (t, s).  The bound is a callable so callers can express both the
    non-steep window (s up to t*h/w) and, with roles swapped, the steep one.
    """
    out = []
    for t in range(max(t_lo, 1), t_hi + 1):
        top = math.floor(s_bound(t))
        out.extend((s, t) for s in range(1, top + 1) if math.gcd(s, t) == 1)
    return out
