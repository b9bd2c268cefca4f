"""Exact integer and rational arithmetic: prime sieves and the lcm-of-segments calculus.

Everything here is exact.  ``BigRational`` is an alias for ``fractions.Fraction``:
always reduced, positive denominator, arbitrary precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

BigRational = Fraction

_PRIME_CACHE: list[int] = []
_PRIME_LIMIT = 0


def primes_upto(n: int) -> list[int]:
    """All primes <= n, from a cached, growable sieve."""
    global _PRIME_CACHE, _PRIME_LIMIT
    if n > _PRIME_LIMIT:
        limit = max(n, 2 * _PRIME_LIMIT, 1024)
        sieve = bytearray(b"\x01") * (limit + 1)
        sieve[:2] = b"\x00\x00"
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                start = p * p
                sieve[start : limit + 1 : p] = b"\x00" * ((limit - start) // p + 1)
        _PRIME_CACHE = [i for i, flag in enumerate(sieve) if flag]
        _PRIME_LIMIT = limit
    return [p for p in _PRIME_CACHE if p <= n]


@dataclass(frozen=True)
class LcmValue:
    """An exact lcm of a contiguous integer range, optionally restricted to large primes.

    ``value`` is the lcm of ``range[0]..range[1]``; with ``min_prime = l`` set, only the
    prime factors p > l are kept.
    """

    value: int
    range: tuple[int, int]
    min_prime: int | None = None

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("lcm value must be positive")

    def log(self) -> float:
        return _log_int(self.value)


def _log_int(n: int) -> float:
    """Natural log of a (possibly huge) positive integer."""
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 900
    return math.log(n >> shift) + shift * math.log(2)


def lcm_upto(n: int) -> LcmValue:
    """lcm(1, 2, ..., n), built as the product of maximal prime powers p^floor(log_p n)."""
    if n < 1:
        raise ValueError("lcm_upto requires n >= 1")
    value = 1
    for p in primes_upto(n):
        pk = p
        while pk * p <= n:
            pk *= p
        value *= pk
    return LcmValue(value=value, range=(1, n))


def lcm_segment(n: int, k: int, min_prime: int | None = None) -> LcmValue:
    """lcm of the consecutive integers n-k, ..., n.

    With ``min_prime = l``, strips all prime factors p <= l from the result, keeping
    the exact prime-power content at primes p > l.
    """
    if not 0 <= k < n:
        raise ValueError("lcm_segment requires 0 <= k < n")
    if min_prime is not None and min_prime < 0:
        raise ValueError("min_prime must be >= 0 when given")
    value = 1
    for m in range(n - k, n + 1):
        value = math.lcm(value, m)
    if min_prime is not None:
        for p in primes_upto(min(min_prime, n)):
            while value % p == 0:
                value //= p
    return LcmValue(value=value, range=(n - k, n), min_prime=min_prime)


def lcm_rate(gamma: Fraction) -> Fraction:
    """Exact asymptotic rate of log(lcm(n-k..n))/n along k ~ gamma*n.

    For gamma in (0, 1] the rate is (sum_{h < floor(1/gamma)} 1/h) * gamma
    + 1/floor(1/gamma); it plateaus at 1 on gamma >= 1/2.
    """
    gamma = Fraction(gamma)
    if not 0 < gamma <= 1:
        raise ValueError("lcm_rate requires gamma in (0, 1]")
    m = int(Fraction(1) / gamma)  # floor(1/gamma)
    harmonic = sum((Fraction(1, h) for h in range(1, m)), Fraction(0))
    return harmonic * gamma + Fraction(1, m)
