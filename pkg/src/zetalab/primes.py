"""Prime utilities and the prime partition induced by exp(2*pi/h) = a/b."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError


def sieve(n: int) -> np.ndarray:
    """All primes <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


@lru_cache(maxsize=8)
def _cached_sieve(n: int) -> np.ndarray:
    out = sieve(n)
    out.setflags(write=False)
    return out


def primes_upto(n: int) -> np.ndarray:
    """Cached read-only variant of :func:`sieve` (rounded up to a power of 2)."""
    size = 1 << max(4, int(n).bit_length())
    primes = _cached_sieve(size)
    return primes[: np.searchsorted(primes, n, side="right")]


def prime_count(x: int) -> int:
    return int(primes_upto(int(x)).size)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization, ``{prime: exponent}``."""
    n = abs(int(n))
    out: dict[int, int] = {}
    if n < 2:
        return out
    for d in (2, 3):
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
    d = 5
    while d * d <= n:
        for q in (d, d + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[k] for 0 <= k <= n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in primes_upto(math.isqrt(n)):
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


@dataclass(frozen=True)
class PrimePartition:
    """Split of the primes into the excised set P_p (divisors of a*b) and P_h.

    ``h`` is the step of the arithmetic progression of shifts, derived from the
    exact pair (a, b) as 2*pi/log(a/b).
    """

    a: int
    b: int
    excised: tuple[int, ...] = field(init=False)
    h: float = field(init=False)

    def __post_init__(self):
        a, b = self.a, self.b
        if isinstance(a, bool) or isinstance(b, bool):
            raise DomainError("a and b must be integers")
        if int(a) != a or int(b) != b:
            raise DomainError("a and b must be integers")
        a, b = int(a), int(b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if b < 1 or a < 1:
            raise DomainError(f"a and b must be positive, got ({a}, {b})")
        if a == b:
            raise DomainError(f"degenerate partition a = b = {a}: log(a/b) = 0, h undefined")
        if a < b:
            raise DomainError(f"need a > b so that h > 0, got ({a}, {b})")
        if math.gcd(a, b) != 1:
            raise DomainError(f"a and b must be coprime, gcd({a}, {b}) = {math.gcd(a, b)}")
        primes = sorted(set(factorize(a)) | set(factorize(b)))
        object.__setattr__(self, "excised", tuple(primes))
        object.__setattr__(self, "h", 2.0 * math.pi / math.log1p((a - b) / b))

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a, self.b)

    @property
    def modulus(self) -> int:
        """a*b; n lies in N_m exactly when gcd(n, a*b) = 1."""
        return self.a * self.b

    def is_excised(self, p: int) -> bool:
        return p in self.excised

    def in_ph(self, p: int) -> bool:
        """Membership of a prime in P_h."""
        return p not in self.excised

    def in_nm(self, n: int) -> bool:
        """All prime divisors of n lie in P_h."""
        return n >= 1 and math.gcd(n, self.modulus) == 1

    def nm_mask(self, upto: int) -> np.ndarray:
        """Boolean mask over 0..upto marking members of N_m (index 0 is False)."""
        mask = np.ones(upto + 1, dtype=bool)
        mask[0] = False
        for p in self.excised:
            mask[p::p] = False
        return mask

    def prime_index_sets(self, count: int) -> tuple[list[int], list[int]]:
        """(N_p, N_h) restricted to prime indices 1..count."""
        primes = primes_upto(max(16, int(count * (math.log(count + 2) + math.log(math.log(count + 3)) + 2))))
        primes = primes[:count]
        n_p = [i + 1 for i, p in enumerate(primes) if int(p) in self.excised]
        n_h = [i + 1 for i, p in enumerate(primes) if int(p) not in self.excised]
        return n_p, n_h

    def exact_degeneracy(self, prime_exponents: dict[int, int]) -> int | None:
        """Return r when prod p^k_p == (a/b)^r exactly, else None.

        This is the exact form of h * sum k_p log p in 2*pi*Z.
        """
        q = Fraction(1)
        for p, k in prime_exponents.items():
            if k:
                q *= Fraction(p) ** k
        if q == 1:
            return 0
        ratio = self.ratio
        r = round((math.log(q.numerator) - math.log(q.denominator)) / math.log(ratio))
        for cand in (r - 1, r, r + 1):
            if cand != 0 and ratio**cand == q:
                return cand
        return None


def prime_partition(a: int, b: int) -> PrimePartition:
    return PrimePartition(a, b)
