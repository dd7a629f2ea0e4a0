from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetalab.errors import DomainError
from zetalab.primes import PrimePartition, factorize, is_prime, prime_count, prime_partition, primes_upto, sieve, smallest_prime_factor


def brute_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_sieve_matches_trial_division():
    assert sieve(1000).tolist() == brute_primes(1000)
    assert primes_upto(97).tolist() == brute_primes(97)
    assert prime_count(10) == 4
    assert prime_count(10**5) == 9592


@given(st.integers(1, 10**9))
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)


def test_smallest_prime_factor():
    spf = smallest_prime_factor(100)
    for n in range(2, 101):
        assert spf[n] == min(factorize(n))


def test_partition_two_one():
    p = prime_partition(2, 1)
    assert p.excised == (2,)
    assert abs(p.h - 2 * math.pi / math.log(2)) < 1e-14
    assert abs(p.h - 9.0647202837) < 1e-9
    assert abs(p.h * math.log(2) - 2 * math.pi) < 1e-13


def test_partition_six_five():
    p = prime_partition(6, 5)
    assert p.excised == (2, 3, 5)
    assert p.in_ph(7) and not p.in_ph(5)
    assert p.in_nm(49) and not p.in_nm(35)


def test_partition_errors():
    with pytest.raises(DomainError, match="degenerate"):
        PrimePartition(3, 3)
    with pytest.raises(DomainError, match="coprime"):
        PrimePartition(6, 4)
    with pytest.raises(DomainError):
        PrimePartition(1, 2)
    with pytest.raises(DomainError):
        PrimePartition(2.5, 1)


def test_nm_mask():
    p = PrimePartition(6, 5)
    mask = p.nm_mask(50)
    assert [n for n in range(51) if mask[n]] == [n for n in range(1, 51) if math.gcd(n, 30) == 1]


def test_prime_index_sets():
    n_p, n_h = PrimePartition(2, 1).prime_index_sets(5)
    assert n_p == [1]
    assert n_h == [2, 3, 4, 5]


def test_exact_degeneracy():
    p = PrimePartition(2, 1)
    assert p.exact_degeneracy({2: 1}) == 1
    assert p.exact_degeneracy({2: -3}) == -3
    assert p.exact_degeneracy({3: 1}) is None
    assert p.exact_degeneracy({}) == 0
    q = PrimePartition(6, 5)
    assert q.exact_degeneracy({2: 2, 3: 2, 5: -2}) == 2
    assert q.exact_degeneracy({2: 1, 3: 1}) is None
