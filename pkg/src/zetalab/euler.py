"""Polynomial Euler products, their Dirichlet coefficients, and concrete instances.

An :class:`EulerProductSpec` stores local roots ``(a, f)`` per prime, meaning a
factor ``(1 - a p^{-s f})^{-1}``.  All evaluations use the shifted
normalization, i.e. the product is taken at ``s + growth_alpha + growth_beta``
so that the Dirichlet series converges absolutely for Re(s) > 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, UnsupportedInstanceError
from .hurwitz import PeriodicSequence, periodic_hurwitz_zeta
from .primes import PrimePartition, primes_upto

Root = tuple[complex, int]

MAX_PRIME_CUTOFF = 10**7


def _freeze_roots(roots) -> tuple[Root, ...]:
    out = []
    for item in roots:
        if isinstance(item, (int, float, complex)):
            a, f = item, 1
        else:
            a, f = item
        if int(f) != f or f < 1:
            raise DomainError(f"exponent f must be a positive integer, got {f}")
        out.append((complex(a), int(f)))
    return tuple(out)


@dataclass(frozen=True)
class EulerProductSpec:
    """Local-factor data of a polynomial Euler product.

    ``default_roots`` apply at every prime unless ``prime_roots`` overrides it,
    or ``character`` is set (then the single root at p is ``character[p % q]``).
    """

    default_roots: tuple[Root, ...] = ((1 + 0j, 1),)
    prime_roots: tuple[tuple[int, tuple[Root, ...]], ...] = ()
    character: tuple[complex, ...] | None = None
    growth_alpha: float = 0.0
    growth_beta: float = 0.0
    c1: float = 1.0
    declared_sigma_star: float | None = None
    name: str = "custom"
    _overrides: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "default_roots", _freeze_roots(self.default_roots))
        if isinstance(self.prime_roots, Mapping):
            items = self.prime_roots.items()
        else:
            items = self.prime_roots
        frozen = tuple(sorted((int(p), _freeze_roots(r)) for p, r in items))
        object.__setattr__(self, "prime_roots", frozen)
        object.__setattr__(self, "_overrides", dict(frozen))
        if self.character is not None:
            object.__setattr__(self, "character", tuple(complex(c) for c in self.character))
        if self.growth_alpha < 0 or self.growth_beta < 0:
            raise DomainError("growth exponents must be non-negative")
        if self.declared_sigma_star is not None and not (0.5 <= self.declared_sigma_star < 1):
            raise DomainError("declared sigma* must lie in [1/2, 1)")
        self.validate()

    @classmethod
    def riemann(cls) -> "EulerProductSpec":
        return cls(name="riemann", declared_sigma_star=0.5)

    @classmethod
    def divisor(cls, degree: int = 2) -> "EulerProductSpec":
        """zeta(s)^degree: every local root equal to 1 (coefficients d_degree(n))."""
        return cls(default_roots=((1, 1),) * degree, c1=float(degree), name=f"divisor-{degree}")

    @classmethod
    def from_character(cls, values, name: str = "dirichlet") -> "EulerProductSpec":
        """Degree-one product with a_p = values[p mod q]."""
        return cls(character=tuple(values), name=name, declared_sigma_star=0.5)

    @property
    def shift(self) -> float:
        return self.growth_alpha + self.growth_beta

    def roots(self, p: int) -> tuple[Root, ...]:
        if p in self._overrides:
            return self._overrides[p]
        if self.character is not None:
            return ((self.character[p % len(self.character)], 1),)
        return self.default_roots

    def degree(self, p: int) -> int:
        return len(self.roots(p))

    def validate(self, upto: int = 100) -> None:
        """Check the growth bounds g <= C1 p^alpha and |a| <= p^beta on stored data."""
        primes = set(int(p) for p in primes_upto(upto)) | set(self._overrides)
        for p in sorted(primes):
            roots = self.roots(p)
            if len(roots) > self.c1 * p**self.growth_alpha * (1 + 1e-12):
                raise DomainError(f"degree {len(roots)} at p={p} exceeds C1 p^alpha")
            for a, _ in roots:
                if a != 0 and math.log(abs(a)) > self.growth_beta * math.log(p) + 1e-12:
                    raise DomainError(f"|a| = {abs(a)} at p={p} exceeds p^beta")

    def root_table(self, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Padded (a, f) arrays of shape (len(primes), G); padding has a = 0."""
        primes = np.asarray(primes, dtype=np.int64)
        if self.character is not None and not self._overrides:
            q = len(self.character)
            a = np.asarray(self.character)[primes % q][:, None]
            return a, np.ones_like(a, dtype=np.int64)
        if not self._overrides:
            g = len(self.default_roots)
            a = np.tile(np.array([r[0] for r in self.default_roots], dtype=complex), (primes.size, 1))
            f = np.tile(np.array([r[1] for r in self.default_roots], dtype=np.int64), (primes.size, 1))
            return a, f
        rows = [self.roots(int(p)) for p in primes]
        g = max((len(r) for r in rows), default=1)
        a = np.zeros((primes.size, g), dtype=complex)
        f = np.ones((primes.size, g), dtype=np.int64)
        for i, r in enumerate(rows):
            for j, (aj, fj) in enumerate(r):
                a[i, j] = aj
                f[i, j] = fj
        return a, f

    def majorant(self) -> "EulerProductSpec":
        """Same exponents with |a|: its coefficients dominate |c_k| termwise."""
        return EulerProductSpec(
            default_roots=tuple((abs(a), f) for a, f in self.default_roots),
            prime_roots=tuple((p, tuple((abs(a), f) for a, f in r)) for p, r in self.prime_roots),
            character=None if self.character is None else tuple(abs(c) for c in self.character),
            growth_alpha=self.growth_alpha,
            growth_beta=self.growth_beta,
            c1=self.c1,
            name=f"|{self.name}|",
        )


def local_series(roots: tuple[Root, ...], emax: int) -> np.ndarray:
    """Coefficients of prod_j (1 - a_j x^f_j)^{-1} up to x^emax.

    For f = 1 these are complete homogeneous polynomials in the roots.
    """
    out = np.zeros(emax + 1, dtype=complex)
    out[0] = 1
    for a, f in roots:
        # multiply by 1/(1 - a x^f): out[e] += a * out[e - f], increasing e
        for e in range(f, emax + 1):
            out[e] += a * out[e - f]
    return out


def expand_dirichlet_coefficients(
    spec: EulerProductSpec, partition: PrimePartition | None, K: int
) -> np.ndarray:
    """c_0..c_K of the shifted Dirichlet series (c_0 = 0 is padding).

    With a partition, c_k = 0 unless every prime factor of k lies in P_h.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    with np.errstate(over="ignore", invalid="ignore"):
        c = _assemble(spec, partition, K)
    if not np.all(np.isfinite(c)):
        raise ConvergenceError("Dirichlet coefficient overflow")
    return c


def _assemble(spec: EulerProductSpec, partition: PrimePartition | None, K: int) -> np.ndarray:
    c = np.ones(K + 1, dtype=complex)
    c[0] = 0
    excised = set(partition.excised) if partition else set()
    primes = primes_upto(K)
    small = primes[primes * primes <= K]
    large = primes[primes * primes > K]
    for p in small:
        p = int(p)
        if p in excised:
            c[p::p] = 0
            continue
        emax = int(math.log(K) / math.log(p)) + 1
        while p**emax > K:
            emax -= 1
        loc = local_series(spec.roots(p), emax)
        pe = 1
        for e in range(1, emax + 1):
            pe *= p
            idx = np.arange(pe, K + 1, pe)
            idx = idx[(idx // pe) % p != 0]
            c[idx] *= loc[e]
    if large.size:
        a, f = spec.root_table(large)
        # only f = 1 roots contribute at exponent 1
        first = np.where(f == 1, a, 0).sum(axis=1)
        for p, val in zip(large.tolist(), first.tolist()):
            if p in excised:
                c[p::p] = 0
            elif val != 1:
                c[p::p] *= val
    if spec.shift:
        k = np.arange(1, K + 1, dtype=float)
        c[1:] *= np.exp(-spec.shift * np.log(k))
    return c


def dirichlet_series_sum(coeffs: np.ndarray, s: complex) -> complex:
    """sum_{k=1}^{K} c_k k^{-s} with pairwise summation."""
    k = np.arange(1, coeffs.size, dtype=float)
    return complex(np.sum(coeffs[1:] * np.exp(-complex(s) * np.log(k))))


class ProductValue(NamedTuple):
    value: complex
    tail_bound: float
    prime_cutoff: int

    @property
    def converged(self) -> bool:
        return np.isfinite(self.tail_bound)


def _log_tail(spec: EulerProductSpec, sigma: float, cutoff: int) -> float:
    """Bound on |log(remaining product over primes > cutoff)| from the growth data."""
    p = float(cutoff)
    denom = 1.0 - p ** (-sigma - spec.growth_alpha)
    return spec.c1 * p ** (1.0 - sigma) / ((sigma - 1.0) * denom)


def product_tail_bound(spec: EulerProductSpec, sigma: float, cutoff: int, value_abs: float) -> float:
    lt = _log_tail(spec, sigma, cutoff)
    return value_abs * math.expm1(lt)


def _auto_cutoff(spec: EulerProductSpec, sigma: float, tol: float) -> int:
    # C1 P^{1-sigma}/(sigma-1) ~ tol  (relative)
    p = (tol * (sigma - 1.0) / (2.0 * spec.c1)) ** (1.0 / (1.0 - sigma))
    return int(min(max(p, 100.0), MAX_PRIME_CUTOFF))


def euler_product_eval(
    spec: EulerProductSpec,
    partition: PrimePartition | None,
    s: complex,
    prime_cutoff: int | None = None,
    tol: float = 1e-12,
    twist: dict[int, complex] | None = None,
) -> ProductValue:
    """Truncated product over primes <= prime_cutoff (P_h only with a partition).

    ``twist`` multiplies the root at p by omega(p)^f, giving the twisted random
    element at a finite-support torus point.
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError(f"Euler product requires Re(s) > 1, got {s}")
    cutoff = prime_cutoff if prime_cutoff is not None else _auto_cutoff(spec, s.real, tol)
    primes = primes_upto(cutoff)
    if partition:
        primes = primes[~np.isin(primes, partition.excised)]
    a, f = spec.root_table(primes)
    if twist:
        omega = np.array([twist.get(int(p), 1.0) for p in primes], dtype=complex)
        a = a * omega[:, None] ** f
    z = s + spec.shift
    x = a * np.exp(-z * f * np.log(primes.astype(float))[:, None])
    one_minus = 1 - x
    if np.any(np.abs(one_minus) < 1e-300):
        raise DomainError("a local factor vanishes at s")
    value = complex(np.exp(-np.sum(np.log(one_minus))))
    bound = product_tail_bound(spec, s.real, cutoff, abs(value))
    return ProductValue(value, bound, cutoff)


def series_tail_bound(spec: EulerProductSpec, partition: PrimePartition | None, sigma: float, K: int,
                      coeffs_majorant: np.ndarray | None = None) -> float:
    """Rigorous bound on |sum_{k>K} c_k k^{-s}| for Re(s) = sigma > 1.

    Uses the majorant product (roots replaced by |a|): its full value, bounded
    above via the product tail, minus its partial sum up to K.
    """
    maj = spec.majorant()
    cutoff = max(10**6, K)
    full = euler_product_eval(maj, partition, sigma, prime_cutoff=cutoff)
    upper = full.value.real + full.tail_bound
    if coeffs_majorant is None:
        coeffs_majorant = expand_dirichlet_coefficients(maj, partition, K)
    k = np.arange(1, K + 1, dtype=float)
    partial = math.fsum((coeffs_majorant[1:].real * np.exp(-sigma * np.log(k))).tolist())
    return max(0.0, upper - partial) + 4 * np.finfo(float).eps * upper


@dataclass(frozen=True)
class ZetaInstance:
    """A concrete Euler-product zeta-function with known analytic continuation.

    ``kind`` is ``"riemann"`` or ``"dirichlet"``; for the latter ``character``
    lists chi(0), ..., chi(q-1).  With a partition the instance stands for the
    partial function phi_h, i.e. the Euler factors at the excised primes are
    removed.
    """

    kind: str = "riemann"
    character: tuple[complex, ...] | None = None
    partition: PrimePartition | None = None

    def __post_init__(self):
        if self.kind not in ("riemann", "dirichlet"):
            raise UnsupportedInstanceError(f"unknown instance kind {self.kind!r}")
        if self.kind == "dirichlet":
            if not self.character:
                raise DomainError("dirichlet instance needs character values")
            chi = tuple(complex(c) for c in self.character)
            object.__setattr__(self, "character", chi)
            _check_character(chi)
        elif self.character is not None:
            raise DomainError("riemann instance takes no character")

    @property
    def spec(self) -> EulerProductSpec:
        if self.kind == "riemann":
            return EulerProductSpec.riemann()
        return EulerProductSpec.from_character(self.character)

    @property
    def sequence(self) -> PeriodicSequence:
        """Coefficients as a periodic sequence b_m = a(m + 1), used with alpha = 1."""
        if self.kind == "riemann":
            return PeriodicSequence((1,))
        chi = self.character
        return PeriodicSequence(chi[1:] + chi[:1])

    @property
    def alpha(self) -> float:
        return 1.0

    @property
    def excised(self) -> tuple[int, ...]:
        return self.partition.excised if self.partition else ()

    @property
    def sigma_star(self) -> float:
        return 0.5

    def prime_coefficient(self, p: int) -> complex:
        if self.kind == "riemann":
            return 1.0 + 0j
        return self.character[p % len(self.character)]

    def coefficient(self, n: int) -> complex:
        """a(n) of the (partial) series: zero off N_m when a partition is attached."""
        if n < 1 or (self.partition is not None and not self.partition.in_nm(n)):
            return 0j
        if self.kind == "riemann":
            return 1 + 0j
        return self.character[n % len(self.character)]

    def local_factor(self, p: int, s):
        """1 - a_p p^{-s}; multiplying by it removes the Euler factor at p."""
        return 1 - self.prime_coefficient(p) * np.exp(-np.asarray(s, dtype=complex) * math.log(p))

    def with_partition(self, partition: PrimePartition | None) -> "ZetaInstance":
        return ZetaInstance(self.kind, self.character, partition)

    def mean_square_reference(self, sigma: float) -> float:
        """sum |a(m)|^2 m^{-2 sigma} over the support of the (partial) series."""
        from .hurwitz import hurwitz_zeta

        total = hurwitz_zeta(2 * sigma).real
        drop = set(self.excised)
        if self.kind == "dirichlet":
            q = len(self.character)
            drop |= {p for p in range(2, q + 1) if q % p == 0 and all(p % d for d in range(2, p))}
        for p in drop:
            total *= 1 - p ** (-2 * sigma)
        return total


def _check_character(chi: tuple[complex, ...]) -> None:
    q = len(chi)
    if abs(chi[1 % q] - 1) > 1e-12:
        raise DomainError("character must satisfy chi(1) = 1")
    for m in range(q):
        coprime = math.gcd(m, q) == 1
        if coprime and abs(abs(chi[m]) - 1) > 1e-12:
            raise DomainError(f"|chi({m})| must be 1 for gcd({m}, {q}) = 1")
        if not coprime and chi[m] != 0:
            raise DomainError(f"chi({m}) must vanish for gcd({m}, {q}) > 1")
        for n in range(q):
            if abs(chi[(m * n) % q] - chi[m] * chi[n]) > 1e-12:
                raise DomainError("character values are not completely multiplicative mod q")


def phi_strip_eval(instance: ZetaInstance, s, tol: float = 1e-12):
    """phi_h(s) for Re(s) >= 1/2: base continuation times the excised local factors."""
    arr = np.asarray(s, dtype=complex)
    if np.any(arr.real < 0.5):
        raise DomainError("strip evaluation requires Re(s) >= 1/2")
    value = periodic_hurwitz_zeta(arr, instance.alpha, instance.sequence, tol)
    for p in instance.excised:
        value = value * instance.local_factor(p, arr)
    return complex(value) if arr.ndim == 0 else value


def phi_h(obj, s, tol: float = 1e-12, partition: PrimePartition | None = None):
    """Evaluate an instance anywhere in its strip, or a general spec for Re(s) > 1."""
    if isinstance(obj, ZetaInstance):
        if partition is not None:
            obj = obj.with_partition(partition)
        return phi_strip_eval(obj, s, tol)
    if isinstance(obj, EulerProductSpec):
        if complex(s).real <= 1:
            raise UnsupportedInstanceError(
                "general Euler products are evaluated only for Re(s) > 1 (no declared continuation)"
            )
        return euler_product_eval(obj, partition, s, tol=tol).value
    raise UnsupportedInstanceError(f"cannot evaluate {type(obj).__name__}")
