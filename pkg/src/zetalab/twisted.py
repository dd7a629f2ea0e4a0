"""Torus points, smoothly weighted truncations, and twisted (random) series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import DomainError
from .euler import EulerProductSpec, ZetaInstance, euler_product_eval, expand_dirichlet_coefficients, phi_strip_eval
from .hurwitz import PeriodicSequence, _as_sequence, periodic_hurwitz_zeta
from .primes import PrimePartition

UNIT_TOL = 1e-12
DEFAULT_SIGMA1 = 2.0
# truncate once the weight exp(-(k/n)^sigma1) drops below e^-45
WEIGHT_EXPONENT_CUTOFF = 45.0


def _freeze_phases(phases) -> tuple[tuple[int, complex], ...]:
    items = phases.items() if isinstance(phases, Mapping) else phases
    out = []
    for key, val in items:
        val = complex(val)
        if abs(abs(val) - 1) > UNIT_TOL:
            raise DomainError(f"phase at {key} has modulus {abs(val)}, expected 1")
        out.append((int(key), val))
    return tuple(sorted(out))


@dataclass(frozen=True)
class TorusPoint:
    """Finite-support point of the infinite torus; unlisted coordinates equal 1.

    ``prime_phases`` maps primes to omega(p); ``integer_phases[j]`` maps m >= 0
    to omega_2(m) in the j-th Hurwitz slot.
    """

    prime_phases: tuple[tuple[int, complex], ...] = ()
    integer_phases: tuple[tuple[tuple[int, complex], ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prime_phases", _freeze_phases(self.prime_phases))
        object.__setattr__(self, "integer_phases", tuple(_freeze_phases(p) for p in self.integer_phases))

    @classmethod
    def identity(cls, slots: int = 0) -> "TorusPoint":
        return cls((), ((),) * slots)

    def prime(self, p: int) -> complex:
        return dict(self.prime_phases).get(p, 1 + 0j)

    def integer(self, m: int, slot: int = 0) -> complex:
        if slot >= len(self.integer_phases):
            return 1 + 0j
        return dict(self.integer_phases[slot]).get(m, 1 + 0j)

    def multiplicative(self, K: int) -> np.ndarray:
        """omega(k) = prod_{p^e || k} omega(p)^e for k = 0..K (entry 0 unused)."""
        out = np.ones(K + 1, dtype=complex)
        for p, w in self.prime_phases:
            if w == 1:
                continue
            pe = p
            while pe <= K:
                out[pe::pe] *= w
                pe *= p
        return out

    def integer_array(self, length: int, slot: int = 0) -> np.ndarray:
        out = np.ones(length, dtype=complex)
        if slot < len(self.integer_phases):
            for m, w in self.integer_phases[slot]:
                if m < length:
                    out[m] = w
        return out


@dataclass(frozen=True)
class HurwitzSeries:
    """sum_m b_m (m + alpha)^{-s}: one Hurwitz slot."""

    alpha: float
    B: PeriodicSequence

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        object.__setattr__(self, "B", _as_sequence(self.B))


@dataclass(frozen=True)
class PhiSeries:
    """The partial function phi_h of an instance or a general spec."""

    source: Union[ZetaInstance, EulerProductSpec]
    partition: PrimePartition | None = None

    @property
    def instance(self) -> ZetaInstance | None:
        if isinstance(self.source, ZetaInstance):
            part = self.partition if self.partition is not None else self.source.partition
            return self.source.with_partition(part)
        return None

    @property
    def spec(self) -> EulerProductSpec:
        return self.source.spec if isinstance(self.source, ZetaInstance) else self.source

    @property
    def effective_partition(self) -> PrimePartition | None:
        inst = self.instance
        return inst.partition if inst is not None else self.partition


Series = Union[PhiSeries, HurwitzSeries]


def weight_cutoff(n: int, sigma1: float, offset: float = 0.0) -> int:
    """Largest index worth summing: beyond it the smooth weight is below e^-45."""
    return int(math.ceil((n + offset) * WEIGHT_EXPONENT_CUTOFF ** (1.0 / sigma1)))


def v1(m, n: int, sigma1: float = DEFAULT_SIGMA1):
    return np.exp(-((np.asarray(m, dtype=float) / n) ** sigma1))


def v2(m, n: int, alpha: float, sigma1: float = DEFAULT_SIGMA1):
    return np.exp(-(((np.asarray(m, dtype=float) + alpha) / (n + alpha)) ** sigma1))


def _check_truncation(n: int, sigma1: float) -> None:
    if n < 1:
        raise DomainError("truncation parameter n must be >= 1")
    if sigma1 <= 0.5:
        raise DomainError("sigma1 must exceed 1/2")


def weighted_terms(series: Series, s: complex, n: int, sigma1: float = DEFAULT_SIGMA1,
                   omega: TorusPoint | None = None, slot: int = 0) -> np.ndarray:
    """Individual terms of the (optionally twisted) weighted truncation."""
    _check_truncation(n, sigma1)
    s = complex(s)
    if isinstance(series, HurwitzSeries):
        M = weight_cutoff(n, sigma1, series.alpha)
        m = np.arange(M + 1, dtype=float)
        coef = series.B.as_array(M + 1) * v2(m, n, series.alpha, sigma1)
        if omega is not None:
            coef = coef * omega.integer_array(M + 1, slot)
        return coef * np.exp(-s * np.log(m + series.alpha))
    K = weight_cutoff(n, sigma1)
    coeffs = expand_dirichlet_coefficients(series.spec, series.effective_partition, K)
    k = np.arange(1, K + 1, dtype=float)
    coef = coeffs[1:] * v1(k, n, sigma1)
    if omega is not None:
        coef = coef * omega.multiplicative(K)[1:]
    return coef * np.exp(-s * np.log(k))


def weighted_truncation(series: Series, s: complex, n: int, sigma1: float = DEFAULT_SIGMA1) -> complex:
    """phi_{h,n}(s) or zeta_n(s, alpha; B): the smoothly weighted finite sum."""
    return complex(np.sum(weighted_terms(series, s, n, sigma1)))


def twisted_series_eval(series: Series, s: complex, omega: TorusPoint, n: int | None = None,
                        tol: float = 1e-12, sigma1: float = DEFAULT_SIGMA1, slot: int = 0) -> complex:
    """The series with coefficient k multiplied by omega(k) (or term m by omega_2(m)).

    Without ``n`` this is the absolutely convergent series for Re(s) > 1,
    computed as the untwisted value times an exact finite correction over the
    support of ``omega``.  With ``n`` it is the weighted truncation, usable for
    Re(s) > 1/2.
    """
    s = complex(s)
    if not isinstance(omega, TorusPoint):
        raise DomainError("omega must be a TorusPoint")
    if n is not None:
        if s.real <= 0.5:
            raise DomainError("truncated twisted series requires Re(s) > 1/2")
        return complex(np.sum(weighted_terms(series, s, n, sigma1, omega, slot)))
    if s.real <= 1:
        raise DomainError("untruncated twisted series requires Re(s) > 1")
    if isinstance(series, HurwitzSeries):
        value = periodic_hurwitz_zeta(s, series.alpha, series.B, tol)
        if slot < len(omega.integer_phases):
            for m, w in omega.integer_phases[slot]:
                b = series.B[m]
                if w != 1 and b != 0:
                    value += b * (w - 1) * np.exp(-s * math.log(m + series.alpha))
        return complex(value)
    inst = series.instance
    if inst is None:
        twist = {p: w for p, w in omega.prime_phases if w != 1}
        return euler_product_eval(series.spec, series.effective_partition, s, tol=tol, twist=twist).value
    value = phi_strip_eval(inst, s, tol)
    for p, w in omega.prime_phases:
        if w == 1 or p in inst.excised:
            continue
        x = inst.prime_coefficient(p) * np.exp(-s * math.log(p))
        value = value * (1 - x) / (1 - w * x)
    return complex(value)
