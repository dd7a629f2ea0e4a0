"""Hurwitz and periodic Hurwitz zeta-functions by Euler-Maclaurin summation.

The Euler-Maclaurin expansion uses a fixed number of Bernoulli corrections
(``EM_TERMS``); the length of the leading sum is chosen per call from the
rigorous remainder bound so that the truncation error stays below ``tol``.

The pole at s = 1 is handled through the *regular part*
``zeta(s, a) - 1/(s - 1)``, which is entire.  Periodic combinations with zero
mean never form ``1/(s - 1)`` and can be evaluated at s = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import finufft
import numpy as np

from .errors import DomainError, PoleError

EM_TERMS = 12
POLE_RADIUS = 1e-12
MIN_TERMS = 10
_CHUNK = 1 << 21


@lru_cache(maxsize=1)
def _bernoulli_even(count: int = EM_TERMS + 1) -> tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2*count} as exact fractions."""
    n = 2 * count
    b = [Fraction(0)] * (n + 1)
    b[0] = Fraction(1)
    for m in range(1, n + 1):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * b[k]
            binom = binom * (m + 1 - k) // (k + 1)
        b[m] = -acc / (m + 1)
    return tuple(b[2 * j] for j in range(1, count + 1))


def _em_coefficients() -> np.ndarray:
    """B_{2j}/(2j)! for j = 1..EM_TERMS."""
    bern = _bernoulli_even()
    return np.array([float(bern[j - 1] / math.factorial(2 * j)) for j in range(1, EM_TERMS + 1)])


_COEF = _em_coefficients()
# log of 2|B_{2m}|/(2m)! for the remainder with m = EM_TERMS + 1
_LOG_REM = math.log(2 * abs(float(_bernoulli_even()[EM_TERMS] / math.factorial(2 * EM_TERMS + 2))))


def _log_abs_pochhammer(s: complex, n: int) -> float:
    return sum(math.log(abs(s + i)) if s + i != 0 else -math.inf for i in range(n))


def remainder_bound(s: complex, a: float, n_terms: int) -> float:
    """Upper bound on the Euler-Maclaurin remainder after ``n_terms`` leading terms."""
    m = EM_TERMS + 1
    sigma = s.real
    x = n_terms + a
    log_b = _LOG_REM + _log_abs_pochhammer(s, 2 * m) + (1 - sigma - 2 * m) * math.log(x)
    return math.exp(log_b - math.log(sigma + 2 * m - 1))


def em_length(s: complex, a: float, tol: float) -> int:
    """Smallest leading-sum length N >= MIN_TERMS with remainder bound <= tol."""
    m = EM_TERMS + 1
    sigma = s.real
    need = (_LOG_REM + _log_abs_pochhammer(s, 2 * m) - math.log(sigma + 2 * m - 1) - math.log(tol)) / (
        sigma + 2 * m - 1
    )
    n = max(MIN_TERMS, math.ceil(math.exp(need) - a))
    while remainder_bound(s, a, n) > tol:
        n += max(1, n // 64)
    return n


def _expm1_ratio(z: np.ndarray) -> np.ndarray:
    """(exp(z) - 1)/z, accurate near z = 0."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-2
    zs = z[small]
    out[small] = 1 + zs / 2 * (1 + zs / 3 * (1 + zs / 4 * (1 + zs / 5 * (1 + zs / 6 * (1 + zs / 7)))))
    zb = z[~small]
    out[~small] = np.expm1(zb) / zb
    return out


def em_tail_regular(s: np.ndarray, x: float) -> np.ndarray:
    """Regular part of sum_{n>=0} (n + x)^(-s) from the expansion at x.

    Returns ``(x^(1-s) - 1)/(s-1) + x^(-s)/2 + Bernoulli corrections``; adding
    ``1/(s-1)`` gives the full tail.
    """
    s = np.asarray(s, dtype=complex)
    logx = math.log(x)
    u = np.exp(-s * logx)
    pole = -logx * _expm1_ratio((1 - s) * logx)
    corr = np.zeros_like(s)
    # term_j = C_j * (s)_{2j-1} * x^{-s-2j+1}
    term = s * u / x
    inv_x2 = 1.0 / (x * x)
    for j in range(EM_TERMS):
        corr = corr + _COEF[j] * term
        term = term * (s + 2 * j + 1) * (s + 2 * j + 2) * inv_x2
    return pole + u / 2 + corr


def _direct_sum(s: np.ndarray, a: float, n_terms: int, coeffs: np.ndarray | None = None) -> np.ndarray:
    """sum_{n < n_terms} coeffs[n] * (n + a)^(-s), chunked over n."""
    s = np.asarray(s, dtype=complex).reshape(-1)
    total = np.zeros(s.shape, dtype=complex)
    step = max(1, _CHUNK // max(1, s.size))
    for lo in range(0, n_terms, step):
        hi = min(n_terms, lo + step)
        logs = np.log(np.arange(lo, hi, dtype=float) + a)
        block = np.exp(-np.outer(s, logs))
        if coeffs is not None:
            block = block * coeffs[lo:hi]
        total += block.sum(axis=1)
    return total


def _check_args(s: np.ndarray, alpha: float, tol: float) -> None:
    if not (0 < alpha <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if np.any(s.real <= 0):
        raise DomainError("Euler-Maclaurin evaluator requires Re(s) > 0")
    if not tol >= 1e-14:
        raise DomainError(f"tol must be >= 1e-14, got {tol}")


def hurwitz_regular(s, alpha: float, tol: float = 1e-12, n_terms: int | None = None):
    """zeta(s, alpha) - 1/(s - 1): entire in s."""
    arr = np.asarray(s, dtype=complex)
    flat = arr.reshape(-1)
    _check_args(flat, alpha, tol)
    out = np.empty(flat.shape, dtype=complex)
    if n_terms is not None:
        sizes = np.full(flat.shape, int(n_terms))
    else:
        sizes = np.array([em_length(complex(z), alpha, tol) for z in flat], dtype=np.int64)
    for n in np.unique(sizes):
        sel = sizes == n
        z = flat[sel]
        out[sel] = _direct_sum(z, alpha, int(n)) + em_tail_regular(z, n + alpha)
    if arr.ndim == 0:
        return complex(out[0])
    return out.reshape(arr.shape)


def hurwitz_zeta(s, alpha: float = 1.0, tol: float = 1e-12):
    """Hurwitz zeta-function sum_{n>=0} (n + alpha)^(-s), for Re(s) > 0, s != 1."""
    arr = np.asarray(s, dtype=complex)
    if np.any(np.abs(arr - 1) < POLE_RADIUS):
        raise PoleError("hurwitz_zeta has a pole at s = 1")
    reg = hurwitz_regular(arr, alpha, tol)
    return reg + 1 / (arr - 1) if arr.ndim else complex(reg + 1 / (complex(arr) - 1))


@dataclass(frozen=True)
class PeriodicSequence:
    """Periodic coefficients b_0, ..., b_{k-1} with minimal period k."""

    values: tuple[complex, ...]

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if not vals:
            raise DomainError("periodic sequence needs at least one value")
        object.__setattr__(self, "values", vals)
        k = len(vals)
        for d in range(1, k):
            if k % d == 0 and all(vals[i] == vals[i % d] for i in range(k)):
                raise DomainError(f"period {k} is not minimal: values repeat with period {d}")

    @property
    def period(self) -> int:
        return len(self.values)

    def __getitem__(self, m: int) -> complex:
        return self.values[m % self.period]

    def as_array(self, length: int) -> np.ndarray:
        """b_0, ..., b_{length-1}."""
        base = np.asarray(self.values, dtype=complex)
        return np.resize(base, length)

    @property
    def residue(self) -> complex:
        return residue(self)


def _as_sequence(B) -> PeriodicSequence:
    return B if isinstance(B, PeriodicSequence) else PeriodicSequence(tuple(B))


def residue(B) -> complex:
    """Mean of one period, k^-1 (b_0 + ... + b_{k-1})."""
    B = _as_sequence(B)
    return complex(math.fsum(v.real for v in B.values), math.fsum(v.imag for v in B.values)) / B.period


def has_pole(B) -> bool:
    return residue(B) != 0


def periodic_hurwitz_zeta(s, alpha: float, B, tol: float = 1e-12):
    """zeta(s, alpha; B) = k^{-s} sum_l b_l zeta(s, (l + alpha)/k)."""
    B = _as_sequence(B)
    arr = np.asarray(s, dtype=complex)
    res = residue(B)
    if res != 0 and np.any(np.abs(arr - 1) < POLE_RADIUS):
        raise PoleError(f"pole at s = 1 (residue {res})")
    k = B.period
    scale = sum(abs(b) for b in B.values) or 1.0
    sub_tol = max(1e-14, tol / scale)
    acc = np.zeros(arr.shape, dtype=complex)
    for l, b in enumerate(B.values):
        if b != 0:
            acc = acc + b * hurwitz_regular(arr, (l + alpha) / k, sub_tol)
    ks = np.exp(-arr * math.log(k))
    if res != 0:
        acc = acc + (k * res) / (arr - 1)
    out = ks * acc
    return complex(out) if arr.ndim == 0 else out


_TABLE_BITS = 10
_TABLE_SIZE = 1 << _TABLE_BITS
_TABLE_COS = np.cos(2 * np.pi * np.arange(_TABLE_SIZE) / _TABLE_SIZE)
_TABLE_SIN = np.sin(2 * np.pi * np.arange(_TABLE_SIZE) / _TABLE_SIZE)


def cos_sin_turns(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(cos 2*pi*x, sin 2*pi*x) for x in [0, 1), to about 1e-15.

    Table lookup on the top bits plus a degree-7 Taylor step; roughly twice as
    fast as np.cos/np.sin on builds without a vectorized libm.
    """
    u = x * float(_TABLE_SIZE)
    j = u.astype(np.intp)
    y = u - j
    y *= 2 * math.pi / _TABLE_SIZE
    y2 = y * y
    c = ((-1 / 720 * y2 + 1 / 24) * y2 - 0.5) * y2 + 1
    s = (((-1 / 5040 * y2 + 1 / 120) * y2 - 1 / 6) * y2 + 1) * y
    tc = _TABLE_COS[j]
    ts = _TABLE_SIN[j]
    return tc * c - ts * s, ts * c + tc * s


class ShiftedPeriodicHurwitz:
    """zeta(s_j + i*k*step, alpha; B) for fixed base points s_j and integer k >= 0.

    The leading Euler-Maclaurin sum factorizes as
    ``sum_m b_m (m+alpha)^(-s_j) * exp(-2*pi*i*frac(k*phi_m))`` with
    ``phi_m = step*log(m+alpha)/(2*pi)`` in turns.  The first factor is tabulated
    once, so a shift costs one phase vector and one small matrix product.  A
    value depends only on k and the constructor arguments, never on which other
    shifts are evaluated.
    """

    def __init__(self, points, alpha: float, B, step: float, max_index: int, tol: float = 1e-10):
        self.points = np.asarray(points, dtype=complex).reshape(-1)
        self.B = _as_sequence(B)
        self.alpha = float(alpha)
        self.step = float(step)
        self.tol = float(tol)
        _check_args(self.points, self.alpha, self.tol)
        self.period = self.B.period
        self.res = residue(self.B)
        self._shifts_a = [(l + self.alpha) / self.period for l in range(self.period)]
        self._sub_tol = max(1e-14, self.tol / max(1.0, sum(abs(b) for b in self.B.values)))
        self.max_index = int(max_index)
        m_max = self.terms_for(self.max_index) * self.period
        logs = np.log(np.arange(m_max, dtype=float) + self.alpha)
        coeffs = self.B.as_array(m_max)
        weights = np.ascontiguousarray(coeffs[:, None] * np.exp(-np.outer(logs, self.points)))
        self._weights = weights.view(np.float64)  # (m_max, 2J): re/im interleaved
        turns = (self.step / (2 * math.pi)) * logs
        self._turns = turns - np.floor(turns)
        self._log_k = math.log(self.period)

    def shifted_points(self, k: int) -> np.ndarray:
        return self.points + 1j * (k * self.step)

    def terms_for(self, k: int) -> int:
        """Leading terms per residue class needed at shift k."""
        a_min = min(self._shifts_a)
        return max(em_length(complex(z), a_min, self._sub_tol) for z in self.shifted_points(k))

    def pole_distance(self, k: int) -> float:
        if self.res == 0:
            return math.inf
        return float(np.min(np.abs(self.shifted_points(k) - 1)))

    def at(self, k: int) -> np.ndarray:
        if k < 0 or k > self.max_index:
            raise DomainError(f"shift index {k} outside 0..{self.max_index}")
        n = self.terms_for(k)
        m = n * self.period
        x = k * self._turns[:m]
        x -= np.floor(x)
        c, s = cos_sin_turns(x)
        r = np.stack([c, s]) @ self._weights[:m]
        main = (r[0, 0::2] + r[1, 1::2]) + 1j * (r[0, 1::2] - r[1, 0::2])
        z = self.shifted_points(k)
        tail = np.zeros_like(z)
        for l, b in enumerate(self.B.values):
            if b != 0:
                tail = tail + b * em_tail_regular(z, n + self._shifts_a[l])
        ks = np.exp(-z * self._log_k)
        tail = ks * tail
        if self.res != 0:
            tail = tail + ks * (self.period * self.res) / (z - 1)
        return main + tail


def progression_periodic_hurwitz(s0: complex, alpha: float, B, step: float, count: int, tol: float = 1e-10) -> np.ndarray:
    """zeta(s0 + i*k*step, alpha; B) for k = 0..count-1 in one pass.

    The leading sums for all k form a type-1 non-uniform DFT of the weights
    b_m (m+alpha)^(-s0) at nodes step*log(m+alpha), evaluated with finufft;
    the Euler-Maclaurin tails are vectorized over k.
    """
    B = _as_sequence(B)
    s0 = complex(s0)
    _check_args(np.array([s0]), alpha, tol)
    if count < 1:
        raise DomainError("count must be >= 1")
    k0 = B.period
    res = residue(B)
    z = s0 + 1j * step * np.arange(count)
    if res != 0 and np.any(np.abs(z - 1) < POLE_RADIUS):
        raise PoleError(f"progression passes within {POLE_RADIUS} of the pole at s = 1")
    shifts = [(l + alpha) / k0 for l in range(k0)]
    scale = max(1.0, sum(abs(b) for b in B.values))
    sub_tol = max(1e-14, tol / scale)
    n = max(em_length(z[-1], min(shifts), sub_tol), em_length(s0, min(shifts), sub_tol))
    logs = np.log(np.arange(n * k0, dtype=float) + alpha)
    weights = B.as_array(n * k0) * np.exp(-s0 * logs)
    nodes = np.mod(step * logs + math.pi, 2 * math.pi) - math.pi
    # the NUFFT error is relative to sum |weights|; keep it near the requested tol
    eps = min(1e-6, max(1e-14, tol / max(1.0, float(np.sum(np.abs(weights))))))
    main = finufft.nufft1d1(nodes, weights, 2 * count, isign=-1, eps=eps, modeord=1)[:count]
    tail = np.zeros(count, dtype=complex)
    for l, b in enumerate(B.values):
        if b != 0:
            tail += b * em_tail_regular(z, n + shifts[l])
    ks = np.exp(-z * math.log(k0))
    tail *= ks
    if res != 0:
        tail += ks * (k0 * res) / (z - 1)
    return main + tail
