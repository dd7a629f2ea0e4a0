"""Characters of the infinite torus, Weyl sums, Haar sampling, and the rotation Phi_h."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import DegeneracyError, DomainError
from .primes import PrimePartition
from .twisted import TorusPoint

DEGENERACY_MARGIN = 1e-12
_SLOT_SHIFT = 40


def _freeze_index(items) -> tuple[tuple[int, int], ...]:
    items = items.items() if isinstance(items, Mapping) else items
    out = {}
    for key, val in items:
        if int(val) != val:
            raise DomainError(f"index entries must be integers, got {val}")
        if int(val):
            out[int(key)] = out.get(int(key), 0) + int(val)
    return tuple(sorted((k, v) for k, v in out.items() if v))


@dataclass(frozen=True)
class IndexVector:
    """Finite-support character data: k_p on primes and l_m per Hurwitz slot."""

    prime_indices: tuple[tuple[int, int], ...] = ()
    integer_indices: tuple[tuple[tuple[int, int], ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prime_indices", _freeze_index(self.prime_indices))
        object.__setattr__(self, "integer_indices", tuple(_freeze_index(s) for s in self.integer_indices))

    @property
    def is_zero(self) -> bool:
        return not self.prime_indices and not any(self.integer_indices)

    @property
    def slots(self) -> int:
        return len(self.integer_indices)


Step = Union[float, PrimePartition]


def _step(h: Step) -> float:
    return h.h if isinstance(h, PrimePartition) else float(h)


def _check_alphas(idx: IndexVector, alphas: Sequence[float]) -> None:
    if idx.slots > len(alphas):
        raise DomainError(f"index has {idx.slots} integer slots but only {len(alphas)} alphas given")


def _frac(x: float) -> float:
    return x - math.floor(x)


def coordinate_turns(h: float, p_or_shift: float) -> float:
    """h*log(x)/(2*pi) reduced to [0, 1): the rotation angle of one coordinate in turns."""
    return _frac(h * math.log(p_or_shift) / (2 * math.pi))


def theta_turns(idx: IndexVector, h: Step, alphas: Sequence[float] = ()) -> float:
    """theta/(2*pi) reduced to [0, 1), summed exactly from per-coordinate turns."""
    _check_alphas(idx, alphas)
    step = _step(h)
    parts = [k * coordinate_turns(step, p) for p, k in idx.prime_indices]
    for j, slot in enumerate(idx.integer_indices):
        parts += [l * coordinate_turns(step, m + alphas[j]) for m, l in slot]
    return _frac(math.fsum(parts))


@dataclass(frozen=True)
class Phase:
    theta: float
    margin: float
    exact_degenerate: bool | None

    @property
    def degenerate(self) -> bool:
        if self.exact_degenerate is not None:
            return self.exact_degenerate
        return self.margin <= DEGENERACY_MARGIN


def phase_theta(idx: IndexVector, h: Step, alphas: Sequence[float] = ()) -> Phase:
    """theta = h*(sum k_p log p + sum l_m log(m + alpha)) and the margin |e^{-i theta} - 1|.

    With a PrimePartition in place of h and no integer part, degeneracy is also
    decided exactly: theta lies in 2*pi*Z iff prod p^k_p = (a/b)^r.
    """
    _check_alphas(idx, alphas)
    step = _step(h)
    parts = [k * math.log(p) for p, k in idx.prime_indices]
    for j, slot in enumerate(idx.integer_indices):
        parts += [l * math.log(m + alphas[j]) for m, l in slot]
    theta = step * math.fsum(parts)
    margin = 2 * abs(math.sin(math.pi * theta_turns(idx, h, alphas)))
    exact = None
    if isinstance(h, PrimePartition) and not any(idx.integer_indices):
        exact = h.exact_degeneracy(dict(idx.prime_indices)) is not None
    return Phase(theta, margin, exact)


def weyl_sum_direct(idx: IndexVector, h: Step, alphas: Sequence[float], N: int) -> complex:
    """(N+1)^-1 sum_{k=0}^N e^{-ik theta}, term by term with exact (fsum) accumulation."""
    if N < 0:
        raise DomainError("N must be >= 0")
    x = theta_turns(idx, h, alphas)
    k = np.arange(N + 1, dtype=float)
    turns = k * x
    turns -= np.floor(turns)
    ang = 2 * math.pi * turns
    re = math.fsum(np.cos(ang).tolist())
    im = -math.fsum(np.sin(ang).tolist())
    return complex(re, im) / (N + 1)


def weyl_sum_closed(idx: IndexVector, h: Step, alphas: Sequence[float], N: int) -> complex:
    """(N+1)^-1 (1 - e^{-i(N+1)theta})/(1 - e^{-i theta}); degenerate indices raise."""
    if N < 0:
        raise DomainError("N must be >= 0")
    ph = phase_theta(idx, h, alphas)
    if ph.degenerate:
        raise DegeneracyError(
            f"theta lies in 2*pi*Z (margin {ph.margin:.3g}): the character is trivial on the rotation"
        )
    x = theta_turns(idx, h, alphas)
    half = math.pi * x
    m = (N + 1) * x
    m -= math.floor(m)
    num = math.sin(math.pi * m)
    lead = complex(math.cos(2 * math.pi * _frac(N * x / 2)), -math.sin(2 * math.pi * _frac(N * x / 2)))
    # e^{-iN theta/2} sin((N+1)theta/2) / ((N+1) sin(theta/2)), sign fixed by the reduced turns
    sign = -1.0 if math.floor((N + 1) * x) % 2 else 1.0
    return lead * (sign * num) / ((N + 1) * math.sin(half))


def weyl_sum_multi(idx: IndexVector, h: Step, alphas: Sequence[float], N: int,
                   partition: PrimePartition | None = None, method: str = "closed") -> complex:
    """g_{Nh}, g_{Nr}, g_{Nhr}: Weyl sum of a character with r integer slots.

    When ``partition`` is given the prime part must be supported on P_h.
    """
    if partition is not None:
        bad = [p for p, _ in idx.prime_indices if p in partition.excised]
        if bad:
            raise DomainError(f"prime index supported on excised primes {bad}")
    if idx.is_zero:
        return 1.0 + 0j
    if method == "direct":
        return weyl_sum_direct(idx, h, alphas, N)
    return weyl_sum_closed(idx, partition if partition is not None and not any(idx.integer_indices) else h,
                           alphas, N)


def decay_bound(idx: IndexVector, h: Step, alphas: Sequence[float], N: int) -> float:
    """2/((N+1)*margin): the triangle-inequality bound on |g|."""
    ph = phase_theta(idx, h, alphas)
    return math.inf if ph.margin == 0 else 2.0 / ((N + 1) * ph.margin)


def prime_coordinate(p: int) -> int:
    return int(p)


def integer_coordinate(slot: int, m: int) -> int:
    return ((slot + 1) << _SLOT_SHIFT) | int(m)


def _stream(seed: int, coordinate: int) -> np.random.Philox:
    if seed < 0 or seed >= 1 << 64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    return np.random.Philox(key=(int(coordinate) << 64) | int(seed))


def coordinate_uniforms(seed: int, coordinate: int, count: int, start: int = 0) -> np.ndarray:
    """Draws start..start+count-1 of the uniform stream keyed by (seed, coordinate)."""
    bg = _stream(seed, coordinate)
    # Philox emits 4 doubles per counter step
    bg.advance(start // 4)
    gen = np.random.Generator(bg)
    return gen.random(count + start % 4)[start % 4:]


def haar_uniforms(primes: Sequence[int], integer_supports: Sequence[Sequence[int]], seed: int,
                  count: int, start: int = 0) -> tuple[np.ndarray, list[np.ndarray]]:
    """Uniforms (in turns) for every coordinate: shapes (P, count) and r x (M_j, count)."""
    pu = np.array([coordinate_uniforms(seed, prime_coordinate(p), count, start) for p in primes])
    iu = [np.array([coordinate_uniforms(seed, integer_coordinate(j, m), count, start) for m in ms])
          for j, ms in enumerate(integer_supports)]
    return pu.reshape(len(primes), count), iu


def _turns_to_phase(u: np.ndarray) -> np.ndarray:
    return np.exp(2j * math.pi * u)


def haar_sample(prime_support: Sequence[int], integer_supports: Sequence[Sequence[int]] = (),
                seed: int = 0, index: int = 0) -> TorusPoint:
    """The ``index``-th Haar-distributed torus point on the given support."""
    pu, iu = haar_uniforms(prime_support, integer_supports, seed, 1, index)
    prime = {int(p): complex(_turns_to_phase(pu[i, 0])) for i, p in enumerate(prime_support)}
    ints = [{int(m): complex(_turns_to_phase(iu[j][i, 0])) for i, m in enumerate(ms)}
            for j, ms in enumerate(integer_supports)]
    return TorusPoint(prime, ints)


def haar_batch(prime_support: Sequence[int], integer_supports: Sequence[Sequence[int]] = (),
               seed: int = 0, count: int = 1) -> list[TorusPoint]:
    pu, iu = haar_uniforms(prime_support, integer_supports, seed, count)
    pp = _turns_to_phase(pu)
    ip = [_turns_to_phase(u) for u in iu]
    out = []
    for c in range(count):
        prime = {int(p): complex(pp[i, c]) for i, p in enumerate(prime_support)}
        ints = [{int(m): complex(ip[j][i, c]) for i, m in enumerate(ms)} for j, ms in enumerate(integer_supports)]
        out.append(TorusPoint(prime, ints))
    return out


def rotate(omega: TorusPoint, h: Step, alphas: Sequence[float] = (), steps: int = 1,
           extra_primes: Sequence[int] = (), extra_integers: Sequence[Sequence[int]] = ()) -> TorusPoint:
    """Phi_h^steps: omega(p) -> omega(p) p^{-ih*steps}, omega_2(m) -> omega_2(m) (m+alpha)^{-ih*steps}.

    Coordinates listed in ``extra_*`` are added to the support (starting from 1).
    """
    if steps < 0:
        raise DomainError("steps must be >= 0")
    step = _step(h)
    if isinstance(h, PrimePartition):
        bad = [p for p, _ in omega.prime_phases if p in h.excised] + [p for p in extra_primes if p in h.excised]
        if bad:
            raise DomainError(f"torus of P_h has no coordinate at excised primes {bad}")
    if steps == 0 and not extra_primes and not any(extra_integers):
        return omega

    def turn(x: float) -> complex:
        t = _frac(steps * coordinate_turns(step, x))
        return complex(math.cos(2 * math.pi * t), -math.sin(2 * math.pi * t))

    primes = dict(omega.prime_phases)
    for p in extra_primes:
        primes.setdefault(int(p), 1 + 0j)
    new_p = {p: w * turn(p) for p, w in primes.items()}
    slots = max(len(omega.integer_phases), len(extra_integers))
    if slots > len(alphas):
        raise DomainError("rotation needs one alpha per integer slot")
    new_i = []
    for j in range(slots):
        cur = dict(omega.integer_phases[j]) if j < len(omega.integer_phases) else {}
        if j < len(extra_integers):
            for m in extra_integers[j]:
                cur.setdefault(int(m), 1 + 0j)
        new_i.append({m: w * turn(m + alphas[j]) for m, w in cur.items()})
    return TorusPoint(new_p, new_i)


def character_value(idx: IndexVector, omega: TorusPoint) -> complex:
    """chi(omega) = prod omega(p)^k_p prod omega_2j(m)^l_mj."""
    val = 1 + 0j
    for p, k in idx.prime_indices:
        val *= omega.prime(p) ** k
    for j, slot in enumerate(idx.integer_indices):
        for m, l in slot:
            val *= omega.integer(m, j) ** l
    return val


def ergodic_average(idx: IndexVector, omega: TorusPoint, h: Step, alphas: Sequence[float], N: int) -> complex:
    """(N+1)^-1 sum_k chi(Phi_h^k omega), each orbit point rotated independently."""
    vals = [character_value(idx, rotate(omega, h, alphas, k)) for k in range(N + 1)]
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals)) / (N + 1)


def random_index(rng: np.random.Generator, primes: Sequence[int], slots: int = 0, max_m: int = 10,
                 max_entry: int = 3, max_support: int = 3) -> IndexVector:
    """A random nonzero finite-support index (test and diagnostic helper)."""
    while True:
        n_p = rng.integers(0, max_support + 1)
        chosen = rng.choice(np.asarray(primes), size=min(n_p, len(primes)), replace=False)
        prime = {int(p): int(rng.integers(-max_entry, max_entry + 1)) for p in chosen}
        ints = []
        for _ in range(slots):
            n_m = rng.integers(0, max_support + 1)
            ms = rng.choice(max_m, size=n_m, replace=False)
            ints.append({int(m): int(rng.integers(-max_entry, max_entry + 1)) for m in ms})
        idx = IndexVector(prime, ints)
        if not idx.is_zero:
            return idx
