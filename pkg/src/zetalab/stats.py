"""Value distributions along shift orbits and under Haar twists, mean squares, kappa.

The distribution comparisons are HEURISTIC: they compare point evaluations at a
single s_0, not measures on a function space.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp
from scipy import stats as sps

from .errors import DomainError
from .euler import EulerProductSpec, ZetaInstance, expand_dirichlet_coefficients
from .hurwitz import hurwitz_zeta, progression_periodic_hurwitz
from .primes import PrimePartition, prime_count, primes_upto
from .torus import haar_uniforms
from .twisted import DEFAULT_SIGMA1, v1, weight_cutoff

PROJECTIONS = 180
_CHUNK = 512


@dataclass(frozen=True)
class DistributionSample:
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).ravel()
        if vals.size == 0:
            raise DomainError("distribution sample must be nonempty")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            prov = " ".join(f"{k}={v}" for k, v in self.provenance.items())
            fh.write(f"# provenance: {prov}\n")
            w = csv.writer(fh)
            w.writerow(["re", "im"])
            for z in self.values:
                w.writerow([repr(float(z.real)), repr(float(z.imag))])

    @classmethod
    def from_csv(cls, path) -> "DistributionSample":
        prov = {}
        rows = []
        with open(path, newline="") as fh:
            for line in fh:
                if line.startswith("# provenance:"):
                    for item in line.split(":", 1)[1].split():
                        k, _, v = item.partition("=")
                        prov[k] = v
                elif line.strip() and not line.startswith("re,"):
                    re, im = line.strip().split(",")
                    rows.append(complex(float(re), float(im)))
        return cls(np.array(rows), prov)


def _step_of(h) -> float:
    return h.h if isinstance(h, PrimePartition) else float(h)


def phi_progression(instance: ZetaInstance, s0: complex, step: float, count: int, tol: float = 1e-10) -> np.ndarray:
    """phi_h(s0 + i*k*step) for k = 0..count-1."""
    s0 = complex(s0)
    if s0.real <= 0.5:
        raise DomainError("orbit evaluation requires Re(s0) > 1/2")
    vals = progression_periodic_hurwitz(s0, instance.alpha, instance.sequence, step, count, tol)
    z = s0 + 1j * step * np.arange(count)
    for p in instance.excised:
        vals = vals * instance.local_factor(p, z)
    return vals


def orbit_sample(instance: ZetaInstance, s0: complex, h, N: int, tol: float = 1e-10) -> DistributionSample:
    """phi_h(s0 + ikh), k = 0..N."""
    vals = phi_progression(instance, s0, _step_of(h), N + 1, tol)
    return DistributionSample(vals, {"kind": "shift_orbit", "s0": complex(s0), "h": _step_of(h), "N": N})


def _exponent_matrix(ks: np.ndarray, primes: np.ndarray) -> sp.csr_matrix:
    """Sparse v_p(k) for the rows ks and columns primes."""
    pos = {int(k): i for i, k in enumerate(ks)}
    rows, cols, data = [], [], []
    K = int(ks.max())
    for j, p in enumerate(primes.tolist()):
        mult = np.arange(p, K + 1, p)
        exp = np.ones(mult.size, dtype=np.int64)
        pe = p * p
        while pe <= K:
            exp += (mult % pe == 0)
            pe *= p
        keep = [(pos[m], e) for m, e in zip(mult.tolist(), exp.tolist()) if m in pos]
        for r, e in keep:
            rows.append(r)
            cols.append(j)
            data.append(e)
    return sp.csr_matrix((data, (rows, cols)), shape=(ks.size, primes.size), dtype=float)


def haar_twisted_sample(instance: ZetaInstance, s0: complex, count: int, seed: int, n: int = 1000,
                        sigma1: float = DEFAULT_SIGMA1) -> DistributionSample:
    """Weighted truncation phi_{h,n}(s0, omega) at ``count`` Haar points omega.

    Sample j uses draw j of every prime coordinate's stream, so it does not
    depend on ``count``.
    """
    s0 = complex(s0)
    K = weight_cutoff(n, sigma1)
    coeffs = expand_dirichlet_coefficients(instance.spec, instance.partition, K)
    ks = np.flatnonzero(coeffs)
    ks = ks[ks >= 1]
    w = coeffs[ks] * v1(ks, n, sigma1) * np.exp(-s0 * np.log(ks.astype(float)))
    primes = primes_upto(K)
    primes = primes[~np.isin(primes, instance.excised)]
    E = _exponent_matrix(ks, primes)
    U, _ = haar_uniforms(primes.tolist(), [], seed, count)
    out = np.empty(count, dtype=complex)
    for lo in range(0, count, _CHUNK):
        hi = min(count, lo + _CHUNK)
        turns = E @ U[:, lo:hi]
        out[lo:hi] = w @ np.exp(2j * math.pi * turns)
    prov = {"kind": "haar", "s0": s0, "seed": seed, "count": count, "n": n, "sigma1": sigma1}
    return DistributionSample(out, prov)


def energy_distance_2d(a, b, directions: int = PROJECTIONS) -> float:
    """Energy distance 2E|X-Y| - E|X-X'| - E|Y-Y'| for planar samples.

    Uses |z| = (pi/2) * mean over directions u of |<u, z>|, so the statistic is
    an average of one-dimensional energy distances of projections.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    angles = math.pi * (np.arange(directions) + 0.5) / directions
    acc = []
    for phi in angles:
        u = np.cos(phi) * a.real + np.sin(phi) * a.imag
        v = np.cos(phi) * b.real + np.sin(phi) * b.imag
        acc.append(sps.energy_distance(u, v) ** 2)
    return (math.pi / 2) * math.fsum(acc) / directions


def energy_distance_exact(a, b) -> float:
    """O(n*m) pairwise version of :func:`energy_distance_2d` for small samples."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    xy = np.abs(a[:, None] - b[None, :]).mean()
    xx = np.abs(a[:, None] - a[None, :]).mean()
    yy = np.abs(b[:, None] - b[None, :]).mean()
    return 2 * xy - xx - yy


@dataclass(frozen=True)
class Comparison:
    energy: float
    ks_re: float
    ks_im: float
    label: str = "HEURISTIC"


def distribution_compare(a, b, directions: int = PROJECTIONS) -> Comparison:
    av = a.values if isinstance(a, DistributionSample) else np.asarray(a, dtype=complex)
    bv = b.values if isinstance(b, DistributionSample) else np.asarray(b, dtype=complex)
    if av.size == 0 or bv.size == 0:
        raise DomainError("both samples must be nonempty")
    return Comparison(
        energy_distance_2d(av, bv, directions),
        float(sps.ks_2samp(av.real, bv.real).statistic),
        float(sps.ks_2samp(av.imag, bv.imag).statistic),
    )


@dataclass(frozen=True)
class ContinuousSpan:
    T: float
    step: float = 0.05


@dataclass(frozen=True)
class DiscreteSpan:
    h: Union[float, PrimePartition]
    N: int


@dataclass(frozen=True)
class MeanSquare:
    statistic: float
    reference: float | None
    discrete_reference: float | None = None
    two_term: float | None = None
    samples: int = 0


def aliased_reference(instance: ZetaInstance, sigma: float, partition: PrimePartition) -> float:
    """Limit of the discrete mean of |phi(sigma + ikh)|^2 when e^{2 pi/h} = a/b.

    Pairs m, n with n/m = (a/b)^r survive the average over k, so the limit is
    D(2 sigma) (1 + 2 Re(z/(1-z))) with z = a(b) conj(a(a)) (ab)^{-sigma}.
    """
    D = instance.mean_square_reference(sigma)
    a, b = partition.a, partition.b
    z = instance.coefficient(b) * np.conj(instance.coefficient(a)) * (a * b) ** (-sigma)
    return float(D * (1 + 2 * (z / (1 - z)).real))


def riemann_two_term(sigma: float, T: float) -> float:
    """T^-1 int_0^T |zeta(sigma+it)|^2 dt to second order, for 1/2 < sigma < 1."""
    second = (2 * math.pi) ** (2 * sigma - 1) * hurwitz_zeta(2 - 2 * sigma).real / (2 - 2 * sigma)
    return hurwitz_zeta(2 * sigma).real + second * T ** (1 - 2 * sigma)


def mean_square_statistic(instance: ZetaInstance, sigma0: float,
                          span: Union[ContinuousSpan, DiscreteSpan], tol: float = 1e-10) -> MeanSquare:
    """Continuous (trapezoid) or discrete mean of |phi(sigma0 + it)|^2."""
    if sigma0 <= 0.5:
        raise DomainError("mean square requires sigma0 > 1/2")
    ref = instance.mean_square_reference(sigma0) if sigma0 > instance.sigma_star else None
    if isinstance(span, ContinuousSpan):
        if not (span.T > 0 and span.step > 0):
            raise DomainError("continuous span needs T > 0 and step > 0")
        K = max(1, math.ceil(span.T / span.step - 1e-9))
        step = span.T / K
        sq = np.abs(phi_progression(instance, sigma0, step, K + 1, tol)) ** 2
        stat = step * (math.fsum(sq.tolist()) - 0.5 * (sq[0] + sq[-1])) / span.T
        two = None
        if instance.kind == "riemann" and not instance.excised and sigma0 < 1:
            two = riemann_two_term(sigma0, span.T)
        return MeanSquare(float(stat), ref, None, two, K + 1)
    if span.N < 0:
        raise DomainError("N must be >= 0")
    sq = np.abs(phi_progression(instance, sigma0, _step_of(span.h), span.N + 1, tol)) ** 2
    stat = math.fsum(sq.tolist()) / (span.N + 1)
    alias = aliased_reference(instance, sigma0, span.h) if isinstance(span.h, PrimePartition) else ref
    return MeanSquare(float(stat), ref, alias, None, span.N + 1)


def steuding_kappa(spec: EulerProductSpec, x: int) -> float:
    """pi(x)^-1 sum_{p<=x} |a(p)|^2 with a(p) the sum of the roots of exponent 1."""
    if x < 2:
        raise DomainError("x must be >= 2")
    primes = primes_upto(int(x))
    a, f = spec.root_table(primes)
    ap = np.where(f == 1, a, 0).sum(axis=1)
    return math.fsum((np.abs(ap) ** 2).tolist()) / prime_count(int(x))
