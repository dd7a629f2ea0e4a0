"""Shift scans: count k with sup_K |phi_h(s + ikh) - f_1(s)| < eps and likewise per Hurwitz slot."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy.stats import norm
from threadpoolctl import threadpool_limits

from .errors import DomainError, EvaluationFailure, PoleError
from .euler import ZetaInstance
from .functions import DEFAULT_DELTA, CompactRegion, SamplingGrid, Strip, TargetFunction, sample_compact
from .hurwitz import PeriodicSequence, ShiftedPeriodicHurwitz, _as_sequence
from .primes import PrimePartition

POLE_SKIP_RADIUS = 1e-9
# the strip 1/2 < Re s < 1 that hosts every scanned compact set
CRITICAL_STRIP = Strip(0.5, 1.0)


@dataclass(frozen=True)
class HurwitzSlot:
    """One Hurwitz coordinate: zeta(s, alpha; B) approximating ``target`` on ``region``.

    ``epsilon`` overrides the scan-wide tolerance for this slot; math.inf
    disables the slot's constraint.
    """

    alpha: float
    B: PeriodicSequence
    region: CompactRegion
    target: TargetFunction
    epsilon: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "B", _as_sequence(self.B))
        if not (0 < self.alpha <= 1):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class ContinuousMode:
    T: float
    step: float


@dataclass(frozen=True)
class ScanConfig:
    instance: ZetaInstance
    region: CompactRegion
    target: TargetFunction
    slots: tuple[HurwitzSlot, ...]
    epsilon: float
    N: int
    partition: PrimePartition
    mode: Union[str, ContinuousMode] = "discrete"
    delta: float = DEFAULT_DELTA
    phi_epsilon: float | None = None
    excise: bool = True
    tol: float = 1e-10
    certify_margin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if not self.slots:
            raise DomainError("a scan needs at least one Hurwitz slot (r >= 1)")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        for eps in [self.phi_epsilon] + [s.epsilon for s in self.slots]:
            if eps is not None and not eps > 0:
                raise DomainError("slot epsilon must be positive")
        if self.N < 0:
            raise DomainError("N must be >= 0")
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if isinstance(self.mode, ContinuousMode):
            if not (self.mode.T > 0 and self.mode.step > 0):
                raise DomainError("continuous mode needs T > 0 and step > 0")
        elif self.mode != "discrete":
            raise DomainError(f"unknown scan mode {self.mode!r}")
        for name, region in [("K_1", self.region)] + [(f"K_2{j + 1}", s.region) for j, s in enumerate(self.slots)]:
            if not region.inside(CRITICAL_STRIP):
                raise DomainError(f"{name} = {region.describe()} must lie inside 1/2 < Re s < 1")
        self.target.certify_nonvanishing(self.phi_grid, self.certify_margin)

    @property
    def phi_instance(self) -> ZetaInstance:
        return self.instance.with_partition(self.partition if self.excise else None)

    @property
    def phi_grid(self) -> SamplingGrid:
        return sample_compact(self.region, self.delta)

    def slot_grid(self, j: int) -> SamplingGrid:
        return sample_compact(self.slots[j].region, self.delta)

    @property
    def step(self) -> float:
        return self.mode.step if isinstance(self.mode, ContinuousMode) else self.partition.h

    @property
    def last_index(self) -> int:
        """Largest shift index: N, or the last tau-grid point <= T."""
        if isinstance(self.mode, ContinuousMode):
            return int(math.floor(self.mode.T / self.mode.step + 1e-12))
        return self.N

    @property
    def epsilons(self) -> np.ndarray:
        eps = [self.phi_epsilon if self.phi_epsilon is not None else self.epsilon]
        eps += [s.epsilon if s.epsilon is not None else self.epsilon for s in self.slots]
        return np.array(eps, dtype=float)


@dataclass
class ScanResult:
    hits: int
    density: float
    hit_indices: list[int]
    distances: np.ndarray
    skipped: list[int]
    samples: int
    step: float
    mode: str
    telemetry: dict = field(default_factory=dict)

    def interval(self, confidence: float = 0.95) -> tuple[float, float]:
        return density_interval(self.hits, self.samples, confidence)


class ShiftEvaluator:
    """Values of phi_h and each Hurwitz slot on the shifted grids K + ik*step."""

    def __init__(self, cfg: ScanConfig):
        self.cfg = cfg
        inst = cfg.phi_instance
        self.instance = inst
        last = cfg.last_index
        self.phi_points = cfg.phi_grid.points
        self.phi = ShiftedPeriodicHurwitz(self.phi_points, inst.alpha, inst.sequence, cfg.step, last, cfg.tol)
        self.slot_points = [cfg.slot_grid(j).points for j in range(len(cfg.slots))]
        self.slots = [
            ShiftedPeriodicHurwitz(pts, s.alpha, s.B, cfg.step, last, cfg.tol)
            for pts, s in zip(self.slot_points, cfg.slots)
        ]
        self.points_per_shift = self.phi_points.size + sum(p.size for p in self.slot_points)

    def pole_close(self, k: int) -> bool:
        evs = [self.phi] + self.slots
        return any(ev.pole_distance(k) < POLE_SKIP_RADIUS for ev in evs)

    def phi_at(self, k: int) -> np.ndarray:
        vals = self.phi.at(k)
        z = self.phi.shifted_points(k)
        for p in self.instance.excised:
            vals = vals * self.instance.local_factor(p, z)
        return vals

    def values(self, k: int) -> list[np.ndarray]:
        return [self.phi_at(k)] + [ev.at(k) for ev in self.slots]


def _targets(cfg: ScanConfig, ev: ShiftEvaluator) -> list[np.ndarray]:
    out = [np.asarray(cfg.target(ev.phi_points), dtype=complex)]
    out += [np.asarray(s.target(p), dtype=complex) for s, p in zip(cfg.slots, ev.slot_points)]
    return out


def _distances(ev: ShiftEvaluator, targets: list[np.ndarray], k: int) -> np.ndarray:
    if ev.pole_close(k):
        return np.full(len(targets), np.nan)
    try:
        vals = ev.values(k)
    except PoleError:
        return np.full(len(targets), np.nan)
    except Exception as exc:  # noqa: BLE001 - reported with the offending k
        raise EvaluationFailure(k, exc) from exc
    return np.array([np.max(np.abs(v - t)) for v, t in zip(vals, targets)])


def default_threads() -> int:
    env = os.environ.get("ZETALAB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def run_scan(cfg: ScanConfig, threads: int | None = None, chunk: int = 64) -> ScanResult:
    """Discrete or continuous scan; the result does not depend on ``threads``."""
    threads = threads or default_threads()
    t0 = time.perf_counter()
    ev = ShiftEvaluator(cfg)
    targets = _targets(cfg, ev)
    last = cfg.last_index
    blocks = [range(lo, min(last + 1, lo + chunk)) for lo in range(0, last + 1, chunk)]

    def work(block: range) -> np.ndarray:
        return np.stack([_distances(ev, targets, k) for k in block])

    # one BLAS thread per call keeps every product's summation order fixed
    with threadpool_limits(limits=1):
        if threads == 1:
            parts = [work(b) for b in blocks]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, blocks))
    dist = np.concatenate(parts) if parts else np.zeros((0, 1 + len(cfg.slots)))
    eps = cfg.epsilons
    skipped = np.flatnonzero(np.isnan(dist).any(axis=1))
    with np.errstate(invalid="ignore"):
        hit = np.all(dist < eps[None, :], axis=1) & ~np.isnan(dist).any(axis=1)
    hit_idx = np.flatnonzero(hit)
    samples = last + 1
    wall = time.perf_counter() - t0
    evals = ev.points_per_shift * (samples - skipped.size)
    mode = "continuous" if isinstance(cfg.mode, ContinuousMode) else "discrete"
    return ScanResult(
        hits=int(hit_idx.size),
        density=hit_idx.size / samples,
        hit_indices=hit_idx.tolist(),
        distances=dist,
        skipped=skipped.tolist(),
        samples=samples,
        step=cfg.step,
        mode=mode,
        telemetry={
            "wall_seconds": wall,
            "evaluations": int(evals),
            "evaluations_per_second": evals / wall if wall > 0 else math.inf,
            "threads": threads,
        },
    )


def discrete_scan(cfg: ScanConfig, threads: int | None = None) -> ScanResult:
    if cfg.mode != "discrete":
        raise DomainError("discrete_scan needs mode 'discrete'")
    return run_scan(cfg, threads)


def continuous_scan(cfg: ScanConfig, threads: int | None = None) -> ScanResult:
    """Scan over tau in {0, step, ..., <= T}; density is hits over grid size."""
    if not isinstance(cfg.mode, ContinuousMode):
        raise DomainError("continuous_scan needs a ContinuousMode")
    return run_scan(cfg, threads)


def self_target_config(cfg: ScanConfig) -> ScanConfig:
    """Targets replaced by the functions themselves sampled at zero shift."""
    zero = replace(cfg, N=0, mode="discrete")
    ev = ShiftEvaluator(zero)
    vals = ev.values(0)
    target = TargetFunction.sampled(ev.phi_points, vals[0])
    slots = tuple(replace(s, target=TargetFunction.sampled(p, v))
                  for s, p, v in zip(cfg.slots, ev.slot_points, vals[1:]))
    return replace(cfg, target=target, slots=slots)


def density_interval(hits: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a hit proportion."""
    if trials < 1 or not 0 <= hits <= trials:
        raise DomainError("need 0 <= hits <= trials and trials >= 1")
    if not 0 < confidence < 1:
        raise DomainError("confidence must lie in (0, 1)")
    z = norm.ppf(0.5 + confidence / 2)
    p = hits / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi
