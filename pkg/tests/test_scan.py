from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from statsmodels.stats.proportion import proportion_confint

from zetalab import scan as scan_mod
from zetalab.errors import DomainError, EvaluationFailure
from zetalab.euler import ZetaInstance
from zetalab.functions import CompactRegion, TargetFunction
from zetalab.hurwitz import ShiftedPeriodicHurwitz, hurwitz_zeta
from zetalab.primes import PrimePartition
from zetalab.scan import (
    ContinuousMode,
    HurwitzSlot,
    ScanConfig,
    continuous_scan,
    density_interval,
    discrete_scan,
    run_scan,
    self_target_config,
)

P21 = PrimePartition(2, 1)
DISK = CompactRegion.disk(0.8, 0.02)
ONE = TargetFunction.constant(1)


def make(eps=0.8, N=300, **kw):
    slots = kw.pop("slots", (HurwitzSlot(1 / math.pi, (1,), DISK, ONE),))
    return ScanConfig(ZetaInstance(), DISK, ONE, slots, eps, N, P21, **kw)


def test_huge_epsilon_hits_everything():
    res = discrete_scan(make(eps=1e9, N=50))
    assert res.density == 1 and res.hits == 51


def test_self_target_hits_at_zero():
    cfg = self_target_config(make(N=40))
    for eps in (1e-12, 1e-3, 1.0):
        res = discrete_scan(replace(cfg, epsilon=eps))
        assert 0 in res.hit_indices
        assert res.distances[0].max() == 0


def test_hits_monotone_in_epsilon():
    base = discrete_scan(make(eps=0.8))
    prev = set()
    for eps in (0.3, 0.6, 0.8, 1.2, 3.0):
        cur = set(discrete_scan(make(eps=eps)).hit_indices)
        assert prev <= cur
        prev = cur
    assert set(base.hit_indices) == set(discrete_scan(make(eps=0.8)).hit_indices)


def test_threads_do_not_change_results():
    cfg = make(N=400)
    a = run_scan(cfg, threads=1, chunk=37)
    b = run_scan(cfg, threads=3, chunk=37)
    assert np.array_equal(a.distances, b.distances, equal_nan=True)
    assert a.hit_indices == b.hit_indices


def test_infinite_slot_epsilon_removes_constraint():
    cfg = make(N=300)
    free = replace(cfg, slots=cfg.slots + (HurwitzSlot(1 / math.e, (1,), DISK, ONE, math.inf),))
    assert discrete_scan(free).hit_indices == discrete_scan(cfg).hit_indices


def test_continuous_grid_coincides_with_discrete():
    cfg = make(N=200)
    cont = replace(cfg, mode=ContinuousMode(200 * P21.h, P21.h))
    a = discrete_scan(cfg)
    b = continuous_scan(cont)
    assert a.hit_indices == b.hit_indices
    assert b.samples == 201


def test_continuous_single_step():
    cfg = replace(make(), mode=ContinuousMode(50.0, 50.0))
    res = continuous_scan(cfg)
    # the inclusive grid is {0, T}
    assert res.samples == 2
    assert res.density in (0, 0.5, 1)
    with pytest.raises(DomainError):
        discrete_scan(cfg)


def test_partition_off_uses_plain_zeta():
    cfg = make(N=5, excise=False)
    ev = scan_mod.ShiftEvaluator(cfg)
    z = ev.phi.shifted_points(3)
    assert np.allclose(ev.phi_at(3), [hurwitz_zeta(s) for s in z], atol=1e-9)
    on = scan_mod.ShiftEvaluator(make(N=5))
    assert np.allclose(on.phi_at(3), ev.phi_at(3) * (1 - 2.0 ** -z), atol=1e-9)


def test_wilson_interval():
    assert density_interval(0, 100)[0] == 0
    assert density_interval(100, 100)[1] == 1
    lo, hi = density_interval(50, 100)
    assert (round(lo, 3), round(hi, 3)) == (0.404, 0.596)
    for h, n in ((50, 100), (3, 1001), (17, 1001), (990, 1000)):
        ref = proportion_confint(h, n, alpha=0.05, method="wilson")
        assert np.allclose(density_interval(h, n), ref, atol=1e-12)


def test_validation():
    with pytest.raises(DomainError):
        make(slots=())
    with pytest.raises(DomainError):
        make(eps=0)
    with pytest.raises(DomainError):
        ScanConfig(ZetaInstance(), CompactRegion.disk(0.5, 0.02), ONE,
                   (HurwitzSlot(0.3, (1,), DISK, ONE),), 0.8, 10, P21)
    with pytest.raises(DomainError, match="non-vanishing"):
        ScanConfig(ZetaInstance(), DISK, TargetFunction.constant(0),
                   (HurwitzSlot(0.3, (1,), DISK, ONE),), 0.8, 10, P21)
    with pytest.raises(DomainError):
        HurwitzSlot(1.5, (1,), DISK, ONE)


def test_evaluation_failure_reports_index(monkeypatch):
    original = ShiftedPeriodicHurwitz.at

    def broken(self, k):
        if k == 5:
            raise FloatingPointError("boom")
        return original(self, k)

    monkeypatch.setattr(ShiftedPeriodicHurwitz, "at", broken)
    with pytest.raises(EvaluationFailure) as info:
        discrete_scan(make(N=10))
    assert info.value.k == 5
    assert info.value.exit_code == 8


def test_pole_proximity_skips(monkeypatch):
    monkeypatch.setattr(scan_mod, "POLE_SKIP_RADIUS", 1.0)
    slot = HurwitzSlot(0.5, (1,), CompactRegion.disk(0.99, 0.005), ONE)
    res = discrete_scan(make(eps=1e9, N=3, slots=(slot,)))
    assert res.skipped == [0]
    assert res.hits == 3


def test_throughput():
    res = discrete_scan(make(N=2000))
    assert res.telemetry["evaluations_per_second"] >= 1e4
