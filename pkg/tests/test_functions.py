from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetalab.errors import DomainError
from zetalab.functions import (
    CompactRegion,
    Exhaustion,
    Strip,
    TargetFunction,
    eval_target,
    rho_from_distances,
    rho_joint,
    rho_metric,
    sample_compact,
    sup_distance,
)


def keyset(points):
    return {(round(z.real, 9), round(z.imag, 9)) for z in points}


def test_degenerate_disk_is_single_point():
    g = sample_compact(CompactRegion.disk(0.8, 0.0), 0.01)
    assert g.points.tolist() == [0.8 + 0j]


def test_coarse_rectangle_gives_corners():
    r = CompactRegion.rectangle(0.6, 0.9, -0.1, 0.1)
    g = sample_compact(r, 10.0)
    assert len(g) == 4
    assert keyset(g.points) == keyset([0.6 - 0.1j, 0.6 + 0.1j, 0.9 - 0.1j, 0.9 + 0.1j])


def test_rectangle_lattice_count():
    r = CompactRegion.rectangle(0.6, 0.9, -0.1, 0.1)
    g = sample_compact(r, 0.05)
    # 7 abscissae by 5 ordinates; the boundary trace lies on the lattice here
    assert len(g) == 35
    assert r.contains(g.points).all()


@given(
    smin=st.floats(0.55, 0.7), w=st.floats(0.0, 0.25), tmin=st.floats(-1, 1), hgt=st.floats(0.0, 0.3),
    delta=st.floats(0.01, 0.2),
)
def test_rectangle_grid_properties(smin, w, tmin, hgt, delta):
    r = CompactRegion.rectangle(smin, smin + w, tmin, tmin + hgt)
    g = sample_compact(r, delta)
    assert r.contains(g.points).all()
    for corner in (complex(smin, tmin), complex(smin + w, tmin + hgt)):
        assert np.min(np.abs(g.points - corner)) <= 1e-9
    fine = sample_compact(r, delta / 2)
    assert keyset(g.points) <= keyset(fine.points)


@given(radius=st.floats(0.001, 0.1), delta=st.floats(0.002, 0.05))
def test_disk_grid_properties(radius, delta):
    d = CompactRegion.disk(0.8 + 0.1j, radius)
    g = sample_compact(d, delta)
    assert d.contains(g.points).all()
    fine = sample_compact(d, delta / 2)
    assert keyset(g.points) <= keyset(fine.points)
    # nearest-neighbour spacing along the boundary trace stays below delta
    edge = g.points[np.abs(np.abs(g.points - d.bounds[0]) - radius) < 1e-12]
    ang = np.sort(np.angle(edge - d.bounds[0]))
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * math.pi])) * radius
    assert gaps.max() <= delta + 1e-12


def test_refinement_never_decreases_sup_distance():
    d = CompactRegion.disk(0.75, 0.1)
    f = lambda s: np.exp(3 * s) * np.sin(7 * s)  # noqa: E731
    g = lambda s: 1 + s**2  # noqa: E731
    prev = 0.0
    for delta in (0.08, 0.04, 0.02, 0.01, 0.005):
        pts = sample_compact(d, delta).points
        cur = sup_distance(f(pts), g(pts))
        assert cur >= prev
        prev = cur


def test_sup_distance_examples():
    f = np.array([1, 2j, -3])
    assert sup_distance(f, f) == 0
    assert sup_distance(f, f + 0.3) == pytest.approx(0.3, abs=1e-15)
    assert sup_distance([1, 1j], [0, 0]) == 1
    with pytest.raises(DomainError):
        sup_distance([1, 2], [1])


def test_region_validation():
    with pytest.raises(DomainError):
        CompactRegion.disk(0.8, 0.3, Strip.D_T(10))
    with pytest.raises(DomainError):
        CompactRegion.rectangle(0.6, 0.5, 0, 1)
    CompactRegion.disk(0.8, 0.1, Strip.D_T(10))
    with pytest.raises(DomainError):
        sample_compact(CompactRegion.disk(0.8, 0.1), 0)


def test_target_examples():
    assert eval_target(TargetFunction.constant(1), 0.3 + 4j) == 1
    assert eval_target(TargetFunction.exp_polynomial([0]), 2j) == 1
    assert eval_target(TargetFunction.polynomial([1, 2]), 1j) == 1 + 2j
    tf = TargetFunction.sampled([0.7, 0.8 + 0.1j], [3, 4j])
    assert tf(0.8 + 0.1j) == 4j
    with pytest.raises(DomainError):
        tf(0.75)


def test_nonvanishing_certification():
    grid = sample_compact(CompactRegion.disk(0.8, 0.02), 0.01)
    with pytest.raises(DomainError):
        TargetFunction.constant(0).certify_nonvanishing(grid)
    with pytest.raises(DomainError):
        TargetFunction.polynomial([-0.8, 1]).certify_nonvanishing(grid)
    assert TargetFunction.exp_polynomial([-800, 1]).certify_nonvanishing(grid, margin=1.0) >= 0
    assert TargetFunction.polynomial([1, 1]).certify_nonvanishing(grid) > 1.7


def test_target_csv(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("# sampled target\nsigma,t,re,im\n0.7,0.0,1.5,-2\n0.8,0.1,0,1\n")
    tf = TargetFunction.from_csv(path)
    assert tf(0.7) == 1.5 - 2j
    assert tf(0.8 + 0.1j) == 1j


def test_exhaustion_nesting():
    ex = Exhaustion.of_strip(Strip.D_M(0.5, 2.0), levels=6)
    assert len(ex) == 6
    first = ex.levels[0].box()
    assert first[0] == pytest.approx(0.5 + 0.5 / 4)
    assert first[3] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        Exhaustion((ex.levels[1], ex.levels[0]), ex.ambient)


def test_rho_constant_gap():
    ex = Exhaustion.of_strip(Strip.D_M(0.5, 1.0), levels=8)
    c = 0.7
    r = rho_metric(lambda s: s**2, lambda s: s**2 + c, ex, delta=0.05)
    assert r.value == pytest.approx(c / (1 + c) * (1 - 2.0**-8), abs=1e-15)
    assert r.tail_bound == 2.0**-8
    assert rho_metric(np.sin, np.sin, ex, 0.05).value == 0


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=30))
def test_rho_below_one(dists):
    assert rho_from_distances(dists).value < 1


def test_rho_is_pseudometric_on_samples():
    rng = np.random.default_rng(11)
    levels, size = 10, 20
    for _ in range(500):
        f, g, h = (rng.normal(size=(levels, size)) + 1j * rng.normal(size=(levels, size)) for _ in range(3))
        scale = rng.uniform(0.01, 10)
        f, g, h = f * scale, g * scale, h
        d = lambda a, b: rho_from_distances([sup_distance(x, y) for x, y in zip(a, b)]).value  # noqa: E731
        assert d(f, g) == d(g, f)
        assert d(f, h) <= d(f, g) + d(g, h) + 1e-12


def test_joint_metric_is_max():
    a = rho_from_distances([0.1, 0.2])
    b = rho_from_distances([1.0, 3.0])
    assert rho_joint(a, b) == b.value
