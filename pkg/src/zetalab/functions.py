"""Compact regions in vertical strips, sampling grids, targets, and the metric rho."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

DEFAULT_DELTA = 0.01
DEFAULT_LEVELS = 20


@dataclass(frozen=True)
class Strip:
    """Open region {sigma_lo < Re s < sigma_hi, |Im s| < height}."""

    sigma_lo: float
    sigma_hi: float = 1.0
    height: float = math.inf
    name: str = ""

    def __post_init__(self):
        if not self.sigma_lo < self.sigma_hi:
            raise DomainError("strip needs sigma_lo < sigma_hi")
        if not self.height > 0:
            raise DomainError("strip height must be positive")

    @classmethod
    def D_M(cls, sigma0: float, M: float) -> "Strip":
        return cls(sigma0, 1.0, M, "D_M")

    @classmethod
    def D_T(cls, T: float) -> "Strip":
        return cls(0.5, 1.0, T, "D_T")

    @property
    def width(self) -> float:
        return self.sigma_hi - self.sigma_lo

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (z.real > self.sigma_lo) & (z.real < self.sigma_hi) & (np.abs(z.imag) < self.height)


@dataclass(frozen=True)
class CompactRegion:
    """A closed rectangle or disk, optionally tied to an ambient strip.

    Rectangle bounds are ``(sigma_min, sigma_max, t_min, t_max)``; a disk is
    ``(center, radius)``.  Both have connected complement.
    """

    shape: str
    bounds: tuple = ()
    ambient: Strip | None = None

    def __post_init__(self):
        if self.shape == "rectangle":
            smin, smax, tmin, tmax = (float(x) for x in self.bounds)
            if smin > smax or tmin > tmax:
                raise DomainError("empty rectangle")
            object.__setattr__(self, "bounds", (smin, smax, tmin, tmax))
        elif self.shape == "disk":
            center, radius = self.bounds
            if radius < 0:
                raise DomainError("disk radius must be non-negative")
            object.__setattr__(self, "bounds", (complex(center), float(radius)))
        else:
            raise DomainError(f"unknown region shape {self.shape!r}")
        if self.ambient is not None and not self.inside(self.ambient):
            raise DomainError(f"{self.describe()} is not contained in the open strip {self.ambient}")

    @classmethod
    def rectangle(cls, sigma_min, sigma_max, t_min, t_max, ambient: Strip | None = None) -> "CompactRegion":
        return cls("rectangle", (sigma_min, sigma_max, t_min, t_max), ambient)

    @classmethod
    def disk(cls, center, radius, ambient: Strip | None = None) -> "CompactRegion":
        return cls("disk", (center, radius), ambient)

    def box(self) -> tuple[float, float, float, float]:
        if self.shape == "rectangle":
            return self.bounds
        c, r = self.bounds
        return c.real - r, c.real + r, c.imag - r, c.imag + r

    def inside(self, strip: Strip) -> bool:
        smin, smax, tmin, tmax = self.box()
        return strip.sigma_lo < smin and smax < strip.sigma_hi and max(abs(tmin), abs(tmax)) < strip.height

    def contains(self, z, tol: float = 1e-12) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.shape == "rectangle":
            smin, smax, tmin, tmax = self.bounds
            return ((z.real >= smin - tol) & (z.real <= smax + tol)
                    & (z.imag >= tmin - tol) & (z.imag <= tmax + tol))
        c, r = self.bounds
        return np.abs(z - c) <= r + tol

    @property
    def diameter(self) -> float:
        if self.shape == "disk":
            return 2 * self.bounds[1]
        smin, smax, tmin, tmax = self.bounds
        return math.hypot(smax - smin, tmax - tmin)

    def describe(self) -> str:
        if self.shape == "disk":
            c, r = self.bounds
            return f"disk(center={c}, radius={r})"
        return "rectangle[{}, {}]x[{}, {}]".format(*self.bounds)


@dataclass(frozen=True)
class SamplingGrid:
    points: np.ndarray
    region: CompactRegion
    delta: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size


def _lattice(lo: float, hi: float, delta: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / delta + 1e-9))
    return lo + delta * np.arange(count + 1)


def _dedupe(points: np.ndarray, scale: float) -> np.ndarray:
    key = np.round(np.stack([points.real, points.imag], axis=1) / (scale * 1e-9))
    _, idx = np.unique(key, axis=0, return_index=True)
    return points[np.sort(idx)]


def sample_compact(region: CompactRegion, delta: float = DEFAULT_DELTA) -> SamplingGrid:
    """Deterministic grid: lattice anchored at the lower-left, clipped, plus a boundary trace.

    Lattice and boundary points are anchored so that halving ``delta`` always
    gives a superset of the coarser grid.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    if region.shape == "rectangle":
        smin, smax, tmin, tmax = region.bounds
        sig = np.unique(np.append(_lattice(smin, smax, delta), smax))
        ts = np.unique(np.append(_lattice(tmin, tmax, delta), tmax))
        inner = (_lattice(smin, smax, delta)[:, None] + 1j * _lattice(tmin, tmax, delta)[None, :]).ravel()
        edges = [sig + 1j * tmin, sig + 1j * tmax, smin + 1j * ts, smax + 1j * ts]
        pts = np.concatenate([inner, *edges])
    else:
        c, r = region.bounds
        if r == 0:
            pts = np.array([c])
        else:
            offs = _lattice(-math.floor(r / delta) * delta, r, delta)
            lat = (offs[:, None] + 1j * offs[None, :]).ravel()
            lat = c + lat[np.abs(lat) <= r]
            n = 4 * 2 ** max(0, math.ceil(math.log2(max(1.0, 2 * math.pi * r / (4 * delta)))))
            ang = 2 * math.pi * np.arange(n) / n
            pts = np.concatenate([lat, c + r * np.exp(1j * ang)])
    pts = _dedupe(pts, max(delta, region.diameter, 1e-300))
    pts = pts[np.lexsort((pts.imag, pts.real))]
    if pts.size == 0:
        raise DomainError(f"empty sampling grid for {region.describe()}")
    return SamplingGrid(pts, region, float(delta))


def sup_distance(f_vals, g_vals) -> float:
    f = np.asarray(f_vals, dtype=complex).ravel()
    g = np.asarray(g_vals, dtype=complex).ravel()
    if f.size != g.size:
        raise DomainError(f"length mismatch: {f.size} vs {g.size}")
    if f.size == 0:
        raise DomainError("sup_distance needs at least one value")
    return float(np.max(np.abs(f - g)))


def _horner(coeffs: Sequence[complex], s: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(s)
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


@dataclass(frozen=True)
class TargetFunction:
    """A target f(s): polynomial, exp of a polynomial, constant, or sampled values.

    Polynomial coefficients are in ascending order, c_0 + c_1 s + ...
    """

    kind: str
    coeffs: tuple[complex, ...] = ()
    grid: tuple[complex, ...] = ()
    values: tuple[complex, ...] = ()
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in ("polynomial", "exp_polynomial", "constant", "sampled"):
            raise DomainError(f"unknown target kind {self.kind!r}")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        object.__setattr__(self, "grid", tuple(complex(z) for z in self.grid))
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        if self.kind == "constant" and len(self.coeffs) != 1:
            raise DomainError("constant target takes exactly one value")
        if self.kind in ("polynomial", "exp_polynomial") and not self.coeffs:
            raise DomainError(f"{self.kind} target needs coefficients")
        if self.kind == "sampled" and len(self.grid) != len(self.values):
            raise DomainError("sampled target needs one value per grid point")
        object.__setattr__(self, "_lookup", {_key(z): v for z, v in zip(self.grid, self.values)})

    @classmethod
    def polynomial(cls, coeffs) -> "TargetFunction":
        return cls("polynomial", tuple(coeffs))

    @classmethod
    def exp_polynomial(cls, coeffs) -> "TargetFunction":
        return cls("exp_polynomial", tuple(coeffs))

    @classmethod
    def constant(cls, c) -> "TargetFunction":
        return cls("constant", (c,))

    @classmethod
    def sampled(cls, grid, values) -> "TargetFunction":
        return cls("sampled", grid=tuple(np.ravel(grid)), values=tuple(np.ravel(values)))

    @classmethod
    def from_csv(cls, path) -> "TargetFunction":
        """Rows of sigma, t, re, im; lines starting with '#' and a header row are skipped."""
        grid, values = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(line for line in fh if not line.lstrip().startswith("#")):
                if not row:
                    continue
                try:
                    sigma, t, re, im = (float(x) for x in row[:4])
                except ValueError:
                    if not grid:
                        continue  # header
                    raise DomainError(f"malformed target row {row!r} in {path}")
                grid.append(complex(sigma, t))
                values.append(complex(re, im))
        return cls.sampled(grid, values)

    def __call__(self, s):
        arr = np.asarray(s, dtype=complex)
        if self.kind == "constant":
            out = np.full(arr.shape, self.coeffs[0])
        elif self.kind == "polynomial":
            out = _horner(self.coeffs, arr)
        elif self.kind == "exp_polynomial":
            out = np.exp(_horner(self.coeffs, arr))
        else:
            flat = []
            for z in arr.ravel():
                try:
                    flat.append(self._lookup[_key(z)])
                except KeyError:
                    raise DomainError(f"sampled target queried off its grid at {z}") from None
            out = np.array(flat, dtype=complex).reshape(arr.shape)
        return complex(out) if arr.ndim == 0 else out

    def certify_nonvanishing(self, grid: SamplingGrid, margin: float = 0.0) -> float:
        """Grid minimum of |f|; raises unless it exceeds ``margin``.

        exp-polynomials never vanish and always pass.
        """
        low = float(np.min(np.abs(self(grid.points))))
        if self.kind == "exp_polynomial":
            return low
        if not low > margin:
            raise DomainError(
                f"target {self.kind}{self.coeffs or ''} is not certified non-vanishing: "
                f"grid minimum {low} <= margin {margin}"
            )
        return low


def _key(z: complex) -> tuple[int, int]:
    return round(z.real * 1e10), round(z.imag * 1e10)


def eval_target(target: TargetFunction, s):
    return target(s)


@dataclass(frozen=True)
class Exhaustion:
    """Nested compact rectangles K_1 c K_2 c ... c K_L inside a strip.

    Level l keeps a total horizontal margin of width/(l+1), split evenly
    between the two sides, and spans |t| <= height*l/(l+1).
    """

    levels: tuple[CompactRegion, ...]
    ambient: Strip

    def __post_init__(self):
        for inner, outer in zip(self.levels, self.levels[1:]):
            a, b = inner.box(), outer.box()
            if not (b[0] < a[0] and a[1] < b[1] and b[2] < a[2] and a[3] < b[3]):
                raise DomainError("exhaustion levels must be strictly nested")

    @classmethod
    def of_strip(cls, strip: Strip, levels: int = DEFAULT_LEVELS) -> "Exhaustion":
        if not math.isfinite(strip.height):
            raise DomainError("exhaustion needs a strip of finite height")
        out = []
        for l in range(1, levels + 1):
            margin = strip.width / (2 * (l + 1))
            t = strip.height * l / (l + 1)
            out.append(CompactRegion.rectangle(strip.sigma_lo + margin, strip.sigma_hi - margin, -t, t, strip))
        return cls(tuple(out), strip)

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class RhoValue:
    value: float
    tail_bound: float
    level_distances: tuple[float, ...]


Evaluable = Callable[[np.ndarray], np.ndarray]


def rho_metric(f: Evaluable, g: Evaluable, exhaustion: Exhaustion, delta: float = DEFAULT_DELTA) -> RhoValue:
    """sum_{l<=L} 2^-l d_l/(1+d_l), d_l the grid sup-distance on level l.

    The omitted tail is at most 2^-L and is reported alongside.
    """
    dists = []
    for region in exhaustion.levels:
        pts = sample_compact(region, delta).points
        dists.append(sup_distance(f(pts), g(pts)))
    return rho_from_distances(dists)


def rho_from_distances(dists: Sequence[float]) -> RhoValue:
    terms = [2.0 ** -(l + 1) * d / (1 + d) for l, d in enumerate(dists)]
    return RhoValue(math.fsum(terms), 2.0 ** -len(dists), tuple(float(d) for d in dists))


def rho_joint(*values: RhoValue) -> float:
    """Metric on a product space: the max of the coordinate metrics."""
    return max(v.value for v in values)
