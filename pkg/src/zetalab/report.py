"""Result files: 17-digit JSON, content-hashed manifests, CSV detail and plot data."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import DomainError
from .scan import ScanResult
from .stats import DistributionSample

TOOL_VERSION = "0.1.0"


def _float_token(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    tok = format(x, ".17g")
    return tok if any(c in tok for c in ".e") else tok + ".0"


def to_plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, complex numbers and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON with every float written to 17 significant digits; keys sorted."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(o[k], level + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, float):
            return _float_token(o)
        return json.dumps(o)

    return enc(to_plain(obj), 0) + "\n"


def content_hash(obj: Any) -> str:
    return hashlib.sha256(dumps(obj).encode()).hexdigest()


@dataclass
class Manifest:
    config: dict
    command: str
    seeds: list
    tolerances: dict
    hypotheses: dict
    wall_seconds: float = 0.0
    tool_version: str = TOOL_VERSION

    def deterministic_part(self) -> dict:
        return {
            "config": self.config,
            "command": self.command,
            "seeds": self.seeds,
            "tolerances": self.tolerances,
            "hypotheses": self.hypotheses,
            "tool_version": self.tool_version,
        }

    @property
    def hash(self) -> str:
        """Content hash over everything except the wall time."""
        return content_hash(self.deterministic_part())

    def as_dict(self) -> dict:
        out = self.deterministic_part()
        out["wall_seconds"] = self.wall_seconds
        out["content_hash"] = self.hash
        return out


def write_json(path: Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def write_csv(path: Path, header: Sequence[str], rows, comment: str = "") -> None:
    """Plain CSV with a header row; ``comment`` becomes a leading '#' line."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return _float_token(float(v))
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    return v


@dataclass
class WeylDecay:
    """|g| of one index at several N, with the matching decay bounds."""

    N: list[int]
    values: list[complex]
    bounds: list[float]
    margin: float


PLOT_KINDS = ("hit_timeline", "distance_histogram", "weyl_decay", "distribution_scatter")


def emit_plot_data(result, kind: str, path, bins: int = 50, manifest_hash: str = "") -> Path:
    """Write plot-ready CSV for a result; the kind must match the result type."""
    path = Path(path)
    tag = f" manifest={manifest_hash}" if manifest_hash else ""
    if kind not in PLOT_KINDS:
        raise DomainError(f"unknown plot kind {kind!r}")
    if kind in ("hit_timeline", "distance_histogram") and not isinstance(result, ScanResult):
        raise DomainError(f"{kind} needs a ScanResult, got {type(result).__name__}")
    if kind == "weyl_decay" and not isinstance(result, WeylDecay):
        raise DomainError(f"weyl_decay needs a WeylDecay, got {type(result).__name__}")
    if kind == "distribution_scatter" and not isinstance(result, DistributionSample):
        raise DomainError(f"distribution_scatter needs a DistributionSample, got {type(result).__name__}")

    if kind == "hit_timeline":
        eps_hit = set(result.hit_indices)
        rows = [(k, int(k in eps_hit)) for k in range(result.samples)]
        write_csv(path, ["k", "hit"], rows, f"columns: k = shift index, hit = 1 if all slot distances < eps{tag}")
    elif kind == "distance_histogram":
        rows = []
        for j in range(result.distances.shape[1]):
            d = result.distances[:, j]
            d = d[np.isfinite(d)]
            if d.size == 0:
                continue
            counts, edges = np.histogram(d, bins=bins)
            name = "d_1" if j == 0 else f"d_2{j}"
            rows += [(name, edges[i], edges[i + 1], int(counts[i])) for i in range(counts.size)]
        write_csv(path, ["slot", "bin_lo", "bin_hi", "count"], rows,
                  f"columns: slot, histogram bin edges of the sup-distance, count{tag}")
    elif kind == "weyl_decay":
        rows = [(n, abs(v), b) for n, v, b in zip(result.N, result.values, result.bounds)]
        write_csv(path, ["N", "abs_g", "bound"], rows,
                  f"columns: N, |g_N| of the index, bound 2/((N+1)*margin) with margin={_float_token(result.margin)}{tag}")
    else:
        rows = [(z.real, z.imag) for z in result.values]
        write_csv(path, ["re", "im"], rows, f"columns: real and imaginary part of each sample value (HEURISTIC){tag}")
    return path
