from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from zetalab.cli import main, run_command
from zetalab.config import Experiment, emit_config, parse_config, parse_config_text
from zetalab.errors import ConfigError, DomainError
from zetalab.report import Manifest, dumps, emit_plot_data
from zetalab.scan import discrete_scan
from zetalab.stats import DistributionSample

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
command: scan
instance: {kind: riemann}
partition: {a: 2, b: 1}
phi: {region: {disk: {center: [0.8, 0], radius: 0.02}}}
hurwitz_slots:
  - {alpha: 1/pi, region: {disk: {center: [0.8, 0], radius: 0.02}}}
scan: {epsilon: 0.8, N: 30}
"""


def read_rows(path):
    with open(path) as fh:
        return [r for r in csv.reader(line for line in fh if not line.startswith("#"))]


def test_minimal_config_parses():
    exp = parse_config_text(MINIMAL)
    assert abs(exp.partition.h - 9.0647202837) < 1e-9
    assert exp.scan_config().epsilon == 0.8


def test_degenerate_partition_rejected():
    with pytest.raises(ConfigError, match="degenerate"):
        parse_config_text(MINIMAL.replace("{a: 2, b: 1}", "{a: 3, b: 3}"))


def test_zero_target_rejected():
    text = MINIMAL.replace("phi: {region:", "phi: {target: {constant: 0}, region:")
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.path == "phi.target"


def test_config_round_trip():
    exp = parse_config(CONFIGS / "universality.yaml")
    again = parse_config_text(emit_config(exp))
    assert again == exp


def run(tmp_path, text, *extra):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(text)
    out = tmp_path / "out"
    code = main(["--config", str(cfg), "--out", str(out), *extra])
    return code, out


def test_partition_command(tmp_path):
    code, out = run(tmp_path, "command: partition\npartition: {a: 6, b: 5}\n")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["excised"] == [2, 3, 5]
    assert summary["h"] > 0


def test_eval_command(tmp_path):
    code, out = run(tmp_path, "command: eval\ninstance: {kind: riemann}\neval: {points: [2]}\n")
    assert code == 0
    val = json.loads((out / "summary.json").read_text())["values"][0]
    assert abs(complex(val["re"], val["im"]) - 1.6449340668) < 1e-10
    rows = read_rows(out / "detail.csv")
    assert abs(float(rows[1][2]) - 1.6449340668) < 1e-10


def test_scan_command_all_hits(tmp_path):
    code, out = run(tmp_path, MINIMAL.replace("epsilon: 0.8", "epsilon: 1e9"), "--threads", "2")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["density"] == 1.0
    rows = read_rows(out / "hit_timeline.csv")
    assert rows[0] == ["k", "hit"]
    assert all(r[1] == "1" for r in rows[1:]) and len(rows) == 32
    assert (out / "manifest.json").exists() and (out / "telemetry.json").exists()


def test_exit_codes(tmp_path, capsys):
    code, _ = run(tmp_path, MINIMAL.replace("{a: 2, b: 1}", "{a: 3, b: 3}"))
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError" and "degenerate" in err["message"]
    code, _ = run(tmp_path, "command: eval\ninstance: {kind: riemann}\neval: {points: [1]}\n")
    assert code == 4
    code, _ = run(tmp_path, "command: eval\ninstance: {kind: riemann}\neval: {points: [[0.3, 1]]}\n")
    assert code == 3
    code = main(["--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)])
    assert code == 2


def test_summaries_are_byte_identical(tmp_path):
    exp = parse_config_text(MINIMAL)
    run_command("scan", exp, tmp_path / "a", threads=1)
    run_command("scan", exp, tmp_path / "b", threads=3)
    for name in ("summary.json", "detail.csv", "hit_timeline.csv", "distance_histogram.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert ma["content_hash"] == mb["content_hash"]


def test_manifest_hash_ignores_wall_time():
    m1 = Manifest({"x": 1}, "scan", [1], {}, {}, wall_seconds=1.0)
    m2 = Manifest({"x": 1}, "scan", [1], {}, {}, wall_seconds=99.0)
    assert m1.hash == m2.hash
    assert Manifest({"x": 2}, "scan", [1], {}, {}).hash != m1.hash


def test_floats_keep_seventeen_digits():
    x = 0.1 + 0.2
    text = dumps({"v": x})
    assert "0.30000000000000004" in text
    assert float(json.loads(text)["v"]) == x


def test_plot_data(tmp_path):
    exp = parse_config_text(MINIMAL.replace("epsilon: 0.8", "epsilon: 1e9"))
    res = discrete_scan(exp.scan_config())
    emit_plot_data(res, "hit_timeline", tmp_path / "h.csv")
    assert {r[1] for r in read_rows(tmp_path / "h.csv")[1:]} == {"1"}
    sample = DistributionSample(np.arange(17) * (1 + 1j), {})
    emit_plot_data(sample, "distribution_scatter", tmp_path / "d.csv")
    assert len(read_rows(tmp_path / "d.csv")) == 18
    with pytest.raises(DomainError):
        emit_plot_data(sample, "hit_timeline", tmp_path / "x.csv")


def test_weyl_decay_rows(tmp_path):
    code, out = run(tmp_path, (CONFIGS / "weyl.yaml").read_text())
    assert code == 0
    rows = read_rows(out / "weyl_decay.csv")[1:]
    g = [float(r[1]) for r in rows]
    assert len(rows) == 3 and g[0] > g[1] > g[2]


@pytest.mark.parametrize("name", ["partition", "eval", "weyl", "kappa", "meanvalue"])
def test_shipped_configs_run(tmp_path, name):
    code = main(["--config", str(CONFIGS / f"{name}.yaml"), "--out", str(tmp_path)])
    assert code == 0


def test_seed_override(tmp_path):
    exp = parse_config(CONFIGS / "dist.yaml")
    assert isinstance(exp, Experiment) and exp.seed == 42
