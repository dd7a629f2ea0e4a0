"""Command-line entry point: ``zetalab --config run.yaml --out results/``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import report
from .config import COMMANDS, Experiment, _int, _mapping, eval_complex, eval_real, parse_config, parse_sequence, parse_spec
from .errors import ConfigError, ZetaLabError
from .euler import phi_strip_eval
from .hurwitz import periodic_hurwitz_zeta
from .primes import primes_upto
from .scan import default_threads, run_scan
from .stats import distribution_compare, haar_twisted_sample, mean_square_statistic, orbit_sample, steuding_kappa
from .torus import IndexVector, decay_bound, phase_theta, weyl_sum_closed, weyl_sum_direct

log = logging.getLogger("zetalab")


def _tolerances(exp: Experiment) -> dict:
    out = {"degeneracy_margin": 1e-12, "pole_skip_radius": 1e-9}
    if "scan" in exp.raw:
        sc = exp.raw["scan"]
        out.update({"scan_tol": eval_real(sc.get("tol", 1e-10), "scan.tol"),
                    "grid_delta": eval_real(sc.get("delta", 0.01), "scan.delta")})
    if "eval" in exp.raw:
        out["eval_tol"] = eval_real(exp.raw["eval"].get("tol", 1e-12), "eval.tol")
    return out


def _declarations(exp: Experiment) -> dict:
    """Hypotheses recorded but never verified (transcendence, independence)."""
    decl = {"verified": False}
    decl.update(exp.hypotheses)
    alphas = exp.raw.get("hurwitz_slots") or []
    if alphas:
        decl.setdefault("alpha_declared", [str(s.get("alpha")) for s in alphas if isinstance(s, dict)])
    decl["lattice_constant"] = exp.lattice_constant
    return decl


def cmd_partition(exp: Experiment, out: Path, ctx: dict) -> dict:
    p = exp.partition
    if p is None:
        raise ConfigError("partition command needs a partition (a, b)", "partition")
    upto = _int((exp.raw.get("partition") or {}).get("list_upto", 50), "partition.list_upto", 2)
    rows = [(int(q), int(q in p.excised)) for q in primes_upto(upto)]
    report.write_csv(out / "detail.csv", ["p", "excised"], rows, f"primes up to {upto}; manifest={ctx['hash']}")
    return {"a": p.a, "b": p.b, "excised": list(p.excised), "h": p.h, "modulus": p.modulus}


def cmd_eval(exp: Experiment, out: Path, ctx: dict) -> dict:
    ev = exp.section("eval")
    pts_raw = ev.get("points")
    if not isinstance(pts_raw, list) or not pts_raw:
        raise ConfigError("points is a nonempty list of complex numbers", "eval.points")
    pts = [eval_complex(z, f"eval.points[{i}]") for i, z in enumerate(pts_raw)]
    tol = eval_real(ev.get("tol", 1e-12), "eval.tol")
    what = ev.get("function", "phi")
    if what == "phi":
        inst = exp.instance.with_partition(exp.partition)
        vals = [phi_strip_eval(inst, s, tol) for s in pts]
    elif what == "hurwitz":
        alpha = eval_real(ev.get("alpha", 1), "eval.alpha")
        B = parse_sequence(ev.get("B", [1]), "eval.B")
        vals = [periodic_hurwitz_zeta(s, alpha, B, tol) for s in pts]
    else:
        raise ConfigError("function is 'phi' or 'hurwitz'", "eval.function")
    rows = [(s.real, s.imag, v.real, v.imag, abs(v)) for s, v in zip(pts, vals)]
    report.write_csv(out / "detail.csv", ["sigma", "t", "re", "im", "abs"], rows, f"manifest={ctx['hash']}")
    return {"function": what, "points": pts, "values": vals, "tol": tol}


def cmd_scan(exp: Experiment, out: Path, ctx: dict) -> dict:
    cfg = exp.scan_config()
    res = run_scan(cfg, ctx["threads"])
    ctx["telemetry"] = res.telemetry
    header = ["k", "d_1"] + [f"d_2{j + 1}" for j in range(len(cfg.slots))] + ["hit"]
    hits = set(res.hit_indices)
    rows = ([k] + list(res.distances[k]) + [int(k in hits)] for k in range(res.samples))
    report.write_csv(out / "detail.csv", header, rows,
                     f"k = shift index, d = grid sup-distances, hit = all below eps; manifest={ctx['hash']}")
    report.emit_plot_data(res, "hit_timeline", out / "hit_timeline.csv", manifest_hash=ctx["hash"])
    report.emit_plot_data(res, "distance_histogram", out / "distance_histogram.csv", manifest_hash=ctx["hash"])
    lo, hi = res.interval()
    return {"hits": res.hits, "density": res.density, "density_interval_95": [lo, hi], "samples": res.samples,
            "mode": res.mode, "step": res.step, "epsilon": list(cfg.epsilons), "skipped": res.skipped,
            "hit_indices": res.hit_indices, "phi_grid_points": len(cfg.phi_grid),
            "note": "sup over compact sets approximated by a grid maximum (no interpolation)"}


def _index(raw, path: str) -> IndexVector:
    raw = _mapping(raw, path)
    primes = {_int(p, f"{path}.primes", 2): _int(k, f"{path}.primes[{p}]") for p, k in (raw.get("primes") or {}).items()}
    ints = [{_int(m, f"{path}.integers[{j}]", 0): _int(l, f"{path}.integers[{j}][{m}]") for m, l in (s or {}).items()}
            for j, s in enumerate(raw.get("integers") or [])]
    return IndexVector(primes, ints)


def cmd_weyl(exp: Experiment, out: Path, ctx: dict) -> dict:
    w = exp.section("weyl")
    idx = _index(w.get("index", {}), "weyl.index")
    h = exp.partition
    if h is None:
        raise ConfigError("weyl needs a partition (a, b) for h", "partition")
    alphas = exp.alphas()
    Ns = w.get("N", [100, 1000, 10000])
    Ns = [_int(n, "weyl.N", 0) for n in (Ns if isinstance(Ns, list) else [Ns])]
    ph = phase_theta(idx, h, alphas)
    vals = [weyl_sum_closed(idx, h, alphas, n) for n in Ns]
    direct = [weyl_sum_direct(idx, h, alphas, n) for n in Ns]
    bounds = [decay_bound(idx, h, alphas, n) for n in Ns]
    decay = report.WeylDecay(Ns, vals, bounds, ph.margin)
    report.emit_plot_data(decay, "weyl_decay", out / "weyl_decay.csv", manifest_hash=ctx["hash"])
    rows = [(n, v.real, v.imag, abs(v), abs(v - d), b) for n, v, d, b in zip(Ns, vals, direct, bounds)]
    report.write_csv(out / "detail.csv", ["N", "re", "im", "abs", "closed_minus_direct", "bound"], rows,
                     f"manifest={ctx['hash']}")
    return {"statistic": [abs(v) for v in vals], "bound": bounds, "margin": ph.margin, "theta": ph.theta,
            "N": Ns, "seed": exp.seed}


def cmd_dist(exp: Experiment, out: Path, ctx: dict) -> dict:
    d = exp.section("dist")
    if exp.partition is None:
        raise ConfigError("dist needs a partition (a, b)", "partition")
    inst = exp.instance.with_partition(exp.partition)
    s0 = eval_complex(d.get("s0", 0.8), "dist.s0")
    N = _int(d.get("N", 100000), "dist.N", 0)
    count = _int(d.get("haar_count", 10000), "dist.haar_count", 1)
    n = _int(d.get("n", 1000), "dist.n", 1)
    sigma1 = eval_real(d.get("sigma1", 2.0), "dist.sigma1")
    orbit = orbit_sample(inst, s0, exp.partition, N)
    haar = haar_twisted_sample(inst, s0, count, exp.seed, n, sigma1)
    cmp = distribution_compare(orbit, haar)
    orbit.to_csv(out / "orbit.csv")
    haar.to_csv(out / "haar.csv")
    report.emit_plot_data(haar, "distribution_scatter", out / "distribution_scatter.csv", manifest_hash=ctx["hash"])
    rows = [("energy", cmp.energy), ("ks_re", cmp.ks_re), ("ks_im", cmp.ks_im)]
    report.write_csv(out / "detail.csv", ["statistic", "value"], rows, f"HEURISTIC; manifest={ctx['hash']}")
    return {"statistic": cmp.energy, "ks_re": cmp.ks_re, "ks_im": cmp.ks_im, "label": cmp.label,
            "N": N, "haar_count": count, "n": n, "sigma1": sigma1, "seed": exp.seed, "s0": s0}


def cmd_meanvalue(exp: Experiment, out: Path, ctx: dict) -> dict:
    mv = exp.section("meanvalue")
    sigma0 = eval_real(mv.get("sigma0", 0.6), "meanvalue.sigma0")
    inst = exp.instance
    if mv.get("partitioned", False):
        inst = inst.with_partition(exp.partition)
    span = exp.span()
    res = mean_square_statistic(inst, sigma0, span)
    ratio = None if res.reference is None else res.statistic / res.reference
    rows = [("statistic", res.statistic), ("reference", res.reference), ("discrete_reference", res.discrete_reference),
            ("two_term", res.two_term), ("ratio", ratio)]
    report.write_csv(out / "detail.csv", ["quantity", "value"],
                     [(k, "" if v is None else v) for k, v in rows], f"manifest={ctx['hash']}")
    return {"statistic": res.statistic, "reference": res.reference, "discrete_reference": res.discrete_reference,
            "two_term": res.two_term, "ratio": ratio, "samples": res.samples, "sigma0": sigma0}


def cmd_kappa(exp: Experiment, out: Path, ctx: dict) -> dict:
    k = exp.section("kappa")
    spec = parse_spec(k.get("spec", "riemann"))
    xs = k.get("x", [10, 1000, 100000])
    xs = [_int(x, "kappa.x", 2) for x in (xs if isinstance(xs, list) else [xs])]
    vals = [steuding_kappa(spec, x) for x in xs]
    rows = [(x, int(primes_upto(x).size), v) for x, v in zip(xs, vals)]
    report.write_csv(out / "detail.csv", ["x", "pi_x", "kappa"], rows, f"manifest={ctx['hash']}")
    return {"spec": spec.name, "x": xs, "kappa": vals}


HANDLERS = {
    "partition": cmd_partition,
    "eval": cmd_eval,
    "scan": cmd_scan,
    "weyl": cmd_weyl,
    "dist": cmd_dist,
    "meanvalue": cmd_meanvalue,
    "kappa": cmd_kappa,
}


def run_command(name: str, exp: Experiment, out_dir, threads: int | None = None) -> dict:
    """Run one command, writing summary.json, detail.csv and manifest.json into ``out_dir``."""
    if name not in HANDLERS:
        raise ConfigError(f"unknown command {name!r}; choose from {', '.join(COMMANDS)}", "command")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    manifest = report.Manifest(
        config=exp.raw, command=name, seeds=[exp.seed], tolerances=_tolerances(exp), hypotheses=_declarations(exp)
    )
    ctx = {"hash": manifest.hash, "threads": threads or exp.threads or default_threads()}
    summary = HANDLERS[name](exp, out, ctx)
    summary = {"command": name, "manifest_hash": manifest.hash, **summary}
    report.write_json(out / "summary.json", summary)
    manifest.wall_seconds = time.perf_counter() - t0
    if "telemetry" in ctx:
        report.write_json(out / "telemetry.json", {"manifest_hash": manifest.hash, **ctx["telemetry"]})
    report.write_json(out / "manifest.json", manifest.as_dict())
    return summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zetalab", description="Shift-universality experiments for zeta-functions.")
    ap.add_argument("--config", required=True, help="YAML experiment description")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--seed", type=int, help="overrides the config seed (unsigned 64-bit)")
    ap.add_argument("--threads", type=int, help="worker threads (default: $ZETALAB_THREADS or CPU count)")
    ap.add_argument("--command", choices=COMMANDS, help="overrides the config command")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        exp = parse_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 1 << 64:
                raise ConfigError("seed must be an unsigned 64-bit integer", "--seed")
            exp = Experiment({**exp.raw, "seed": args.seed}, exp.base)
        name = args.command or exp.command
        if name is None:
            raise ConfigError("no command given (use --command or a 'command' key)", "command")
        summary = run_command(name, exp, args.out, args.threads)
        log.info("wrote %s", Path(args.out) / "summary.json")
        if "density" in summary:
            print(f"{name}: density {summary['density']:.6g} ({summary['hits']} hits)")
        else:
            print(f"{name}: ok")
        return 0
    except ZetaLabError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        if isinstance(exc, ConfigError) and exc.path:
            err["path"] = exc.path
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
