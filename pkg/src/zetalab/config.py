"""YAML experiment descriptions: parsing, validation, and re-emission."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, ZetaLabError
from .euler import EulerProductSpec, ZetaInstance
from .functions import CompactRegion, TargetFunction
from .hurwitz import PeriodicSequence
from .primes import PrimePartition
from .scan import ContinuousMode, HurwitzSlot, ScanConfig
from .stats import ContinuousSpan, DiscreteSpan

COMMANDS = ("partition", "eval", "scan", "weyl", "dist", "meanvalue", "kappa")
LATTICE_CONSTANTS = ("2pi/h", "pi/h")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}


def eval_real(expr: Any, path: str) -> float:
    """A number, or an arithmetic expression in pi and e such as "1/pi"."""
    if isinstance(expr, bool):
        raise ConfigError("expected a number", path)
    if isinstance(expr, (int, float)):
        return float(expr)
    if not isinstance(expr, str):
        raise ConfigError(f"expected a number or expression, got {type(expr).__name__}", path)
    text = expr.strip()
    if text.lower() in ("inf", ".inf", "infinity"):
        return math.inf

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigError(f"unsupported expression {text!r}", path)

    try:
        return walk(ast.parse(text, mode="eval"))
    except SyntaxError:
        raise ConfigError(f"cannot parse {text!r}", path) from None
    except ZeroDivisionError:
        raise ConfigError(f"division by zero in {text!r}", path) from None


def eval_complex(value: Any, path: str) -> complex:
    """[re, im], {re:, im:}, a number, or a Python complex literal string."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("complex numbers are written [re, im]", path)
        return complex(eval_real(value[0], path + "[0]"), eval_real(value[1], path + "[1]"))
    if isinstance(value, dict):
        return complex(eval_real(value.get("re", 0), path + ".re"), eval_real(value.get("im", 0), path + ".im"))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            return complex(eval_real(value, path))
    return complex(eval_real(value, path))


def _int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool):
        raise ConfigError("expected an integer", path)
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, str):
        try:
            value = int(value)
        except ValueError:
            raise ConfigError(f"expected an integer, got {value!r}", path) from None
    if not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}", path)
    return value


def _mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError("expected a mapping", path)
    return value


def _guard(path: str, fn, *args):
    """Run a constructor and attach ``path`` to any domain error it raises."""
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (ZetaLabError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from exc


def parse_region(raw: Any, path: str) -> CompactRegion:
    raw = _mapping(raw, path)
    if "disk" in raw:
        d = _mapping(raw["disk"], path + ".disk")
        center = eval_complex(d.get("center"), path + ".disk.center")
        radius = eval_real(d.get("radius"), path + ".disk.radius")
        return _guard(path, CompactRegion.disk, center, radius)
    if "rectangle" in raw:
        r = raw["rectangle"]
        if not isinstance(r, (list, tuple)) or len(r) != 4:
            raise ConfigError("rectangle is [sigma_min, sigma_max, t_min, t_max]", path + ".rectangle")
        vals = [eval_real(x, f"{path}.rectangle[{i}]") for i, x in enumerate(r)]
        return _guard(path, CompactRegion.rectangle, *vals)
    raise ConfigError("region needs 'disk' or 'rectangle'", path)


def parse_target(raw: Any, path: str, base: Path | None = None) -> TargetFunction:
    raw = _mapping(raw, path)
    if len(raw) != 1:
        raise ConfigError("target has exactly one of constant, polynomial, exp_polynomial, csv", path)
    kind, val = next(iter(raw.items()))
    if kind == "constant":
        return TargetFunction.constant(eval_complex(val, path + ".constant"))
    if kind in ("polynomial", "exp_polynomial"):
        if not isinstance(val, list) or not val:
            raise ConfigError("coefficients are a nonempty list, lowest degree first", f"{path}.{kind}")
        coeffs = [eval_complex(c, f"{path}.{kind}[{i}]") for i, c in enumerate(val)]
        return TargetFunction(kind, tuple(coeffs))
    if kind == "csv":
        p = Path(val)
        if base is not None and not p.is_absolute():
            p = base / p
        if not p.exists():
            raise ConfigError(f"target file {p} not found", path + ".csv")
        return _guard(path, TargetFunction.from_csv, p)
    raise ConfigError(f"unknown target kind {kind!r}", path)


def parse_instance(raw: Any, path: str = "instance") -> ZetaInstance:
    raw = _mapping(raw or {"kind": "riemann"}, path)
    kind = raw.get("kind", "riemann")
    if kind == "riemann":
        return ZetaInstance()
    if kind == "dirichlet":
        chars = raw.get("character")
        if not isinstance(chars, list):
            raise ConfigError("dirichlet instance needs character: [chi(0), ..., chi(q-1)]", path + ".character")
        vals = tuple(eval_complex(c, f"{path}.character[{i}]") for i, c in enumerate(chars))
        return _guard(path, ZetaInstance, "dirichlet", vals)
    raise ConfigError(f"unknown instance kind {kind!r}", path + ".kind")


def parse_spec(raw: Any, path: str = "kappa.spec") -> EulerProductSpec:
    if isinstance(raw, str):
        if raw == "riemann":
            return EulerProductSpec.riemann()
        if raw.startswith("divisor-"):
            return _guard(path, EulerProductSpec.divisor, _int(raw.split("-", 1)[1], path, 1))
        raise ConfigError(f"unknown spec name {raw!r}", path)
    raw = _mapping(raw, path)
    roots = raw.get("roots", [[1, 1]])
    if not isinstance(roots, list):
        raise ConfigError("roots is a list of [a, f] pairs", path + ".roots")
    pairs = []
    for i, r in enumerate(roots):
        if not isinstance(r, list) or len(r) != 2:
            raise ConfigError("each root is [a, f]", f"{path}.roots[{i}]")
        pairs.append((eval_complex(r[0], f"{path}.roots[{i}][0]"), _int(r[1], f"{path}.roots[{i}][1]", 1)))
    return _guard(path, lambda: EulerProductSpec(
        default_roots=tuple(pairs),
        growth_alpha=eval_real(raw.get("growth_alpha", 0), path + ".growth_alpha"),
        growth_beta=eval_real(raw.get("growth_beta", 0), path + ".growth_beta"),
        c1=eval_real(raw.get("c1", len(pairs)), path + ".c1"),
        name=str(raw.get("name", "custom")),
    ))


def parse_partition(raw: Any, path: str = "partition") -> PrimePartition:
    raw = _mapping(raw, path)
    if "a" not in raw or "b" not in raw:
        raise ConfigError("partition needs integers a and b (h is derived as 2*pi/log(a/b))", path)
    a = _int(raw["a"], path + ".a")
    b = _int(raw["b"], path + ".b")
    return _guard(path, PrimePartition, a, b)


def parse_sequence(raw: Any, path: str) -> PeriodicSequence:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("B is a nonempty list of coefficients b_0..b_{k-1}", path)
    vals = tuple(eval_complex(v, f"{path}[{i}]") for i, v in enumerate(raw))
    return _guard(path, PeriodicSequence, vals)


def _epsilon(raw: Any, path: str) -> float | None:
    if raw is None:
        return None
    eps = eval_real(raw, path)
    if not eps > 0:
        raise ConfigError("epsilon must be positive", path)
    return eps


@dataclass(frozen=True)
class Experiment:
    """A validated configuration; ``raw`` is the document it was parsed from."""

    raw: dict
    base: Path | None = None

    def __eq__(self, other):
        return isinstance(other, Experiment) and self.raw == other.raw

    def __hash__(self):
        return hash(emit_config(self))

    @property
    def command(self) -> str | None:
        return self.raw.get("command")

    @property
    def seed(self) -> int:
        return _int(self.raw.get("seed", 0), "seed", 0)

    @property
    def threads(self) -> int | None:
        t = self.raw.get("threads")
        return None if t is None else _int(t, "threads", 1)

    @property
    def instance(self) -> ZetaInstance:
        return parse_instance(self.raw.get("instance"))

    @property
    def partition(self) -> PrimePartition | None:
        raw = self.raw.get("partition")
        return None if raw is None else parse_partition(raw)

    @property
    def hypotheses(self) -> dict:
        return dict(self.raw.get("hypotheses") or {})

    @property
    def lattice_constant(self) -> str:
        c = self.raw.get("lattice_constant", "2pi/h")
        if c not in LATTICE_CONSTANTS:
            raise ConfigError(f"must be one of {LATTICE_CONSTANTS}", "lattice_constant")
        return c

    def section(self, name: str) -> dict:
        if name not in self.raw:
            raise ConfigError(f"command needs a '{name}' section", name)
        return _mapping(self.raw[name], name)

    def scan_config(self) -> ScanConfig:
        sc = self.section("scan")
        partition = self.partition
        if partition is None:
            raise ConfigError("scan needs a partition (a, b)", "partition")
        phi = _mapping(self.raw.get("phi"), "phi")
        region = parse_region(phi.get("region"), "phi.region")
        target = parse_target(phi.get("target", {"constant": 1}), "phi.target", self.base)
        slots_raw = self.raw.get("hurwitz_slots")
        if not isinstance(slots_raw, list) or not slots_raw:
            raise ConfigError("at least one Hurwitz slot is required", "hurwitz_slots")
        slots = []
        for j, s in enumerate(slots_raw):
            p = f"hurwitz_slots[{j}]"
            s = _mapping(s, p)
            slots.append(_guard(p, HurwitzSlot,
                                eval_real(s.get("alpha"), p + ".alpha"),
                                parse_sequence(s.get("B", [1]), p + ".B"),
                                parse_region(s.get("region"), p + ".region"),
                                parse_target(s.get("target", {"constant": 1}), p + ".target", self.base),
                                _epsilon(s.get("epsilon"), p + ".epsilon")))
        mode_raw = sc.get("mode", "discrete")
        if mode_raw == "discrete":
            mode = "discrete"
        elif isinstance(mode_raw, dict) and "continuous" in mode_raw:
            c = _mapping(mode_raw["continuous"], "scan.mode.continuous")
            mode = ContinuousMode(eval_real(c.get("T"), "scan.mode.continuous.T"),
                                  eval_real(c.get("step"), "scan.mode.continuous.step"))
        else:
            raise ConfigError("mode is 'discrete' or {continuous: {T, step}}", "scan.mode")
        eps = _epsilon(sc.get("epsilon"), "scan.epsilon")
        if eps is None:
            raise ConfigError("epsilon is required", "scan.epsilon")
        try:
            return ScanConfig(
                instance=self.instance, region=region, target=target, slots=tuple(slots),
                epsilon=eps, N=_int(sc.get("N", 100000), "scan.N", 0), partition=partition, mode=mode,
                delta=eval_real(sc.get("delta", 0.01), "scan.delta"),
                phi_epsilon=_epsilon(phi.get("epsilon"), "phi.epsilon"),
                excise=bool(sc.get("excise", True)), tol=eval_real(sc.get("tol", 1e-10), "scan.tol"),
                certify_margin=eval_real(phi.get("certify_margin", 0.0), "phi.certify_margin"),
            )
        except ConfigError:
            raise
        except ZetaLabError as exc:
            field = "phi.target" if "non-vanishing" in str(exc) else "scan"
            raise ConfigError(str(exc), field) from exc

    def alphas(self) -> list[float]:
        slots = self.raw.get("hurwitz_slots") or []
        return [eval_real(_mapping(s, f"hurwitz_slots[{j}]").get("alpha"), f"hurwitz_slots[{j}].alpha")
                for j, s in enumerate(slots)]

    def span(self):
        mv = self.section("meanvalue")
        span = _mapping(mv.get("span"), "meanvalue.span")
        if "discrete" in span:
            d = _mapping(span["discrete"], "meanvalue.span.discrete")
            if self.partition is None:
                raise ConfigError("discrete span needs a partition (a, b) for h", "partition")
            return DiscreteSpan(self.partition, _int(d.get("N"), "meanvalue.span.discrete.N", 0))
        if "continuous" in span:
            c = _mapping(span["continuous"], "meanvalue.span.continuous")
            return ContinuousSpan(eval_real(c.get("T"), "meanvalue.span.continuous.T"),
                                  eval_real(c.get("step", 0.05), "meanvalue.span.continuous.step"))
        raise ConfigError("span is {discrete: {N}} or {continuous: {T, step}}", "meanvalue.span")

    def validate(self) -> None:
        """Build every object the document describes so errors surface at parse time."""
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}", "command")
        _ = self.seed, self.threads, self.instance, self.partition, self.lattice_constant
        if "scan" in self.raw:
            self.scan_config()
        if "meanvalue" in self.raw:
            self.span()
        if "kappa" in self.raw:
            parse_spec(self.section("kappa").get("spec", "riemann"))


def load_document(text: str, source: str = "<config>") -> dict:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}", source) from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping", source)
    return raw


def parse_config(path) -> Experiment:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} not found")
    exp = Experiment(load_document(path.read_text(), str(path)), path.parent)
    exp.validate()
    return exp


def parse_config_text(text: str, base: Path | None = None) -> Experiment:
    exp = Experiment(load_document(text), base)
    exp.validate()
    return exp


def emit_config(exp: Experiment) -> str:
    return yaml.safe_dump(exp.raw, sort_keys=True, default_flow_style=None)
