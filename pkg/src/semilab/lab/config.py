"""Experiment configuration: a TOML tree with typed sections.

Example::

    name = "plasma-p1-interval"
    seed = 0
    checks = ["branch", "energy"]

    [nonlinearity]
    family = "plasma_power"
    params = { p = 1.0, t0 = -1.0 }

    [domain]
    kind = "interval"
    a = -1.0
    b = 1.0
    n = 2001

    [lambdas]
    values = [-1.0, -10.0, -100.0]      # or: start, stop, per_decade

    [solver]
    newton_tol = 1e-10

    [options.energy]
    target = 6.283185307179586
    domain = { kind = "ball", radius = 1.0, dim = 3, n = 20001 }
    lambdas = [-1e6]

Any check may override ``domain``, ``lambdas`` or ``nonlinearity`` in its
``[options.<check>]`` table.
"""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..domain import Domain, Interval, RadialBall, disk2d, square2d
from ..nonlinearity import Nonlinearity, catalog
from ..solver import SolveConfig

CHECKS = ("branch", "energy", "theorem12", "theorem15", "theorem16", "large", "entire", "ko", "homogeneity", "robin")

# checks that need no nonlinearity / domain / λ schedule of their own
STANDALONE = {"large", "entire", "ko", "homogeneity", "robin"}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``where`` locates the problem."""

    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class ExperimentConfig:
    name: str
    checks: list[str]
    nonlinearity: dict | None = None
    domain: dict | None = None
    lambdas: list[float] = field(default_factory=list)
    solver: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output: str | None = None
    seed: int = 0
    source: str = "<memory>"

    def echo(self) -> dict:
        return {
            "name": self.name, "checks": list(self.checks), "nonlinearity": self.nonlinearity,
            "domain": self.domain, "lambdas": list(self.lambdas), "solver": dict(self.solver),
            "options": copy.deepcopy(self.options), "output": self.output, "seed": self.seed,
            "source": self.source,
        }

    def for_check(self, check: str) -> dict:
        """Resolved (nonlinearity, domain, lambdas, options) for one check."""
        opts = dict(self.options.get(check, {}))
        out = {
            "nonlinearity": opts.pop("nonlinearity", self.nonlinearity),
            "domain": opts.pop("domain", self.domain),
            "lambdas": lambda_schedule(opts.pop("lambdas", self.lambdas), f"options.{check}.lambdas"),
            "options": opts,
        }
        return out

    def solve_config(self) -> SolveConfig:
        return build_solve_config(self.solver)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_nonlinearity(spec: Mapping[str, Any] | None, where: str = "nonlinearity") -> Nonlinearity:
    if not spec:
        raise ConfigError("missing nonlinearity section", where)
    if "family" not in spec:
        raise ConfigError("needs a 'family' key", where)
    params = spec.get("params", {})
    try:
        return catalog(spec["family"], params)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), where) from None


def build_domain(spec: Mapping[str, Any] | None, where: str = "domain") -> Domain:
    if not spec:
        raise ConfigError("missing domain section", where)
    kind = spec.get("kind")
    args = {k: v for k, v in spec.items() if k != "kind"}
    try:
        if kind == "interval":
            return Interval(float(args.get("a", -1.0)), float(args.get("b", 1.0)), int(args.get("n", 2001)))
        if kind == "ball":
            return RadialBall(float(args.get("radius", 1.0)), int(args.get("dim", 2)), int(args.get("n", 2001)))
        if kind == "disk2d":
            return disk2d(float(args.get("radius", 1.0)), float(args.get("h", 0.01)),
                          boundary_mode=args.get("boundary_mode", "shortley_weller"))
        if kind == "square2d":
            return square2d(float(args.get("side", 1.0)), float(args.get("h", 0.01)),
                            boundary_mode=args.get("boundary_mode", "shortley_weller"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), where) from None
    raise ConfigError(f"unknown domain kind {kind!r} (interval, ball, disk2d, square2d)", where)


def build_solve_config(spec: Mapping[str, Any]) -> SolveConfig:
    known = set(SolveConfig.__dataclass_fields__)
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"unknown solver keys {sorted(unknown)}", "solver")
    try:
        return SolveConfig(**spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "solver") from None


def lambda_schedule(spec: Any, where: str = "lambdas") -> list[float]:
    """Explicit list, or a geometric schedule {start, stop, per_decade}."""
    if spec is None:
        return []
    if isinstance(spec, Mapping):
        if "values" in spec:
            lams = [float(x) for x in spec["values"]]
        else:
            try:
                start, stop = float(spec["start"]), float(spec["stop"])
            except KeyError as exc:
                raise ConfigError(f"needs 'values' or 'start'/'stop' (missing {exc})", where) from None
            per = int(spec.get("per_decade", 1))
            if not (start < 0 and stop < start):
                raise ConfigError("start and stop must be negative with stop < start", where)
            count = int(round(math.log10(stop / start) * per)) + 1
            lams = list(-np.geomspace(-start, -stop, max(count, 2)))
    else:
        lams = [float(x) for x in spec]
    if any(not x < 0 for x in lams):
        raise ConfigError("λ values must be negative", where)
    if any(b >= a for a, b in zip(lams, lams[1:])):
        raise ConfigError("λ schedule must be strictly decreasing", where)
    return lams


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def from_mapping(data: Mapping[str, Any], source: str = "<memory>") -> ExperimentConfig:
    data = dict(data)
    unknown = set(data) - {"name", "checks", "nonlinearity", "domain", "lambdas", "solver", "options",
                           "output", "seed"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}", source)
    checks = list(data.get("checks", []))
    if not checks:
        raise ConfigError("at least one check is required", f"{source}: checks")
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise ConfigError(f"unknown checks {bad}; known: {list(CHECKS)}", f"{source}: checks")
    if len(set(checks)) != len(checks):
        raise ConfigError("duplicate checks", f"{source}: checks")
    options = dict(data.get("options", {}))
    if set(options) - set(checks):
        raise ConfigError(f"options given for checks not requested: {sorted(set(options) - set(checks))}",
                          f"{source}: options")
    cfg = ExperimentConfig(
        name=str(data.get("name", Path(source).stem)),
        checks=checks,
        nonlinearity=data.get("nonlinearity"),
        domain=data.get("domain"),
        lambdas=lambda_schedule(data.get("lambdas"), f"{source}: lambdas"),
        solver=dict(data.get("solver", {})),
        options=options,
        output=data.get("output"),
        seed=int(data.get("seed", 0)),
        source=source,
    )
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    """Build every referenced family, domain and schedule once so errors surface before running."""
    build_solve_config(cfg.solver)
    for check in cfg.checks:
        where = f"{cfg.source}: options.{check}"
        res = cfg.for_check(check)
        lambda_schedule(res["lambdas"], where)
        if check in STANDALONE:
            continue
        build_nonlinearity(res["nonlinearity"], where + ".nonlinearity")
        if not res["lambdas"]:
            raise ConfigError("needs a λ schedule", where)
        dom = res["domain"]
        if not dom or dom.get("kind") not in ("interval", "ball", "disk2d", "square2d"):
            raise ConfigError(f"needs a domain (interval, ball, disk2d, square2d); got {dom!r}", where)
        if dom["kind"] in ("interval", "ball"):
            build_domain(dom, where + ".domain")      # cheap; 2D grids are checked when built


def loads(text: str, source: str = "<string>") -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message carries "(at line L, column C)"
        raise ConfigError(f"parse error: {exc}", source) from None
    return from_mapping(data, source)


def load(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from None
    return loads(text, str(path))


def merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict:
    """Recursive dict merge, ``override`` wins."""
    out = copy.deepcopy(dict(base))
    for k, v in override.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), Mapping):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out
