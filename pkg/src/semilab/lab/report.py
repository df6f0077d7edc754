"""Running an experiment and the report.json schema."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .checks import run_check
from .config import ExperimentConfig
from .io import jsonable, write_json

OUT_ENV = "SEMILAB_OUT"
SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "semilab experiment report",
    "type": "object",
    "required": ["schema_version", "config", "verdicts", "passed", "wall_time"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "config": {
            "type": "object",
            "required": ["name", "checks", "seed"],
            "properties": {
                "name": {"type": "string"},
                "checks": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                "seed": {"type": "integer"},
            },
        },
        "verdicts": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["check", "statement", "status", "metrics", "artifacts", "wall_time"],
                "properties": {
                    "check": {"enum": ["branch", "energy", "theorem12", "theorem15", "theorem16", "large",
                                       "entire", "ko", "homogeneity", "robin"]},
                    "statement": {"type": "string", "minLength": 1},
                    "status": {"enum": ["pass", "fail", "info"]},
                    "metrics": {"type": "object"},
                    "artifacts": {"type": "array", "items": {"type": "string"}},
                    "wall_time": {"type": "number", "minimum": 0},
                    "message": {"type": "string"},
                },
            },
        },
        "passed": {"type": "boolean"},
        "wall_time": {"type": "number", "minimum": 0},
    },
}


@dataclass
class ExperimentReport:
    config: dict
    verdicts: list
    outdir: Path
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.status != "fail" for v in self.verdicts)

    def as_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "config": self.config,
                "verdicts": [v.as_dict() for v in self.verdicts], "passed": self.passed,
                "wall_time": self.wall_time}


def output_root(explicit: str | os.PathLike | None = None) -> Path:
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get(OUT_ENV, "semilab-out"))


def run_config(cfg: ExperimentConfig, out: str | os.PathLike | None = None) -> ExperimentReport:
    """Run the checks in declared order and write report.json plus per-check files."""
    outdir = Path(out) if out is not None else output_root(cfg.output) / cfg.name
    outdir.mkdir(parents=True, exist_ok=True)
    np.random.seed(cfg.seed)  # legacy global state, for any library code that uses it
    cache: dict = {}
    t = time.perf_counter()
    verdicts = [run_check(c, cfg, outdir, cache) for c in cfg.checks]
    rep = ExperimentReport(jsonable(cfg.echo()), verdicts, outdir, time.perf_counter() - t)
    write_json(outdir / "report.json", rep.as_dict())
    return rep
