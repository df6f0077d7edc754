"""Embedded experiment presets, one per reference scenario."""

from __future__ import annotations

import math

from .config import ExperimentConfig, from_mapping, merge

PRESETS: dict[str, dict] = {
    "paper-ex-4.2i": {
        "description": "critical power ((t+1)^+)^5 on the unit ball of R^3: closed-form branch, large solution",
        "checks": ["branch", "theorem12", "large"],
        "nonlinearity": {"family": "plasma_power", "params": {"p": 5.0, "t0": -1.0}},
        "domain": {"kind": "ball", "radius": 1.0, "dim": 3, "n": 2001},
        "lambdas": [-1.0, -10.0, -100.0, -1e3, -1e4, -1e5],
        "options": {
            "branch": {"oracle": "critical_ball3", "oracle_tol": 5e-6, "oracle_tol_scaled": True},
            "theorem12": {"profile_oracle": "critical_large_shifted", "r_max": 0.8},
            "large": {"g": {"kind": "power", "p": 5.0, "shift": 1.0}, "expected_center": 3**0.25 - 1,
                      "alt_center": math.sqrt(3) - 1, "center_tol": 2e-3,
                      "profile_oracle": "critical_large_shifted", "profile_tol": 2e-3, "r_max": 0.9,
                      "domain": {"kind": "ball", "radius": 1.0, "dim": 3, "n": 2001}},
        },
    },
    "paper-ex-4.2ii": {
        "description": "(t+1)^+ on (-1, 1): closed-form branch, entire profile cosh, energy 2π sqrt(-λ) on the ball",
        "checks": ["branch", "theorem12", "energy"],
        "nonlinearity": {"family": "plasma_power", "params": {"p": 1.0, "t0": -1.0}},
        "domain": {"kind": "interval", "a": -1.0, "b": 1.0, "n": 4001},
        "lambdas": [-1.0, -10.0, -100.0, -1e3, -1e4],
        "options": {
            "branch": {"oracle": "plasma1_interval", "oracle_tol": 5e-6, "oracle_tol_scaled": True,
                       "supK": "vanishing"},
            "theorem12": {"domain": {"kind": "interval", "a": -1.0, "b": 1.0, "n": 8001},
                          "lambdas": [-1e2, -1e3, -1e4], "tol": 5e-3},
            "energy": {"domain": {"kind": "ball", "radius": 1.0, "dim": 3, "n": 2001}, "refine": True,
                       "lambdas": [-1e4, -1e5, -1e6], "target": 2 * math.pi, "rel_tol": 0.02},
        },
    },
    "paper-ex-5.2i": {
        "description": "Liouville e^t on the unit disk: closed-form branch, energy, limit log(8/(1-r^2)^2), Robin form",
        "checks": ["branch", "energy", "theorem16", "robin"],
        "nonlinearity": {"family": "exponential"},
        "domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 4001},
        "lambdas": [-1.0, -10.0, -100.0, -1e3, -1e4, -1e5, -1e6],
        "options": {
            "branch": {"oracle": "liouville_disk", "oracle_tol": 5e-6, "oracle_tol_scaled": True,
                       "supK": "persistent"},
            # J/sqrt(-λ) -> 2 sqrt2 |S^1| = 4 sqrt2 π with F(s) = e^s; 2 sqrt2 π is reported alongside
            "energy": {"refine": True, "lambdas": [-1e4, -1e6, -1e8], "target": 4 * math.sqrt(2) * math.pi,
                       "alt_target": 2 * math.sqrt(2) * math.pi, "rel_tol": 0.02},
            "theorem16": {"profile_oracle": "liouville_large", "oracle": "liouville_disk", "r_max": 0.8},
            "robin": {"domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 2001}, "tol": 1e-3},
        },
    },
    "paper-ex-5.2ii": {
        "description": "MEMS 1/(1-t)^3 on (-1, 1): closed-form branch, bounded limit -sqrt(1-x^2)",
        "checks": ["branch", "theorem16"],
        "nonlinearity": {"family": "mems_inverse", "params": {"p": 3.0}},
        "domain": {"kind": "interval", "a": -1.0, "b": 1.0, "n": 4001},
        "lambdas": [-1.0, -10.0, -100.0, -1e3, -1e4, -1e5, -1e6],
        "options": {
            "branch": {"oracle": "mems_interval", "oracle_tol": 1e-5, "oracle_tol_scaled": True},
            "theorem16": {"profile_oracle": "mems_limit", "oracle": "mems_interval", "alpha_power": 0.25,
                          "r_max": 0.9},
        },
    },
    "cor-1.4-p2": {
        "description": "plasma p=2 on the unit disk: large-solution regime, (u+1)(-λ) -> large solution of Δv = v^2",
        "checks": ["theorem12"],
        "nonlinearity": {"family": "plasma_power", "params": {"p": 2.0, "t0": -1.0}},
        "domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 2001},
        "lambdas": [-1e2, -1e3, -1e4, -1e5],
        "options": {"theorem12": {"r_max": 0.5}},
    },
    "cor-1.4-p1": {
        "description": "plasma p=1 on the unit disk: entire-profile regime with the Bessel profile I0",
        "checks": ["theorem12"],
        "nonlinearity": {"family": "plasma_power", "params": {"p": 1.0, "t0": -1.0}},
        "domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 4001},
        "lambdas": [-1e2, -1e3, -1e4],
        "options": {"theorem12": {"tol": 5e-3}},
    },
    "thm-1.5-torsion": {
        "description": "f = 1 + e^t on the unit disk: u/λ -> torsion function (1-r^2)/4",
        "checks": ["theorem15"],
        "nonlinearity": {"family": "const_plus_exp", "params": {"c0": 1.0}},
        "domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 2001},
        "lambdas": [-1e2, -1e3, -1e4],
        "options": {"theorem15": {"r_max": 0.8, "tol": 1e-2}},
    },
    "thm-1.1-branch": {
        "description": "plasma p=2 on the unit disk: uniqueness, bounds, nodewise monotonicity, stability",
        "checks": ["branch"],
        "nonlinearity": {"family": "plasma_power", "params": {"p": 2.0, "t0": -1.0}},
        "domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 1001},
        "lambdas": [-0.5, -2.0, -8.0, -32.0, -128.0, -512.0],
        "options": {"branch": {"uniqueness_starts": 20, "stability": True}},
    },
    "ko-table": {
        "description": "Keller-Osserman verdicts for t^p, p = 0..5, and e^t",
        "checks": ["ko"],
    },
    "homogeneity-lemma": {
        "description": "rescaled ratios for power, exponential and inverse-power families",
        "checks": ["homogeneity"],
    },
    "entire-profiles": {
        "description": "entire radial profiles cosh r, sinh r / r, 1 + r^2/4 and finite blow-up for p = 2",
        "checks": ["entire"],
    },
    "large-disk-2d": {
        "description": "Δv = e^v on the unit disk: radial truncation vs the 2D masked grid",
        "checks": ["large"],
        "options": {"large": {"g": {"kind": "exponential"},
                              "domain": {"kind": "ball", "radius": 1.0, "dim": 2, "n": 2001},
                              "expected_center": math.log(8.0), "center_tol": 1e-3,
                              "profile_oracle": "liouville_large", "profile_tol": 1e-3,
                              "compare_domain": {"kind": "disk2d", "radius": 1.0, "h": 1 / 64},
                              "compare_tol": 5e-3, "probe": True, "probe_oracle": "liouville_large"}},
    },
}


def list_presets() -> list[tuple[str, str]]:
    return [(name, p["description"]) for name, p in PRESETS.items()]


def preset_config(name: str, override: dict | None = None, lambda_max: float | None = None) -> ExperimentConfig:
    """Preset ``name`` merged with ``override``; ``lambda_max`` drops schedule values with -λ above it."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; see `list`")
    data = {k: v for k, v in PRESETS[name].items() if k != "description"}
    data["name"] = name
    if override:
        data = merge(data, override)
    if lambda_max is not None:
        data = _cap(data, float(lambda_max))
    return from_mapping(data, source=f"preset:{name}")


def _cap(data: dict, lam_max: float) -> dict:
    def cap(lams):
        kept = [x for x in lams if -x <= lam_max]
        return kept or [max(lams)]
    if data.get("lambdas"):
        data["lambdas"] = cap(data["lambdas"])
    for opts in data.get("options", {}).values():
        if isinstance(opts.get("lambdas"), list):
            opts["lambdas"] = cap(opts["lambdas"])
    return data
