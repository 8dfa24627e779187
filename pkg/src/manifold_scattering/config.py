"""Run configuration: JSON file plus flag overrides, parsed strictly."""
from __future__ import annotations

import copy
import json
import math
from pathlib import Path

SUITES = ("frame", "nonexpansive", "boundedness", "isometry", "stability",
          "chart", "cz", "weak11", "kernel_decay")
DEFAULT_SUITES = ["frame", "nonexpansive", "boundedness", "isometry", "stability",
                  "chart", "cz", "weak11"]
# suites that draw random signals and therefore need a seed
RANDOMIZED = {"frame", "nonexpansive", "boundedness", "isometry", "stability",
              "chart", "cz", "weak11"}

MANIFOLD_KEYS = {
    "circle": {"kind": "circle", "n_modes": 65, "n_nodes": 256},
    "torus": {"kind": "torus", "n_modes": 81, "n_nodes_per_axis": 32},
    "pointcloud": {"kind": "pointcloud", "path": None, "n_modes": 9,
                   "bandwidth": None, "dimension": None},
}

SUITE_DEFAULTS = {
    "frame": {"j_min": -20, "j_max": 20, "n_signals": 50, "lam": 5.0, "tolerance": 1e-5},
    "nonexpansive": {"n_pairs": 20, "orders": [1, 2, 3], "lam": None, "tolerance": 1e-6},
    "boundedness": {"family_size": 64, "q": [1.25, 1.5], "orders": [1, 2], "lam": 5.0,
                    "tolerance": 0.1},
    "isometry": {"orders": [1, 2, 3], "q": [1.25, 1.5, 2.0], "shifts": [[37, 0], [5, 11]],
                 "lam": None, "reflection": True, "tolerance": 1e-8},
    "stability": {"lam": 5.0, "q": [1.5, 2.0], "orders": [1, 2], "t_min": 1e-3,
                  "t_max": 1e-1, "n_t": 7, "harmonic": 1, "slope_range": [0.9, 1.1]},
    "chart": {"omega": [math.pi / 24, math.pi / 16, math.pi / 13], "n_pairs": 10_000,
              "tolerance": 1e-10},
    "cz": {"n_instances": 200, "certified_max": 16.0, "recon_tol": 1e-10, "mean_tol": 1e-8},
    "weak11": {"family_size": 64, "tolerance": 0.2},
    "kernel_decay": {"j_min": -4, "j_max": 4, "tolerance": 0.2},
}

DEFAULTS = {
    "manifold": MANIFOLD_KEYS["circle"],
    "profile": {"kind": "exponential", "C": 1.0},
    "window": {"j_min": -8, "j_max": 8},
    "scattering": {"m": 1, "q": [2.0], "path_cap": 100_000, "sparsity": 0.0},
    "signal": "cos",
    "verify": {"suites": DEFAULT_SUITES, **SUITE_DEFAULTS},
    "seed": None,
    "output_dir": "out",
    "cache_dir": ".spectrum_cache",
    "threads": 1,
}

# keys whose values are free-form (lists or scalars), never merged recursively
_LEAF = {"suites", "q", "orders", "shifts", "omega", "slope_range"}


class ConfigError(ValueError):
    """Invalid or unknown configuration."""


def _merge(base: dict, override: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if k not in base:
            raise ConfigError(f"unknown config key {where}{k!r}")
        if isinstance(base[k], dict) and k not in _LEAF:
            if not isinstance(v, dict):
                raise ConfigError(f"{where}{k} must be an object")
            out[k] = _merge(base[k], v, f"{where}{k}.")
        else:
            out[k] = v
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Defaults, then the JSON file at ``path``, then flag ``overrides``."""
    user = {}
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
    base = copy.deepcopy(DEFAULTS)
    manifold = user.get("manifold", {})
    if not isinstance(manifold, dict):
        raise ConfigError("manifold must be an object")
    kind = manifold.get("kind", "circle")
    if kind not in MANIFOLD_KEYS:
        raise ConfigError(f"unknown manifold kind {kind!r}; choose from {sorted(MANIFOLD_KEYS)}")
    base["manifold"] = copy.deepcopy(MANIFOLD_KEYS[kind])
    cfg = _merge(base, user, "")
    for key, value in (overrides or {}).items():
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node[p]
        node[parts[-1]] = value
    validate(cfg)
    return cfg


def _int(cfg_value, name, lo=None, hi=None):
    if isinstance(cfg_value, bool) or not isinstance(cfg_value, int):
        raise ConfigError(f"{name} must be an integer, got {cfg_value!r}")
    if (lo is not None and cfg_value < lo) or (hi is not None and cfg_value > hi):
        raise ConfigError(f"{name}={cfg_value} out of range [{lo}, {hi}]")
    return cfg_value


def _real(v, name, lo=None, hi=None, lo_open=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{name} must be a finite number, got {v!r}")
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(f"{name}={v} must be {'>' if lo_open else '>='} {lo}")
    if hi is not None and v > hi:
        raise ConfigError(f"{name}={v} must be <= {hi}")
    return v


def _q(v, name):
    _real(v, name)
    if not 1 < v <= 2:
        raise ConfigError(f"{name}={v}: q must be in (1, 2]")
    return v


def validate(cfg: dict) -> None:
    m = cfg["manifold"]
    _int(m["n_modes"], "manifold.n_modes", 1)
    if m["kind"] == "circle":
        _int(m["n_nodes"], "manifold.n_nodes", 4)
    elif m["kind"] == "torus":
        _int(m["n_nodes_per_axis"], "manifold.n_nodes_per_axis", 4)
    else:
        if not isinstance(m["path"], str):
            raise ConfigError("manifold.path (point file) is required for a point cloud")
        _real(m["bandwidth"], "manifold.bandwidth", 0, lo_open=True)
        if m["dimension"] is not None:
            _int(m["dimension"], "manifold.dimension", 1)
    p = cfg["profile"]
    if p["kind"] not in ("exponential", "gaussian"):
        raise ConfigError(f"profile.kind must be 'exponential' or 'gaussian', got {p['kind']!r}")
    _real(p["C"], "profile.C", 0, lo_open=True)
    w = cfg["window"]
    _int(w["j_min"], "window.j_min", -1000, 1000)
    _int(w["j_max"], "window.j_max", w["j_min"], 1000)
    s = cfg["scattering"]
    _int(s["m"], "scattering.m", 1)
    if not isinstance(s["q"], list) or not s["q"]:
        raise ConfigError("scattering.q must be a nonempty list")
    for q in s["q"]:
        _q(q, "scattering.q")
    _int(s["path_cap"], "scattering.path_cap", 1)
    _real(s["sparsity"], "scattering.sparsity", 0, 1)
    if not isinstance(cfg["signal"], str):
        raise ConfigError("signal must be a name or a file path")
    if cfg["seed"] is not None:
        _int(cfg["seed"], "seed", 0, 2 ** 64 - 1)
    _int(cfg["threads"], "threads", 1, 1024)
    for k in ("output_dir", "cache_dir"):
        if not isinstance(cfg[k], str):
            raise ConfigError(f"{k} must be a path string")
    v = cfg["verify"]
    if not isinstance(v["suites"], list):
        raise ConfigError("verify.suites must be a list")
    for name in v["suites"]:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; choose from {list(SUITES)}")
    for name in ("frame", "nonexpansive", "boundedness", "isometry", "cz", "weak11",
                 "kernel_decay", "chart"):
        for key in ("tolerance", "recon_tol", "mean_tol"):
            if key in v[name]:
                _real(v[name][key], f"verify.{name}.{key}", 0, lo_open=True)
    for q in v["isometry"]["q"] + v["boundedness"]["q"] + v["stability"]["q"]:
        _q(q, "verify.*.q")
    for name in ("frame", "nonexpansive", "boundedness", "isometry", "stability"):
        if v[name]["lam"] is not None:
            _real(v[name]["lam"], f"verify.{name}.lam", 0, lo_open=True)
        for m in v[name].get("orders", []):
            _int(m, f"verify.{name}.orders", 1, 4)
    for om in v["chart"]["omega"]:
        _real(om, "verify.chart.omega", 0, math.pi / 12, lo_open=True)
    st = v["stability"]
    _real(st["t_min"], "verify.stability.t_min", 0, 1, lo_open=True)
    _real(st["t_max"], "verify.stability.t_max", st["t_min"], 1)
    _int(st["n_t"], "verify.stability.n_t", 2)
    _int(st["harmonic"], "verify.stability.harmonic", 1)
    for name, key in (("frame", "n_signals"), ("nonexpansive", "n_pairs"),
                      ("boundedness", "family_size"), ("cz", "n_instances"),
                      ("weak11", "family_size"), ("chart", "n_pairs")):
        _int(v[name][key], f"verify.{name}.{key}", 1)


# runtime-only settings that never change results; left out of echoed
# configs so outputs do not depend on where or how fast they were produced
RUNTIME_KEYS = ("threads", "output_dir", "cache_dir")


def echo(cfg: dict) -> dict:
    """The effective config as echoed into outputs."""
    return {k: copy.deepcopy(v) for k, v in cfg.items() if k not in RUNTIME_KEYS}
