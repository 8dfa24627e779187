"""Command-line front end: ``spectrum``, ``moments`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 runtime error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis as an
from .config import RANDOMIZED, ConfigError, echo, load_config
from .filters import build_wavelet_bank, make_profile
from .scattering import moments
from .spectra import (
    QuadratureNodes, SpectrumFormatError, build_circle_spectrum, build_pointcloud_spectrum,
    build_torus_spectrum, load_spectrum, read_points, restore_analytic, save_spectrum,
)
from .transform import SIGNAL_MAGIC, Signal, load_signal_raw, load_signal_text, synthesize
from .verify import SuiteUnavailable, run_suites

log = logging.getLogger("manifold_scattering")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# spectrum construction and caching


def _cache_key(manifold: dict) -> str:
    h = hashlib.sha256(json.dumps(manifold, sort_keys=True).encode())
    if manifold["kind"] == "pointcloud":
        h.update(Path(manifold["path"]).read_bytes())
    return f"{manifold['kind']}-{h.hexdigest()[:16]}.gspc"


def _build(manifold: dict, seed):
    kind = manifold["kind"]
    if kind == "circle":
        return build_circle_spectrum(manifold["n_modes"], manifold["n_nodes"])
    if kind == "torus":
        return build_torus_spectrum(manifold["n_modes"], manifold["n_nodes_per_axis"])
    pts = read_points(manifold["path"])
    return build_pointcloud_spectrum(pts, manifold["n_modes"], manifold["bandwidth"],
                                     manifold["dimension"], seed=0 if seed is None else seed)


def _restore(loaded, manifold: dict):
    kind = manifold["kind"]
    if kind == "circle":
        return restore_analytic(loaded, "circle", manifold["n_nodes"])
    if kind == "torus":
        return restore_analytic(loaded, "torus", manifold["n_nodes_per_axis"])
    pts = read_points(manifold["path"])
    nodes = QuadratureNodes(points=pts, weights=loaded.weights, volume=float(loaded.weights.sum()))
    return replace(loaded, nodes=nodes, kind="pointcloud",
                   params={"n_modes": loaded.n_modes, "bandwidth": manifold["bandwidth"],
                           "n_points": loaded.n_nodes})


def get_spectrum(cfg: dict):
    """Load the configured spectrum from the cache, building it on a miss.

    Returns ``(spectrum, cache_path, loaded)``.
    """
    manifold = cfg["manifold"]
    if manifold["kind"] == "pointcloud" and not Path(manifold["path"]).is_file():
        raise FileNotFoundError(f"point-cloud file not found: {manifold['path']}")
    cache = Path(cfg["cache_dir"]) / _cache_key(manifold)
    if cache.is_file():
        try:
            sp = _restore(load_spectrum(cache), manifold)
            log.info("loaded cached spectrum from %s", cache)
            return sp, cache, True
        except (SpectrumFormatError, ValueError) as exc:
            log.warning("ignoring unusable cache %s: %s", cache, exc)
    sp = _build(manifold, cfg["seed"])
    cache.parent.mkdir(parents=True, exist_ok=True)
    save_spectrum(sp, cache)
    log.info("built spectrum and cached it at %s", cache)
    return sp, cache, False


# ---------------------------------------------------------------------------
# signals


def _named_signal(name: str, sp, seed) -> Signal:
    if name.startswith("e") and name[1:].isdigit():
        n = int(name[1:])
        if n >= sp.n_modes:
            raise UsageError(f"signal {name}: only {sp.n_modes} modes retained")
        return synthesize(np.eye(sp.n_modes)[n], sp)
    if name.startswith("random:"):
        if seed is None:
            raise UsageError("random signals need --seed")
        lam = float(name.split(":", 1)[1])
        return an.random_bandlimited(sp, lam, np.random.default_rng(seed))
    coords = sp.nodes.coords
    analytic = {"cos": np.cos, "sin": np.sin, "cos2": lambda x: np.cos(2 * x)}
    if name in analytic:
        if coords is None:
            raise UsageError(f"signal {name!r} needs an analytic backend")
        x = coords if coords.ndim == 1 else coords[:, 0]
        return Signal(analytic[name](x), sp)
    raise UsageError(f"unknown signal {name!r}: use cos, sin, cos2, e<k>, random:<lam> "
                     "or a signal file")


def get_signal(source: str, sp, seed) -> Signal:
    path = Path(source)
    if path.is_file():
        with open(path, "rb") as fh:
            raw = fh.read(len(SIGNAL_MAGIC)) == SIGNAL_MAGIC
        if raw:
            return load_signal_raw(path, sp)
        return load_signal_text(path, sp)
    return _named_signal(source, sp, seed)


# ---------------------------------------------------------------------------
# commands


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def cmd_spectrum(cfg: dict) -> int:
    sp, cache, loaded = get_spectrum(cfg)
    defect = sp.orthonormality_defect()
    summary = {"config": echo(cfg), "kind": sp.kind, "n_modes": sp.n_modes,
               "n_nodes": sp.n_nodes, "volume": sp.volume,
               "eigenvalues": [float(v) for v in sp.eigenvalues],
               "orthonormality_defect": defect}
    print(f"kind: {sp.kind}  modes: {sp.n_modes}  nodes: {sp.n_nodes}")
    print("eigenvalues: " + " ".join(_fmt(v) for v in sp.eigenvalues))
    print(f"orthonormality defect: {defect:.3e}")
    print(f"cache: {cache} ({'loaded' if loaded else 'built'})")
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "spectrum.json").write_text(an.dumps(summary))
    return EXIT_OK


def cmd_moments(cfg: dict) -> int:
    sp, _, _ = get_spectrum(cfg)
    profile = make_profile(cfg["profile"]["kind"], cfg["profile"]["C"])
    bank = build_wavelet_bank(profile, sp, cfg["window"]["j_min"], cfg["window"]["j_max"])
    f = get_signal(cfg["signal"], sp, cfg["seed"])
    s = cfg["scattering"]
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    config_json = json.dumps(echo(cfg), sort_keys=True, separators=(",", ":"))
    for q in s["q"]:
        md = {"seed": "" if cfg["seed"] is None else cfg["seed"], "config": config_json}
        table = moments(f, bank, s["m"], q, path_cap=s["path_cap"], workers=cfg["threads"],
                        sparsity=s["sparsity"], metadata=md)
        path = out / f"moments_m{s['m']}_q{q!r}.csv"
        table.to_csv(path)
        print(path)
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    needs_seed = [s for s in cfg["verify"]["suites"] if s in RANDOMIZED]
    if needs_seed and cfg["seed"] is None:
        raise UsageError(f"suites {needs_seed} are randomized; pass --seed")
    sp, _, _ = get_spectrum(cfg)
    profile = make_profile(cfg["profile"]["kind"], cfg["profile"]["C"])
    bank = build_wavelet_bank(profile, sp, cfg["window"]["j_min"], cfg["window"]["j_max"])
    try:
        suites = run_suites(sp, profile, bank, cfg, workers=cfg["threads"])
    except SuiteUnavailable as exc:
        raise UsageError(str(exc)) from None
    failures = [f"{name}.{flag}" for name, rep in suites.items()
                for flag, ok in rep["flags"].items() if not ok]
    report = {"config": echo(cfg), "suites": suites, "failures": failures,
              "passed": not failures}
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify_report.json").write_text(an.dumps(report))
    for name, rep in suites.items():
        print(f"{name}: {'PASS' if rep['passed'] else 'FAIL'}")
    if failures:
        for f in failures:
            print(f"failed invariant: {f}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _q_list(text: str):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid q list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="random seed (u64)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--cache-dir", help="spectrum cache directory")
    common.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    p = _Parser(prog="manifold-scattering",
                description="Wavelet scattering moments on compact manifolds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="build and cache a spectrum")
    pm = sub.add_parser("moments", parents=[common], help="compute a moment table")
    pm.add_argument("--signal", help="cos, sin, cos2, e<k>, random:<lam> or a signal file")
    pm.add_argument("--m", type=int, help="order")
    pm.add_argument("--q", type=_q_list, help="exponent(s), comma separated")
    pm.add_argument("--j-min", type=int)
    pm.add_argument("--j-max", type=int)
    pv = sub.add_parser("verify", parents=[common], help="run verification suites")
    pv.add_argument("--suite", action="append", help="suite to run (repeatable)")
    pv.add_argument("--j-min", type=int)
    pv.add_argument("--j-max", type=int)
    return p


def _overrides(args) -> dict:
    o = {}
    pairs = [("seed", "seed"), ("out", "output_dir"), ("threads", "threads"),
             ("cache_dir", "cache_dir"), ("signal", "signal"), ("m", "scattering.m"),
             ("q", "scattering.q"), ("j_min", "window.j_min"), ("j_max", "window.j_max"),
             ("suite", "verify.suites")]
    for attr, key in pairs:
        v = getattr(args, attr, None)
        if v is not None:
            o[key] = v
    return o


COMMANDS = {"spectrum": cmd_spectrum, "moments": cmd_moments, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        cfg = load_config(args.config, _overrides(args))
        return COMMANDS[args.command](cfg)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, RuntimeError, MemoryError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
