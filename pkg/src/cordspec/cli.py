"""Command-line front end: verified-suite runner plus spectrum, index,
torus, and triangle subcommands with JSON/CSV artifacts.

Exit codes: 0 success, 1 numerical assertion failure, 2 I/O or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import cord_engine, flow_integrator, torus_knot_h2r, triangle_geometry
from . import variational
from .hyperbolic_core import PointH3, TangentVec, christoffel, christoffel_fd, \
    inner, riemann_fd
from .flow_integrator import CotangentState
from .isometry_group import load_presentation, verify_presentation

EXIT_OK = 0
EXIT_ASSERT = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    height: str | float = "auto"
    cutoff: float = 4.0
    mesh_size: int = 256
    out_format: str = "json"
    tolerances: dict = field(default_factory=dict)
    threads: int = 1

    def validate(self):
        if self.cutoff <= 0:
            raise ConfigError("cutoff must be positive")
        n = self.mesh_size
        if n < 64 or (n & (n - 1)) != 0:
            raise ConfigError("mesh size must be a power of two >= 64")
        if self.out_format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.threads < 1:
            raise ConfigError("thread count must be >= 1")


def _default_threads() -> int:
    env = os.environ.get("CORDSPEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("CORDSPEC_THREADS must be an integer")
    return 1


def _load_rep(path):
    if path is None:
        path = resources.files("cordspec").joinpath("data/figure_eight.json")
    try:
        return load_presentation(path)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot load holonomy file: {e}")


def _resolve_height(height, rep):
    if height == "auto":
        return cord_engine.max_embedded_height(rep)
    return float(height)


def _pool_map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- verify

def _suite_curvature(tol):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        x, y = rng.normal(size=2)
        z = math.exp(rng.normal())
        q = PointH3(x, y, z)
        u, v = rng.normal(size=3), rng.normal(size=3)
        X, Y = TangentVec(q, u), TangentVec(q, v)
        num = inner(riemann_fd(q, X, Y, Y), X)
        den = inner(X, X) * inner(Y, Y) - inner(X, Y) ** 2
        worst = max(worst, abs(num / den + 1.0))
        worst = max(worst, float(np.abs(christoffel(q) - christoffel_fd(q)).max()))
    return worst


def _suite_mean_curvature(tol):
    return max(abs(variational.mean_curvature(z0) - 1.0)
               for z0 in (0.1, 1.0, 10.0))


def _random_states(n, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x, y = rng.normal(size=2)
        z = math.exp(rng.normal(scale=0.7))
        p = rng.normal(size=3)
        out.append(CotangentState(PointH3(x, y, z), p))
    return out


def _suite_forms(tol):
    worst = 0.0
    for s in _random_states(30):
        res = flow_integrator.form_identity_residuals(s)
        worst = max(worst, max(res.values()))
    return worst


def _suite_psh(tol):
    worst = 0.0
    for s in _random_states(30, seed=13):
        z = s.q.z
        val = flow_integrator.plurisubharmonic_value(s)
        worst = max(worst, abs(val - (1.0 + z) / z**3))
    return worst


def _suite_flow(tol):
    s0 = CotangentState(PointH3(0.3, -0.2, 1.1), np.array([0.4, -0.3, 0.5]))
    h0 = flow_integrator.hamiltonian(s0)
    s1, path = flow_integrator.integrate_flow(s0, T=2.0, dt=1e-3,
                                              return_path=True)
    drift = abs(flow_integrator.hamiltonian(s1) - h0)
    res = flow_integrator.geodesic_residual(path, 1e-3)
    return max(drift, res / 10.0)  # residual tolerance is 10x looser


def _suite_cylinder(tol):
    cyl = flow_integrator.build_cyl_metric(2)
    grid = np.linspace(0.05, 2.0 - 0.05, 400)
    worst = max(0.0, -min(cyl.rho_second(float(a)) for a in grid))
    for a in np.linspace(0.1, 1.9, 40):
        for k in cyl.sectional_curvatures(float(a)):
            worst = max(worst, max(0.0, k))
    return worst


_SUITES = {
    "curvature": (_suite_curvature, 1e-6),
    "mean_curvature": (_suite_mean_curvature, 1e-8),
    "forms": (_suite_forms, 1e-5),
    "psh": (_suite_psh, 1e-5),
    "flow": (_suite_flow, 1e-5),
    "cylinder": (_suite_cylinder, 1e-12),
}


def run_verify(cfg: RunConfig, suites=None) -> tuple:
    cfg.validate()
    names = sorted(suites or _SUITES.keys())
    for n in names:
        if n not in _SUITES:
            raise ConfigError(f"unknown suite {n!r}")

    def one(name):
        fn, tol = _SUITES[name]
        tol = cfg.tolerances.get(name, cfg.tolerances.get("all", tol))
        res = fn(tol)
        return name, {"max_residual": res, "tolerance": tol,
                      "pass": bool(res <= tol)}

    results = dict(_pool_map(one, names, cfg.threads))
    ok = all(v["pass"] for v in results.values())
    report = {"subcommand": "verify", "ok": ok, "suites": results}
    _validate_verify_schema(report)
    return (EXIT_OK if ok else EXIT_ASSERT), report


def _validate_verify_schema(rep):
    assert isinstance(rep["ok"], bool)
    for v in rep["suites"].values():
        assert set(v) == {"max_residual", "tolerance", "pass"}
        assert isinstance(v["max_residual"], float)


# --------------------------------------------------------------- spectrum

def run_spectrum(cfg: RunConfig, out_path=None) -> tuple:
    cfg.validate()
    rep = _load_rep(cfg.input_path)
    a0 = _resolve_height(cfg.height, rep)
    try:
        spec = cord_engine.enumerate_cords(rep, a0, cfg.cutoff)
    except ValueError as e:
        raise ConfigError(str(e))
    if out_path:
        if cfg.out_format == "csv":
            spec.write_csv(out_path)
        else:
            spec.write_json(out_path)
    report = {"subcommand": "spectrum", "ok": True, "height": a0,
              "cutoff": cfg.cutoff, "classes": len(spec.entries),
              "shortest": spec.entries[0].length if spec.entries else None}
    _validate_scalar_schema(report, ("height", "cutoff"))
    return EXIT_OK, report


def _validate_scalar_schema(rep, float_keys):
    assert isinstance(rep["ok"], bool)
    for k in float_keys:
        assert isinstance(rep[k], float)


# ------------------------------------------------------------------ index

def run_index(cfg: RunConfig, no_assert=False, constant_chord=False) -> tuple:
    cfg.validate()
    if constant_chord:
        ker, coker = variational.constant_chord_hessian(N=cfg.mesh_size)
        ok = (ker == 2 and coker == 2)
        report = {"subcommand": "index", "ok": ok or no_assert,
                  "constant_chord": {"kernel": ker, "cokernel": coker}}
        return (EXIT_OK if report["ok"] else EXIT_ASSERT), report
    rep = _load_rep(cfg.input_path)
    a0 = _resolve_height(cfg.height, rep)
    classes = cord_engine.canonical_classes(rep, a0, cfg.cutoff)

    def one(g):
        cord = cord_engine.cord_for_class(g, a0)
        H = variational.hessian(cord, N=cfg.mesh_size)
        idx, nul = variational.index_nullity(H)
        return {"class_word": g.word, "length": cord.length,
                "index": idx, "nullity": nul,
                "min_eigenvalue": variational.smallest_eigenvalue(H)}

    rows = _pool_map(one, classes, cfg.threads)
    rows.sort(key=lambda r: (r["length"], r["class_word"]))
    ok = all(r["index"] == 0 and r["nullity"] == 0 for r in rows)
    report = {"subcommand": "index", "ok": ok or no_assert, "rows": rows}
    return (EXIT_OK if report["ok"] else EXIT_ASSERT), report


# ------------------------------------------------------------------ torus

def run_torus(p, q, ambient, Lmax, out_prefix=None) -> tuple:
    try:
        params = torus_knot_h2r.TorusKnotParams(p, q, ambient)
    except ValueError as e:
        raise ConfigError(str(e))
    fams = torus_knot_h2r.enumerate_surface_cords(params, Lmax)
    table = torus_knot_h2r.RankTable({0: len(fams), 1: len(fams)}, Lmax)
    report = {"subcommand": "torus", "ok": True,
              "params": {"p": p, "q": q, "ambient": ambient},
              "euler_char": torus_knot_h2r.euler_char(params),
              "rank_table": table.to_dict()}
    if out_prefix:
        with open(f"{out_prefix}_ranks.json", "w") as f:
            json.dump(report, f, indent=1)
        with open(f"{out_prefix}_families.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["word", "source_cusp", "target_cusp", "length",
                        "shift"])
            for fam in fams:
                w.writerow([fam.word, fam.source_cusp, fam.target_cusp,
                            f"{fam.length:.12g}", fam.shift])
    return EXIT_OK, report


# --------------------------------------------------------------- triangle

def run_triangle(cfg: RunConfig, words, out_path=None) -> tuple:
    cfg.validate()
    if len(words) != 3:
        raise ConfigError("triangle needs exactly three class words")
    rep = _load_rep(cfg.input_path)
    a0 = _resolve_height(cfg.height, rep)
    spec = cord_engine.enumerate_cords(rep, a0, cfg.cutoff)
    try:
        catalog = triangle_geometry.triangle_catalog(rep, spec, tuple(words))
    except ValueError as e:
        raise ConfigError(str(e))
    data = [h.to_dict() for h in catalog]
    report = {"subcommand": "triangle", "ok": True, "classes": list(words),
              "triangles": data}
    if out_path:
        with open(out_path, "w") as f:
            json.dump(report, f, indent=1)
    return EXIT_OK, report


# ------------------------------------------------------------------- main

def _build_parser():
    ap = argparse.ArgumentParser(prog="cordspec")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(s):
        s.add_argument("--input", default=None, help="holonomy JSON file")
        s.add_argument("--height", default="auto")
        s.add_argument("--cutoff", type=float, default=4.0)
        s.add_argument("--mesh-size", type=int, default=256)
        s.add_argument("--format", choices=("json", "csv"), default="json")
        s.add_argument("--threads", type=int, default=None)
        s.add_argument("--out", default=None)

    v = sub.add_parser("verify")
    v.add_argument("--suite", action="append", default=None)
    v.add_argument("--tol", type=float, default=None)
    common(v)
    common(sub.add_parser("spectrum"))
    ix = sub.add_parser("index")
    ix.add_argument("--no-assert", action="store_true")
    ix.add_argument("--constant-chord", action="store_true")
    common(ix)
    t = sub.add_parser("torus")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--ambient", choices=("s3", "s2xs1"), default="s3")
    t.add_argument("--max-length", type=float, default=8.0)
    t.add_argument("--out", default=None)
    tr = sub.add_parser("triangle")
    tr.add_argument("classes", nargs=3)
    common(tr)
    return ap


def _cfg_from_args(args) -> RunConfig:
    threads = args.threads if getattr(args, "threads", None) else \
        _default_threads()
    height = args.height
    if height != "auto":
        try:
            height = float(height)
        except ValueError:
            raise ConfigError("height must be a number or 'auto'")
    return RunConfig(subcommand=args.cmd, input_path=args.input,
                     height=height, cutoff=args.cutoff,
                     mesh_size=args.mesh_size, out_format=args.format,
                     threads=threads)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.cmd == "torus":
            code, report = run_torus(args.p, args.q, args.ambient,
                                     args.max_length, out_prefix=args.out)
        else:
            cfg = _cfg_from_args(args)
            if args.cmd == "verify":
                if args.tol is not None:
                    cfg.tolerances["all"] = args.tol
                code, report = run_verify(cfg, suites=args.suite)
            elif args.cmd == "spectrum":
                code, report = run_spectrum(cfg, out_path=args.out)
            elif args.cmd == "index":
                code, report = run_index(cfg, no_assert=args.no_assert,
                                         constant_chord=args.constant_chord)
            else:
                code, report = run_triangle(cfg, args.classes,
                                            out_path=args.out)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(report, indent=1, default=float))
    return code


if __name__ == "__main__":
    sys.exit(main())
