"""Command-line front end.

Subcommands: ``curve``, ``diagnose``, ``potential``, ``criterion``,
``lemma-check`` and ``zoo-list``.  Every command writes its files into
``--out`` and finishes with ``manifest.json`` listing each file with its
SHA-256.  Exit codes: 0 ok, 2 configuration error, 3 curve construction
error, 4 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._trend import DIVERGENT
from .argtrack import total_arg_variation
from .curve import Curve, CurveError
from .density import parse_density
from .diagnostics import (default_xi_sample, density_modulus, dini_integral, kral_functional,
                          lemma_inequality_check, oscillation_profile, theorem3_report,
                          theta_report)
from .integrals import CauchyEvaluator, NonConvergenceError, criterion_sweep, sokhotski_values
from .io import sha256_file, write_csv, write_json
from .zoo import AHLFORS_CONSTANT_EX4, ZOO, _DEPTH_DEFAULT, make_curve, truncation_scale

EXIT_OK, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_NONCONVERGENCE = 0, 2, 3, 4

DEFAULTS = {
    "zoo": None,
    "depth": None,
    "resolution": 1e-3,
    "polyline": None,
    "density": None,
    "out": "layerpot-out",
    "threads": None,
    "strict": False,
    "grid": "64x64",
    "boundary_sweep": False,
    "n_xi": 16,
    "eps": [2.0 ** -k for k in range(2, 8)],
    "grid_size": 3600,
    "samples": 50,
    "seed": 0,
}


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class StrictFailure(RuntimeError):
    """A convergence requirement failed under ``--strict``."""


@dataclass
class RunConfig:
    command: str
    values: dict

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def threads(self):
        t = self.values.get("threads")
        if t is None:
            t = os.environ.get("LAYERPOT_THREADS", 1)
        try:
            t = int(t)
        except (TypeError, ValueError):
            raise ConfigError(f"invalid thread count {t!r}") from None
        if t < 1:
            raise ConfigError("thread count must be >= 1")
        return t


@dataclass
class Outputs:
    """Tracks written files so a failed run can remove them."""

    root: Path
    files: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def path(self, name):
        p = self.root / name
        self.files.append(p)
        return p

    def cleanup(self):
        for p in self.files + [self.root / "manifest.json"]:
            if p.exists():
                p.unlink()

    def manifest(self, cfg, wall):
        inv = [{"name": p.name, "sha256": sha256_file(p), "bytes": p.stat().st_size}
               for p in self.files]
        write_json(self.root / "manifest.json", {
            "command": cfg.command, "config": cfg.values, "version": __version__,
            "wall_time": wall, "flags": self.flags, "files": inv})


def pool_map(fn, items, threads):
    """Ordered map over a thread pool."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# -- configuration ----------------------------------------------------------

def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_config(args):
    vals = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        vals.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None and v is not False:
            vals[key] = v
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip().replace("-", "_")
        if k not in DEFAULTS:
            raise ConfigError(f"unknown configuration key {k!r}")
        vals[k] = _parse_value(v)
    unknown = set(vals) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    cfg = RunConfig(args.command, vals)
    _validate(cfg)
    return cfg


def _validate(cfg):
    v = cfg.values
    if cfg.command != "zoo-list":
        if (v["zoo"] is None) == (v["polyline"] is None):
            raise ConfigError("give exactly one of --zoo and --polyline")
    if v["zoo"] is not None and v["zoo"] not in ZOO and v["zoo"] not in _ALIASES_OK:
        raise ConfigError(f"unknown zoo curve {v['zoo']!r}")
    if not (isinstance(v["resolution"], (int, float)) and v["resolution"] > 0):
        raise ConfigError("resolution must be positive")
    if v["depth"] is not None and (int(v["depth"]) != v["depth"] or v["depth"] < 2):
        raise ConfigError("depth must be an integer >= 2")
    for key in ("n_xi", "grid_size", "samples"):
        if int(v[key]) != v[key] or v[key] < 1:
            raise ConfigError(f"{key} must be a positive integer")
    if v["grid_size"] < 360:
        raise ConfigError("grid_size must be at least 360")
    eps = np.asarray(v["eps"], dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise ConfigError("eps grid must be nonempty and positive")
    _parse_grid(v["grid"])
    cfg.threads  # validates


_ALIASES_OK = {"lyapunov_blob", "example1", "example2", "example3", "example4"}


def _parse_grid(text):
    try:
        nx, ny = (int(p) for p in str(text).lower().split("x"))
    except ValueError:
        raise ConfigError(f"grid must look like 64x64, got {text!r}") from None
    if nx < 1 or ny < 1:
        raise ConfigError("grid sizes must be positive")
    return nx, ny


def load_curve(cfg):
    if cfg.zoo is not None:
        return make_curve(cfg.zoo, depth=cfg.depth, resolution=cfg.resolution)
    path = str(cfg.polyline)
    if not os.path.exists(path):
        raise ConfigError(f"polyline file {path!r} not found")
    if path.endswith(".json"):
        return Curve.from_json(path)
    return Curve.from_csv(path)


def load_density(cfg, curve, default="re"):
    spec = cfg.density if cfg.density is not None else default
    try:
        return parse_density(spec, curve)
    except (ValueError, KeyError, OSError) as exc:
        raise ConfigError(f"bad density spec {spec!r}: {exc}") from None


def arc_sample(curve, n):
    s = curve.length * np.arange(n) / n
    return curve.point_at(s)


def _origin_on_curve(curve):
    _, _, d = curve.nearest(0.0)
    return float(np.atleast_1d(d)[0]) < 1e-12 * curve.diameter


# -- commands ----------------------------------------------------------------

def cmd_curve(cfg, out: Outputs):
    c = load_curve(cfg)
    c.to_json(out.path("curve.json"))
    c.to_csv(out.path("curve.csv"))
    summary = {"length": c.length, "diameter": c.diameter, "area": c.signed_area,
               "n_segments": c.n_segments, "generator": c.generator_id, "simple": "PASS"}
    write_json(out.path("summary.json"), summary)
    out.flags["simple"] = "PASS"
    return summary


def _variation_status(curve, xi):
    try:
        return total_arg_variation(curve, xi)
    except ValueError:
        # shallow truncations leave too few radii above the truncation scale
        return total_arg_variation(curve, xi, (curve.diameter / 4) * 2.0 ** -np.arange(8))


def _partition(cfg, curve):
    """Partition for the sufficient-condition report, or None if unknown."""
    gid = curve.generator_id
    if gid == "ex4":
        v = curve.vertices[:-1]
        junction = np.flatnonzero(np.diff(curve.seg_piece, prepend=curve.seg_piece[-1]) != 0)
        idx = np.unique(np.concatenate([np.linspace(0, v.size - 1, 24).astype(int), junction[::3]]))
        g2 = [z for z in v[idx] if abs(z) > 0]
        return [0.0], g2, (lambda x: min(2 * abs(x), 0.5)), 0.5
    if gid in ("circle", "ellipse", "lyapunov"):
        R0 = min(0.5, curve.diameter / 4)
        return [], list(arc_sample(curve, 8)), (lambda x: R0), R0
    return None


def cmd_diagnose(cfg, out: Outputs):
    c = load_curve(cfg)
    default_density = "ex4-log" if c.generator_id == "ex4" else "re"
    g = load_density(cfg, c, default_density)
    th = cfg.threads
    diam = c.diameter
    verdicts = {}

    eps = diam / 4 * 2.0 ** -np.arange(10)
    full = theta_report(c, eps)
    xs = default_xi_sample(c)
    half = theta_report(c, eps, xs[::2])
    stable = abs(full.constant - half.constant) <= 0.05 * full.constant
    verdicts["ahlfors"] = "PASS" if (np.isfinite(full.constant) and stable) else "FAIL"
    write_csv(out.path("regularity.csv"), ["eps", "theta", "ratio"],
              zip(full.eps, full.theta, full.ratio))

    xi = arc_sample(c, cfg.n_xi)
    if _origin_on_curve(c):
        xi = np.concatenate([[0.0 + 0j], xi])
    kral = pool_map(lambda z: kral_functional(c, z, cfg.grid_size), xi, th)
    var = pool_map(lambda z: _variation_status(c, z), xi, th)
    write_csv(out.path("kral.csv"), ["x", "y", "kral", "arg_variation", "status"],
              [(z.real, z.imag, k, v.value, v.status) for z, k, v in zip(xi, kral, var)])
    verdicts["kral"] = "PASS" if all(v.converged for v in var) else "FAIL"
    verdicts["kral_sup"] = float(max(kral))

    if c.generator_id == "ex3" and cfg.zoo is not None:
        depth = int(c.params["depth"])
        depths = sorted({4, 6, 8, depth} & set(range(2, depth + 1)))
        sweep = pool_map(lambda n: kral_functional(make_curve("ex3", depth=n, resolution=cfg.resolution),
                                                   0.0, 2 ** 20), depths, th)
        write_csv(out.path("kral_depth_sweep.csv"), ["depth", "kral"], zip(depths, sweep))
        verdicts["kral_depth_trend"] = ("INCREASING" if np.all(np.diff(sweep) > 0)
                                        else "NOT_INCREASING")

    xi0 = 0.0 if _origin_on_curve(c) else complex(c.vertices[0])
    floor = max(truncation_scale(c), diam * 2.0 ** -12)
    prof = oscillation_profile(c, xi0, floor, diam / 4)
    write_csv(out.path("oscillation.csv"), ["R", "k", "phi", "k_hat", "phi_hat"],
              zip(prof.R, prof.k, prof.phi, prof.k_hat, prof.phi_hat))

    table = density_modulus(c, g, np.geomspace(max(floor / 4, diam * 1e-7), diam, 200))
    write_csv(out.path("modulus.csv"), ["eta", "omega"], zip(table.eta, table.omega))
    try:
        dini = dini_integral(table, "plain")
        verdicts["dini"] = "FAIL" if dini.status == DIVERGENT else "PASS"
        verdicts["dini_status"] = dini.status
    except ValueError:
        verdicts["dini"] = "SKIPPED"

    part = _partition(cfg, c)
    if part is None:
        verdicts["theorem3"] = "SKIPPED"
    else:
        g1, g2, r_of, R0 = part
        rep = theorem3_report(c, g, g1, g2, r_of, R0, table=table)
        verdicts["theorem3"] = rep.verdict
        verdicts["theorem3_sup_integral"] = rep.sup_integral
        verdicts["theorem3_sup_variation"] = rep.sup_variation
        write_json(out.path("theorem3.json"), rep.to_dict())
    if c.generator_id == "ex4":
        verdicts["ahlfors_bound"] = AHLFORS_CONSTANT_EX4
    write_json(out.path("report.json"), {
        "curve": {"generator": c.generator_id, "params": c.params, "n_segments": c.n_segments},
        "density": g.to_dict(), "regularity": full.to_dict(), "oscillation": prof.to_dict(),
        "modulus": table.to_dict(), "verdicts": verdicts})
    out.flags.update({k: v for k, v in verdicts.items() if isinstance(v, str)})
    if cfg.strict and verdicts.get("theorem3") == "FAIL":
        raise StrictFailure("sufficient-condition report did not pass")
    return verdicts


def cmd_potential(cfg, out: Outputs):
    c = load_curve(cfg)
    g = load_density(cfg, c, "re")
    nx, ny = _parse_grid(cfg.grid)
    v = c.vertices
    pad = 0.1 * c.diameter
    xs = np.linspace(v.real.min() - pad, v.real.max() + pad, nx)
    ys = np.linspace(v.imag.min() - pad, v.imag.max() + pad, ny)
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    _, _, dist = c.nearest(Z)
    off = np.asarray(dist) > 1e-9 * c.diameter
    ev = CauchyEvaluator(c, g)
    chunks = np.array_split(np.flatnonzero(off), max(1, min(64, off.sum() // 64 + 1)))
    parts = pool_map(lambda ix: ev(Z[ix]), chunks, cfg.threads)
    vals = np.full(Z.size, np.nan + 0j)
    for ix, p in zip(chunks, parts):
        vals[ix] = p
    inside = c.winding_number(Z)
    write_csv(out.path("field.csv"), ["x", "y", "inside", "re", "im"],
              zip(Z.real, Z.imag, inside, vals.real, vals.imag))
    result = {"grid": [nx, ny], "on_curve_skipped": int((~off).sum())}
    if cfg.boundary_sweep:
        xi = arc_sample(c, cfg.n_xi)
        if _origin_on_curve(c):
            xi = np.concatenate([[0.0 + 0j], xi])

        def one(z):
            try:
                return sokhotski_values(c, g, z)
            except NonConvergenceError:
                return None

        res = pool_map(one, xi, cfg.threads)
        rows, bad = [], 0
        for z, r in zip(xi, res):
            if r is None:
                bad += 1
                rows.append((z.real, z.imag, np.nan, np.nan, np.nan, np.nan, False, False))
            else:
                rows.append((r.xi.real, r.xi.imag, r.g_xi, r.re_plus, r.re_minus, r.jump,
                             r.pv.converged, r.pv.im_converged))
        write_csv(out.path("boundary.csv"),
                  ["x", "y", "g", "re_plus", "re_minus", "jump", "pv_converged", "im_converged"], rows)
        result["boundary_nonconverged"] = bad
        out.flags["boundary"] = "PASS" if bad == 0 else "NONCONVERGED"
        if cfg.strict and bad:
            raise StrictFailure(f"{bad} boundary points did not converge")
    write_json(out.path("summary.json"), result)
    return result


def cmd_criterion(cfg, out: Outputs):
    c = load_curve(cfg)
    g = load_density(cfg, c, "re")
    eps = sorted(np.asarray(cfg.eps, dtype=float), reverse=True)
    xi = arc_sample(c, cfg.n_xi)
    if _origin_on_curve(c):
        xi = np.concatenate([[0.0 + 0j], xi])
    parts = pool_map(lambda z: criterion_sweep(c, g, eps, [z]), xi, cfg.threads)
    best = []
    for j in range(len(eps)):
        # first maximum in sample order keeps the argmax deterministic
        cand = [p[j] for p in parts]
        best.append(cand[int(np.argmax([r.value for r in cand]))])
    write_csv(out.path("criterion.csv"), ["eps", "value", "argmax_x", "argmax_y", "argmax_delta"],
              [(r.eps, r.value, r.argmax_xi.real, r.argmax_xi.imag, r.argmax_delta) for r in best])
    vals = np.array([r.value for r in best])
    mono = bool(np.all(np.diff(vals) < 0)) if vals.size > 1 else True
    out.flags["criterion_decreasing"] = "PASS" if mono else "FAIL"
    write_json(out.path("summary.json"), {"eps": eps, "values": vals, "decreasing": mono})
    return vals


def cmd_lemma_check(cfg, out: Outputs):
    c = load_curve(cfg)
    g = load_density(cfg, c, "ex4-log" if c.generator_id == "ex4" else "re")
    rng = np.random.default_rng(int(cfg.seed))
    idx = rng.integers(0, c.n_segments, size=int(cfg.samples))
    R = np.exp(rng.uniform(np.log(c.diameter * 1e-3), np.log(c.diameter / 2), size=idx.size))
    table = density_modulus(c, g, np.geomspace(c.diameter * 1e-7, c.diameter, 400))
    res = pool_map(lambda a: lemma_inequality_check(c, g, c.vertices[a[0]], a[1], table=table),
                   list(zip(idx, R)), cfg.threads)
    write_csv(out.path("lemma.csv"), ["x", "y", "R", "lhs", "rhs", "ratio", "k", "phi", "Omega"],
              [(r["xi"].real, r["xi"].imag, r["R"], r["lhs"], r["rhs"], r["ratio"], r["k"],
                r["phi"], r["Omega"]) for r in res])
    worst = max(r["ratio"] for r in res)
    ok = worst <= 1.0
    out.flags["lemma"] = "PASS" if ok else "FAIL"
    write_json(out.path("summary.json"), {"max_ratio": worst, "samples": len(res), "pass": ok})
    if cfg.strict and not ok:
        raise StrictFailure("annulus inequality violated")
    return worst


COMMANDS = {
    "curve": cmd_curve,
    "diagnose": cmd_diagnose,
    "potential": cmd_potential,
    "criterion": cmd_criterion,
    "lemma-check": cmd_lemma_check,
}


def zoo_list():
    lines = []
    for name in ZOO:
        d = _DEPTH_DEFAULT.get(name)
        lines.append(name if d is None else f"{name} (default depth {d})")
    return lines


def make_parser():
    p = argparse.ArgumentParser(prog="layerpot", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["zoo-list"]:
        s = sub.add_parser(name)
        if name == "zoo-list":
            continue
        s.add_argument("--zoo")
        s.add_argument("--depth", type=int)
        s.add_argument("--resolution", type=float)
        s.add_argument("--polyline")
        s.add_argument("--density")
        s.add_argument("--out")
        s.add_argument("--config")
        s.add_argument("--set", action="append", metavar="KEY=VALUE")
        s.add_argument("--threads", type=int)
        s.add_argument("--strict", action="store_true")
        s.add_argument("--grid")
        s.add_argument("--boundary-sweep", dest="boundary_sweep", action="store_true")
        s.add_argument("--n-xi", dest="n_xi", type=int)
        s.add_argument("--grid-size", dest="grid_size", type=int)
        s.add_argument("--samples", type=int)
        s.add_argument("--seed", type=int)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    if args.command == "zoo-list":
        print("\n".join(zoo_list()))
        return EXIT_OK
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    root = Path(cfg.out)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"configuration error: cannot create {root}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Outputs(root)
    t0 = time.perf_counter()
    try:
        COMMANDS[cfg.command](cfg, out)
    except ConfigError as exc:
        out.cleanup()
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CurveError as exc:
        out.cleanup()
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (StrictFailure, NonConvergenceError) as exc:
        out.cleanup()
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except BaseException:
        out.cleanup()
        raise
    out.manifest(cfg, round(time.perf_counter() - t0, 3))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
