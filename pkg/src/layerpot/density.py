"""Real-valued densities on curves.

A density is evaluated at curve points ``t`` (complex) and, for tabulated
densities, at the matching arc coordinates ``s``.  Closed-form rules are
addressed by short identifiers such as ``const:1``, ``re``, ``ex4-log`` or
``holder:0.5,0.2``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["Density", "parse_density", "RULES"]


def _const(c=1.0):
    c = float(c)
    return lambda t: np.full(np.shape(t), c)


def _re():
    return lambda t: np.real(t)


def _im():
    return lambda t: np.imag(t)


def _log_rough():
    def g(t):
        r = np.abs(t)
        with np.errstate(divide="ignore"):
            out = -1.0 / (np.log(r) - 1.0)
        return np.where(r > 0, out, 0.0)
    return g


def _holder(alpha=0.5, x0=0.0):
    alpha, x0 = float(alpha), float(x0)
    return lambda t: np.abs(np.real(t) - x0) ** alpha


RULES = {
    "const": _const,
    "re": _re,
    "im": _im,
    "ex4-log": _log_rough,
    "holder": _holder,
}


@dataclass(frozen=True, eq=False)
class Density:
    """Density ``g`` on a curve.

    Parameters
    ----------
    rule_id : str
        Registered rule name, ``"table"`` or ``"callable"``.
    params : dict
        Rule parameters (for tables: arrays ``s`` and ``g``).
    func : callable, optional
        Vectorized ``func(t, s)`` returning real values.
    """

    rule_id: str
    params: dict = field(default_factory=dict)
    func: Callable | None = None
    uses_arc: bool = False

    @classmethod
    def from_rule(cls, rule_id, *args):
        if rule_id not in RULES:
            raise ValueError(f"unknown density rule '{rule_id}'")
        f = RULES[rule_id](*args)
        names = {"const": ["c"], "holder": ["alpha", "x0"]}.get(rule_id, [])
        params = {n: float(a) for n, a in zip(names, args)}
        return cls(rule_id, params, lambda t, s=None: f(t))

    @classmethod
    def from_callable(cls, f, name="callable"):
        """Wrap ``f(t)`` returning real values at complex points."""
        return cls(name, {}, lambda t, s=None: np.real(np.asarray(f(t))))

    @classmethod
    def from_table(cls, s, g, length):
        """Periodic piecewise-linear interpolation of samples ``g`` at arc coordinates ``s``."""
        s = np.asarray(s, dtype=float)
        g = np.asarray(g, dtype=float)
        order = np.argsort(s)
        s, g = s[order], g[order]
        if s.size < 2 or np.any(np.diff(s) <= 0):
            raise ValueError("density table needs at least two distinct arc coordinates")
        if not np.all(np.isfinite(g)):
            raise ValueError("density table contains non-finite values")
        L = float(length)

        def f(t, sv=None):
            if sv is None:
                raise ValueError("tabulated density needs arc coordinates")
            return np.interp(np.mod(sv, L), s, g, period=L)

        return cls("table", {"s": s.tolist(), "g": g.tolist(), "length": L}, f, uses_arc=True)

    def __call__(self, t, s=None):
        t = np.asarray(t, dtype=complex)
        return np.asarray(self.func(t, s), dtype=float) * np.ones(t.shape)

    def at(self, curve, seg, u, rev=False):
        """Density at curve positions given as segment coordinates."""
        t = curve.eval(seg, u, rev)
        s = None
        if self.uses_arc:
            uu = np.where(rev, 1.0 - np.asarray(u), u)
            s = curve.arc_coordinate(seg, uu)
        return self(t, s)

    def to_dict(self):
        return {"rule_id": self.rule_id, "params": self.params}

    def __repr__(self):
        return f"Density({self.rule_id!r}, {self.params})"


def parse_density(spec, curve=None):
    """Build a density from ``"rule:arg1,arg2"``, a JSON file or a CSV table."""
    if isinstance(spec, Density):
        return spec
    if isinstance(spec, dict):
        rule = spec["rule_id"]
        params = spec.get("params", {})
        if rule == "table":
            return Density.from_table(params["s"], params["g"], params["length"])
        return Density.from_rule(rule, *params.values())
    spec = str(spec)
    if spec.endswith(".json"):
        with open(spec) as fh:
            return parse_density(json.load(fh), curve)
    if spec.endswith(".csv"):
        if curve is None:
            raise ValueError("a CSV density needs the curve for its period")
        with open(spec, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
        arr = np.array([[float(r[0]), float(r[1])] for r in rows])
        return Density.from_table(arr[:, 0], arr[:, 1], curve.length)
    name, _, args = spec.partition(":")
    vals = [float(a) for a in args.split(",") if a.strip()] if args else []
    return Density.from_rule(name.strip(), *vals)
