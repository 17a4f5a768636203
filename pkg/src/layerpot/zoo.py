"""Reference curves and the four rough example curves.

Every constructor returns a validated :class:`~layerpot.curve.Curve` built
from analytic pieces.  The infinitely pieced constructions are truncated at
a depth ``N`` and closed near the origin by a short straight stitch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .curve import CurveError, Piece, arc_piece, build_polyline, line_piece
from .density import Density

__all__ = [
    "ZooSpec",
    "ZOO",
    "make_curve",
    "make_circle",
    "make_ellipse",
    "make_lyapunov_blob",
    "make_example1",
    "make_example2",
    "make_example3",
    "make_example4",
    "make_density_example4",
    "example2_r0",
    "example3_ellipse",
    "AHLFORS_CONSTANT_EX4",
    "truncation_scale",
]

LN2 = np.log(2.0)
AHLFORS_CONSTANT_EX4 = 4.0 + np.sqrt(1.0 + LN2 ** 2) / LN2


@dataclass
class ZooSpec:
    """Named zoo curve with truncation depth and resolution."""

    name: str
    depth: int | None = None
    resolution: float = 1e-3
    params: dict = field(default_factory=dict)

    def build(self):
        return make_curve(self.name, depth=self.depth, resolution=self.resolution, **self.params)


def make_circle(radius=1.0, resolution=1e-3):
    if not radius > 0:
        raise CurveError("radius must be positive")
    p = arc_piece(0.0, radius, 0.0, 2 * np.pi, name="circle")
    return build_polyline([p], h=resolution, generator_id="circle",
                          params={"radius": float(radius)})


def make_ellipse(a=2.0, b=1.0, resolution=1e-3):
    if not (a > 0 and b > 0):
        raise CurveError("semi-axes must be positive")
    a, b = float(a), float(b)
    p = Piece("ellipse", lambda v: a * np.cos(v) + 1j * b * np.sin(v), 0.0, 2 * np.pi,
              deriv=lambda v: -a * np.sin(v) + 1j * b * np.cos(v))
    return build_polyline([p], h=resolution, generator_id="ellipse", params={"a": a, "b": b})


_BLOB_HARMONICS = ((2, 1.0, 0.0), (3, 0.5, 0.7), (5, 0.25, 1.9))


def make_lyapunov_blob(amplitude=0.1, alpha=1.0, resolution=1e-3):
    """Perturbed unit circle ``r(phi) = 1 + amplitude * P(phi)``.

    ``P`` is a fixed trigonometric polynomial with ``max |P| <= 1``, so the
    tangent angle is smooth and Hölder for every exponent; ``alpha`` is only
    recorded.
    """
    A = float(amplitude)
    if not 0 <= A < 0.25:
        raise CurveError("amplitude must lie in [0, 0.25) to keep the blob simple")
    norm = sum(c for _, c, _ in _BLOB_HARMONICS)

    def rad(p):
        return 1 + A * sum(c * np.cos(k * p + ph) for k, c, ph in _BLOB_HARMONICS) / norm

    def drad(p):
        return -A * sum(k * c * np.sin(k * p + ph) for k, c, ph in _BLOB_HARMONICS) / norm

    piece = Piece("blob", lambda p: rad(p) * np.exp(1j * p), 0.0, 2 * np.pi,
                  deriv=lambda p: (drad(p) + 1j * rad(p)) * np.exp(1j * p))
    return build_polyline([piece], h=resolution, generator_id="lyapunov",
                          params={"amplitude": A, "alpha": float(alpha),
                                  "harmonics": [list(x) for x in _BLOB_HARMONICS]})


# -- examples 1 and 4 -----------------------------------------------------

def _bumpy_pieces(N, alpha, spiral, dspiral):
    if int(N) != N or N < 2:
        raise CurveError("truncation depth must be an integer >= 2")
    N = int(N)
    pieces = [arc_piece(0.0, 1.0, 0.0, np.pi, name="semicircle"),
              line_piece(-1.0, 0.0, name="segment[-1,0]"),
              line_piece(0.0, 2.0 ** (-2 * N), name="stitch")]
    for m in range(N, 0, -1):
        lo, hi = 2.0 ** (-2 * m), 2.0 ** (-2 * m + 1)
        pieces.append(arc_piece(0.0, lo, 0.0, alpha(2 * m), name=f"arc{2 * m}"))
        pieces.append(Piece(f"spiral{m}", spiral, lo, hi, deriv=dspiral))
        pieces.append(arc_piece(0.0, hi, alpha(2 * m - 1), 0.0, name=f"arc{2 * m - 1}"))
        pieces.append(line_piece(hi, 2.0 * hi, name=f"segment{m}"))
    return pieces


def make_example1(N=6, resolution=1e-3):
    """Bounded arg-variation curve with unbounded tangent rotation.

    Pieces: upper unit semicircle, ``[-1, 0]``, real segments
    ``[2^(1-2n), 2^(2-2n)]``, arcs ``2^-n e^{i phi}``, ``phi in [0, 2^-n]``
    and spirals ``r e^{ir}``, ``r in [2^-2n, 2^(1-2n)]``.
    """
    pieces = _bumpy_pieces(
        N, lambda n: 2.0 ** (-n),
        lambda r: r * np.exp(1j * r),
        lambda r: (1 + 1j * r) * np.exp(1j * r))
    return build_polyline(pieces, h=resolution, generator_id="ex1",
                          params={"depth": int(N), "resolution": resolution})


def _ex4_spiral(r):
    return r * np.exp(-1j * LN2 / np.log(r))


def _ex4_dspiral(r):
    lr = np.log(r)
    return np.exp(-1j * LN2 / lr) * (1 + 1j * LN2 / lr ** 2)


def make_example4(N=8, resolution=1e-3):
    """Ahlfors-regular curve with unbounded arg-variation at the origin.

    Same layout as example 1 with arcs of angle ``1/n`` and spirals
    ``r exp(-i ln2 / ln r)``.
    """
    pieces = _bumpy_pieces(N, lambda n: 1.0 / n, _ex4_spiral, _ex4_dspiral)
    return build_polyline(pieces, h=resolution, generator_id="ex4",
                          params={"depth": int(N), "resolution": resolution})


def make_density_example4():
    """``g(t) = -1 / (ln|t| - 1)``, ``g(0) = 0``."""
    return Density.from_rule("ex4-log")


# -- example 2 ------------------------------------------------------------

def _ex2_t(r):
    return r * np.exp(-1j / np.log(r))


def _ex2_dt(r):
    lr = np.log(r)
    return np.exp(-1j / lr) * (1 + 1j / lr ** 2)


def example2_r0():
    """Smallest positive root of ``Re t'(r) = 0`` for the example 2 spiral."""
    f = lambda r: float(np.real(_ex2_dt(r)))
    grid = np.linspace(1e-6, 0.99, 4000)
    vals = np.array([f(r) for r in grid])
    idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if idx.size == 0:
        raise CurveError("could not bracket the root of Re t'(r)")
    k = idx[0]
    return brentq(f, grid[k], grid[k + 1], xtol=1e-16, rtol=4 * np.finfo(float).eps)


def _glue_arc(a, b, v1, name):
    # arc of x^2/a^2 + (y-b)^2/b^2 = 1 traversed counterclockwise, ending at 0;
    # v measures the angle back from the bottom point so small v stays exact
    return Piece(name, lambda v: -a * np.sin(v) + 2j * b * np.sin(v / 2) ** 2, float(v1), 0.0,
                 deriv=lambda v: -a * np.cos(v) + 1j * b * np.sin(v))


def make_example2(resolution=1e-3):
    """Smooth Král curve whose arg modulus fails the Dini test at 0."""
    r0 = example2_r0()
    p = _ex2_t(r0)
    a, b = float(p.real), float(p.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        spiral = Piece("spiral", _ex2_t, 0.0, r0, deriv=_ex2_dt)
    ellipse = _glue_arc(a, b, 1.5 * np.pi, "ellipse")
    return build_polyline([spiral, ellipse], h=resolution, generator_id="ex2",
                          params={"r0": r0, "a": a, "b": b, "resolution": resolution})


# -- example 3 ------------------------------------------------------------

def _ex3_t(r):
    return r * np.exp(-1j * (r / np.log(r)) * np.cos(np.pi / r))


def _ex3_dt(r):
    lr = np.log(r)
    psi = -(r / lr) * np.cos(np.pi / r)
    dpsi = -(lr - 1) * np.cos(np.pi / r) / lr ** 2 - np.pi * np.sin(np.pi / r) / (r * lr)
    return np.exp(1j * psi) * (1 + 1j * r * dpsi)


def example3_ellipse():
    """Semi-axes ``(a, b)`` and start angle of the ellipse arc closing example 3.

    The ellipse ``x^2/a^2 + (y-b)^2/b^2 = 1`` is tangent to the real axis at
    0 and tangent to the spiral at ``t(1/2)``; both conditions are solved in
    closed form.
    """
    p = _ex3_t(0.5)
    d = _ex3_dt(0.5)
    x1, y1 = p.real, p.imag
    c = x1 * d.imag / (-d.real)
    w = y1 ** 2 / (c + 2 * y1)
    b = y1 - w
    a2 = -b ** 2 * d.real * x1 / (d.imag * w)
    if not (b > 0 and a2 > 0):
        raise CurveError("no tangent ellipse through the glue points")
    a = np.sqrt(a2)
    theta1 = np.arctan2((y1 - b) / b, x1 / a)
    return float(a), float(b), float(1.5 * np.pi - theta1)


def make_example3(N=8, resolution=1e-3):
    """Smooth curve with Hölder arg branches that is not a Král curve.

    The oscillating arc is kept for ``r in [2^-N, 1/2]`` and joined to 0 by a
    straight stitch.
    """
    if int(N) != N or N < 2:
        raise CurveError("truncation depth must be an integer >= 2")
    N = int(N)
    r_min = 2.0 ** (-N)
    x = np.arange(2.0, 1.0 / r_min, 1.0 / 16)
    init = np.concatenate([[r_min], (1.0 / x)[::-1]])
    init = np.unique(init)
    osc = Piece("oscillating", _ex3_t, r_min, 0.5, deriv=_ex3_dt, init=lambda: init)
    stitch = line_piece(0.0, complex(_ex3_t(r_min)), name="stitch")
    a, b, v1 = example3_ellipse()
    ellipse = _glue_arc(a, b, v1, "ellipse")
    return build_polyline([stitch, osc, ellipse], h=resolution, generator_id="ex3",
                          params={"depth": N, "r_min": r_min, "a": a, "b": b,
                                  "resolution": resolution})


ZOO = {
    "circle": make_circle,
    "ellipse": make_ellipse,
    "lyapunov": make_lyapunov_blob,
    "ex1": make_example1,
    "ex2": make_example2,
    "ex3": make_example3,
    "ex4": make_example4,
}
_ALIASES = {"lyapunov_blob": "lyapunov", "example1": "ex1", "example2": "ex2",
            "example3": "ex3", "example4": "ex4"}
_DEPTH_DEFAULT = {"ex1": 6, "ex3": 8, "ex4": 8}


def make_curve(name, depth=None, resolution=1e-3, **params):
    """Build a zoo curve by name (``circle``, ``ellipse``, ``lyapunov``, ``ex1``..``ex4``)."""
    key = _ALIASES.get(name, name)
    if key not in ZOO:
        raise KeyError(f"unknown zoo curve '{name}'")
    if key in _DEPTH_DEFAULT:
        params["N"] = _DEPTH_DEFAULT[key] if depth is None else depth
    return ZOO[key](resolution=resolution, **params)


def truncation_scale(curve):
    """Smallest geometric scale resolved by a truncated zoo curve (0 if none).

    ``ex1``: the shortest retained arc, ``2^-4N``.  ``ex4``: the
    smallest retained radius ``2^-2N`` (below it only the straight stitch
    remains).  ``ex3``: the smallest retained radius ``r_min``.
    """
    gid, p = curve.generator_id, curve.params
    if gid == "ex1" and "depth" in p:
        return 2.0 ** (-4 * int(p["depth"]))
    if gid == "ex4" and "depth" in p:
        return 2.0 ** (-2 * int(p["depth"]))
    if gid == "ex3" and "r_min" in p:
        return float(p["r_min"])
    return 0.0
