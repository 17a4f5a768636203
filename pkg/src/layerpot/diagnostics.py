"""Curve-regularity functionals and condition checks.

Contents
--------
* arc measure of disk neighbourhoods and the regularity ratio ``theta(eps)/eps``;
* ray-crossing counts and their direction integral;
* oscillation counts in sector-annuli, ``k_gamma`` and the angular shadow
  ``phi_gamma`` together with their sup-over-``[R/2, R]`` versions;
* moduli of continuity, the characteristic ``Omega(a, b)`` and Dini-type
  integrals with divergence classification;
* the sufficient-condition report for a partition of the curve and the
  annulus inequality check.

All geometry here runs on the polyline; points on the curve are first
made vertices so that rays and annuli are centred exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ._trend import DEFAULT_POLICY, TrendPolicy, TrendResult, classify
from .argtrack import shell_sums, total_arg_variation
from .curve import segment_disk_lengths
from .panels import locate_on_curve

__all__ = [
    "RegularityReport",
    "theta_report",
    "default_xi_sample",
    "ray_crossings",
    "kral_functional",
    "KralReport",
    "kral_report",
    "annulus_pieces",
    "oscillation_count",
    "k_gamma",
    "phi_gamma",
    "OscillationProfile",
    "oscillation_profile",
    "ModulusTable",
    "modulus_of_continuity",
    "density_modulus",
    "tangent_modulus",
    "omega_characteristic",
    "dini_integral",
    "Theorem3Report",
    "theorem3_report",
    "lemma_inequality_check",
    "fit_lemma3_constant",
    "dyadic_sectors",
    "ahlfors_check",
    "kral_check",
]

TWO_PI = 2 * np.pi


# -- neighbourhood measure ---------------------------------------------------

@dataclass
class RegularityReport:
    """``theta(eps)`` (sup over the sampled centres) and the ratio to ``eps``."""

    eps: np.ndarray
    theta: np.ndarray
    ratio: np.ndarray
    constant: float
    argmax_xi: complex
    n_xi: int

    def to_dict(self):
        return {"eps": self.eps.tolist(), "theta": self.theta.tolist(),
                "ratio": self.ratio.tolist(), "constant": self.constant,
                "argmax_xi": [self.argmax_xi.real, self.argmax_xi.imag], "n_xi": self.n_xi}


def default_xi_sample(curve, cap=2000):
    """Vertex sample: every vertex up to ``cap``, else a stride plus all piece junctions."""
    n = curve.n_segments
    idx = np.arange(n)
    if n > cap:
        stride = int(np.ceil(n / cap))
        junction = np.flatnonzero(np.diff(curve.seg_piece, prepend=curve.seg_piece[-1]) != 0)
        idx = np.union1d(idx[::stride], junction)
    return curve.vertices[idx]


def theta_report(curve, eps_grid, xi_sample=None):
    """Sup over sampled centres of the arc measure within ``eps`` of the centre.

    The result is a lower bound of the true sup; ``n_xi`` records the sample size.
    """
    eps = np.sort(np.asarray(eps_grid, dtype=float))
    if np.any(eps <= 0):
        raise ValueError("radii must be positive")
    xs = default_xi_sample(curve) if xi_sample is None else np.atleast_1d(np.asarray(xi_sample, complex))
    a, b = curve.vertices[:-1], curve.vertices[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * np.abs(b - a)
    tree = cKDTree(np.column_stack([mid.real, mid.imag]))
    reach = eps.max() + half.max()
    best = np.zeros(eps.size)
    arg = np.zeros(eps.size, dtype=complex)
    for xi in xs:
        cand = np.asarray(tree.query_ball_point([xi.real, xi.imag], reach), dtype=np.int64)
        if cand.size == 0:
            continue
        _, _, ln = segment_disk_lengths(a[cand], b[cand], xi, eps)
        th = ln.sum(axis=0)
        up = th > best
        best[up] = th[up]
        arg[up] = xi
    ratio = best / eps
    k = int(np.argmax(ratio))
    return RegularityReport(eps, best, ratio, float(ratio[k]), complex(arg[k]), len(xs))


# -- rays -----------------------------------------------------------------

def _segment_arcs(curve, xi):
    """Angular arc ``[lo, hi)`` (mod 2 pi) and width of every segment seen from ``xi``.

    ``lo`` and ``hi`` are the endpoint directions ordered counterclockwise,
    taken from one angle per vertex so that adjacent arcs share endpoints
    exactly.  Segments touching ``xi`` are dropped: the open ray meets them
    only at ``xi``.
    """
    rel = curve.vertices - xi
    ang = np.mod(np.angle(rel), TWO_PI)
    ang[ang >= TWO_PI] = 0.0
    a, b = rel[:-1], rel[1:]
    d = b - a
    u = np.clip(np.real(-a * np.conj(d)) / np.abs(d) ** 2, 0, 1)
    keep = np.abs(a + u * d) > 1e-13 * curve.diameter
    width = np.angle(b[keep] / a[keep])
    s, e = ang[:-1][keep], ang[1:][keep]
    lo = np.where(width >= 0, s, e)
    hi = np.where(width >= 0, e, s)
    # a true wrap has lo - hi = 2 pi - width > pi; smaller inversions are rounding on radial segments
    flip = (lo > hi) & (lo - hi < np.pi)
    hi[flip] = lo[flip]
    return lo, hi, np.abs(width)


def _count_in_arcs(lo, hi, phis):
    """Number of arcs ``[lo, hi)`` (mod 2 pi) containing each direction."""
    phis = np.mod(np.asarray(phis, dtype=float), TWO_PI)
    # [lo <= phi] - [hi <= phi] is 1 inside a plain arc; wrapped arcs (lo > hi) add one
    slo, shi = np.sort(lo), np.sort(hi)
    cnt = (np.searchsorted(slo, phis, side="right") - np.searchsorted(shi, phis, side="right")
           + int(np.count_nonzero(lo > hi)))
    return cnt.astype(np.int64)


def ray_crossings(curve, xi, phi):
    """Number of crossings of the open ray ``xi + r e^{i phi}``, ``r > 0``, with the curve.

    A ray through a vertex is counted as the ray at ``phi + 1e-7`` would be
    (directions are half-open at the arc starts), so grazing and collinear
    contacts do not count.
    """
    c2, _, xi_c = locate_on_curve(curve, xi)
    lo, hi, _ = _segment_arcs(c2, xi_c)
    out = _count_in_arcs(lo, hi, np.atleast_1d(phi))
    return int(out[0]) if np.ndim(phi) == 0 else out


def kral_functional(curve, xi, grid_size=3600, exact=False):
    """Trapezoid estimate of ``int_0^{2 pi} mu(xi, phi) dphi`` on ``grid_size`` directions.

    The directions are offset by half a step from 0 to avoid aligning rays
    with straight pieces.  With ``exact`` the polyline integral (sum of
    absolute angular widths) is returned instead.
    """
    if grid_size < 360:
        raise ValueError("use at least 360 directions")
    c2, _, xi_c = locate_on_curve(curve, xi)
    lo, hi, width = _segment_arcs(c2, xi_c)
    if exact:
        return float(width.sum())
    step = TWO_PI / grid_size

    def below(x):
        # grid points phi_j = (j + 1/2) step strictly below x
        return np.clip(np.ceil(x / step - 0.5), 0, grid_size)

    n = below(hi) - below(lo) + grid_size * (lo > hi)
    return float(step * np.sum(n))


@dataclass
class KralReport:
    xi: np.ndarray
    values: np.ndarray
    sup: float
    grid_size: int

    def to_dict(self):
        return {"xi": [[z.real, z.imag] for z in self.xi], "values": self.values.tolist(),
                "sup": self.sup, "grid_size": self.grid_size}


def kral_report(curve, xi_sample, grid_size=3600):
    xs = np.atleast_1d(np.asarray(xi_sample, dtype=complex))
    vals = np.array([kral_functional(curve, x, grid_size) for x in xs])
    return KralReport(xs, vals, float(vals.max()), grid_size)


# -- annulus pieces, oscillations, shadows --------------------------------------

def annulus_pieces(curve, xi, r_in, r_out):
    """Connected pieces of the polyline inside ``r_in < |t - xi| < r_out``.

    Returns a list of complex arrays of points relative to ``xi``.
    """
    v = curve.vertices
    a, b = v[:-1], v[1:]
    d = b - a
    w = a - xi
    A = np.abs(d) ** 2
    B = 2 * np.real(w * np.conj(d))
    C = np.abs(w) ** 2
    disc_o = B ** 2 - 4 * A * (C - r_out ** 2)
    cand = np.flatnonzero(disc_o > 0)
    if cand.size == 0:
        return []
    A, B, C, disc_o = A[cand], B[cand], C[cand], disc_o[cand]
    so = np.sqrt(disc_o)
    o0 = np.clip((-B - so) / (2 * A), 0, 1)
    o1 = np.clip((-B + so) / (2 * A), 0, 1)
    disc_i = B ** 2 - 4 * A * (C - r_in ** 2)
    si = np.sqrt(np.maximum(disc_i, 0))
    i0 = np.where(disc_i > 0, (-B - si) / (2 * A), 2.0)
    i1 = np.where(disc_i > 0, (-B + si) / (2 * A), 2.0)
    # first part [o0, min(o1, i0)], second part [max(o0, i1), o1]
    p1_lo, p1_hi = o0, np.minimum(o1, np.clip(i0, 0, 2))
    p2_lo, p2_hi = np.maximum(o0, np.where(disc_i > 0, i1, 2.0)), o1
    segs = np.concatenate([cand, cand])
    lo = np.concatenate([p1_lo, p2_lo])
    hi = np.concatenate([p1_hi, p2_hi])
    ok = hi > lo
    segs, lo, hi = segs[ok], lo[ok], hi[ok]
    if segs.size == 0:
        return []
    order = np.lexsort((lo, segs))
    segs, lo, hi = segs[order], lo[order], hi[order]
    n = curve.n_segments
    brk = np.ones(segs.size, dtype=bool)
    brk[1:] = ~((segs[1:] == segs[:-1] + 1) & (hi[:-1] == 1.0) & (lo[1:] == 0.0))
    starts = np.flatnonzero(brk)
    bounds = list(zip(starts, list(starts[1:]) + [segs.size]))
    pa = a[segs] + lo * d[segs] - xi
    pb = a[segs] + hi * d[segs] - xi
    pieces = [np.concatenate([pa[s:e], pb[e - 1:e]]) for s, e in bounds]
    # join across the closing vertex
    if (len(pieces) > 1 and segs[0] == 0 and lo[0] == 0.0 and segs[-1] == n - 1
            and hi[-1] == 1.0):
        first = pieces.pop(0)
        pieces[-1] = np.concatenate([pieces[-1], first[1:]])
    return pieces


def _lift(piece):
    th = np.empty(piece.size)
    th[0] = np.angle(piece[0])
    th[1:] = th[0] + np.cumsum(np.angle(piece[1:] / piece[:-1]))
    return th


def dyadic_sectors(levels=6):
    """Sector pairs of widths ``2 pi 2^-j`` at every half-width offset.

    Sectors may straddle the direction 0 (``psi2 > 2 pi``); the angular
    origin plays no role in the geometry.
    """
    out = []
    for j in range(1, levels + 1):
        wdt = TWO_PI * 2.0 ** -j
        for k in range(2 ** (j + 1)):
            out.append((k * wdt / 2, k * wdt / 2 + wdt))
    return np.array(out)


def _pass_through_counts(theta, psi1, width):
    """Side-to-side traversals of each sector by a lifted angle path.

    ``theta`` is the lifted angle at the path vertices; the path is
    monotone in angle between vertices.  Each sector copy corresponds to an
    even cell of the lattice of level values ``psi1 + 2 pi j`` and
    ``psi1 + width + 2 pi j``; a traversal is a visit to an even cell
    entered and left through opposite sides.
    """
    rel = theta[None, :] - psi1[:, None]
    cell = 2 * np.floor(rel / TWO_PI).astype(np.int64) + (np.mod(rel, TWO_PI) >= width[:, None])
    n = theta.size
    if n < 2:
        return np.zeros(psi1.size, dtype=np.int64)
    lo = np.minimum(cell[:, 1:], cell[:, :-1])
    hi = np.maximum(cell[:, 1:], cell[:, :-1])
    # even cells strictly between consecutive vertex cells are crossed fully
    jumps = np.where(hi > lo, (hi - 1) // 2 - lo // 2, 0)
    total = jumps.sum(axis=1)
    # visits to vertex cells: runs of equal cells
    change = np.ones_like(cell, dtype=bool)
    change[:, 1:] = cell[:, 1:] != cell[:, :-1]
    idx = np.arange(n)[None, :]
    run_start = np.maximum.accumulate(np.where(change, idx, 0), axis=1)
    endmark = np.ones_like(cell, dtype=bool)
    endmark[:, :-1] = cell[:, :-1] != cell[:, 1:]
    rev_idx = np.where(endmark, idx, n - 1)
    run_end = np.minimum.accumulate(rev_idx[:, ::-1], axis=1)[:, ::-1]
    rows = np.arange(psi1.size)[:, None]
    has_prev = run_start > 0
    has_next = run_end < n - 1
    prev_cell = cell[rows, np.maximum(run_start - 1, 0)]
    next_cell = cell[rows, np.minimum(run_end + 1, n - 1)]
    through = (change & has_prev & has_next & (cell % 2 == 0)
               & (np.sign(cell - prev_cell) == np.sign(next_cell - cell)))
    return total + through.sum(axis=1)


def _sector_counts(pieces, sectors):
    psi1 = sectors[:, 0]
    width = sectors[:, 1] - sectors[:, 0]
    tot = np.zeros(psi1.size, dtype=np.int64)
    for p in pieces:
        tot += _pass_through_counts(_lift(p), psi1, width)
    return tot


def oscillation_count(curve, xi, R, psi1, psi2):
    """Components of the curve in ``{R/2 < r < R, psi1 < phi < psi2}`` joining the two radial sides.

    Any real ``psi1`` is accepted as long as ``psi1 < psi2 < psi1 + 2 pi``,
    so a sector may contain the direction 0.
    """
    if not psi1 < psi2 < psi1 + TWO_PI:
        raise ValueError("need psi1 < psi2 < psi1 + 2 pi")
    c2, _, xi_c = locate_on_curve(curve, xi)
    pieces = annulus_pieces(c2, xi_c, R / 2, R)
    return int(_sector_counts(pieces, np.array([[psi1, psi2]]))[0])


def _phi_from_pieces(pieces):
    if not pieces:
        return 0.0
    arcs = []
    for p in pieces:
        th = _lift(p)
        lo, hi = th.min(), th.max()
        if hi - lo >= TWO_PI:
            return TWO_PI
        arcs.append((np.mod(lo, TWO_PI), hi - lo))
    lo = np.array([x[0] for x in arcs])
    wd = np.array([x[1] for x in arcs])
    hi = lo + wd
    # unwrap arcs crossing 2 pi into two
    s = np.concatenate([lo, np.zeros(np.sum(hi > TWO_PI))])
    e = np.concatenate([np.minimum(hi, TWO_PI), hi[hi > TWO_PI] - TWO_PI])
    order = np.argsort(s)
    s, e = s[order], e[order]
    total, cur_s, cur_e = 0.0, s[0], e[0]
    for a, b in zip(s[1:], e[1:]):
        if a > cur_e:
            total += cur_e - cur_s
            cur_s, cur_e = a, b
        else:
            cur_e = max(cur_e, b)
    total += cur_e - cur_s
    return float(min(total, TWO_PI))


def phi_gamma(curve, xi, R):
    """Measure of ray directions from ``xi`` meeting ``R/2 < |t - xi| <= R``.

    Computed exactly for the polyline as the union of the angular ranges
    of its annulus pieces.
    """
    c2, _, xi_c = locate_on_curve(curve, xi)
    return _phi_from_pieces(annulus_pieces(c2, xi_c, R / 2, R))


def k_gamma(curve, xi, R, sectors=None):
    """``max(1, max over sampled sectors of the oscillation count)``; a lower bound of the sup."""
    sectors = dyadic_sectors() if sectors is None else np.asarray(sectors, dtype=float)
    if len(sectors) < 64:
        raise ValueError("use at least 64 sector pairs")
    c2, _, xi_c = locate_on_curve(curve, xi)
    pieces = annulus_pieces(c2, xi_c, R / 2, R)
    if not pieces:
        return 1
    return int(max(1, _sector_counts(pieces, sectors).max()))


@dataclass
class OscillationProfile:
    """``k``, ``phi`` and their hats on a geometric radius grid around ``xi``.

    The hats are maxima over the 8 grid radii in ``[R/2, R]``.
    """

    xi: complex
    R: np.ndarray
    k: np.ndarray
    phi: np.ndarray
    k_hat: np.ndarray
    phi_hat: np.ndarray
    n_sectors: int

    def to_dict(self):
        return {"xi": [self.xi.real, self.xi.imag], "R": self.R.tolist(), "k": self.k.tolist(),
                "phi": self.phi.tolist(), "k_hat": self.k_hat.tolist(),
                "phi_hat": self.phi_hat.tolist(), "n_sectors": self.n_sectors}


PER_OCTAVE = 7


def radius_grid(r_min, r_max):
    """Geometric grid with 7 steps per octave ending exactly at ``r_max``."""
    n = int(np.ceil(np.log2(r_max / r_min) * PER_OCTAVE))
    return r_max * 2.0 ** (-np.arange(n, -1, -1) / PER_OCTAVE)


def oscillation_profile(curve, xi, r_min, r_max, sectors=None):
    """Profile on the grid ``radius_grid(r_min, r_max)`` (hats need ``R/2`` values too)."""
    sectors = dyadic_sectors() if sectors is None else np.asarray(sectors, dtype=float)
    c2, _, xi_c = locate_on_curve(curve, xi)
    full = radius_grid(r_min / 2, r_max)
    ks = np.ones(full.size, dtype=np.int64)
    ph = np.zeros(full.size)
    for i, R in enumerate(full):
        pieces = annulus_pieces(c2, xi_c, R / 2, R)
        if pieces:
            ks[i] = max(1, int(_sector_counts(pieces, sectors).max()))
            ph[i] = _phi_from_pieces(pieces)
    # hat over [R/2, R]: the current and previous PER_OCTAVE grid points
    m = PER_OCTAVE
    kh = np.array([ks[max(0, i - m):i + 1].max() for i in range(full.size)])
    phh = np.array([ph[max(0, i - m):i + 1].max() for i in range(full.size)])
    sel = full >= r_min * (1 - 1e-12)
    return OscillationProfile(xi_c, full[sel], ks[sel], ph[sel], kh[sel], phh[sel], len(sectors))


# -- moduli of continuity -----------------------------------------------------

@dataclass
class ModulusTable:
    """Sampled modulus of continuity ``omega(eta)`` on an increasing grid.

    ``omega`` is a lower bound of the true modulus (sup over sampled pairs),
    made nondecreasing.  Between grid points it is read as a step function
    constant on ``[eta_i, eta_{i+1})``.
    """

    eta: np.ndarray
    omega: np.ndarray
    n_samples: int
    resolution: float = 0.0
    floor: float = 0.0

    def at(self, x):
        i = np.searchsorted(self.eta, np.asarray(x, dtype=float), side="right") - 1
        return np.where(i >= 0, self.omega[np.clip(i, 0, None)], 0.0)

    def to_dict(self):
        return {"eta": self.eta.tolist(), "omega": self.omega.tolist(),
                "n_samples": self.n_samples, "resolution": self.resolution, "floor": self.floor}


def modulus_of_continuity(values, points, eta_grid, chunk=2048, angular=False):
    """Sup of ``|f(t1) - f(t2)|`` over sample pairs with ``|t1 - t2| <= eta``.

    Parameters
    ----------
    values : array of float
        Function values at ``points`` (angles if ``angular``: differences
        are then taken modulo 2 pi).
    points : array of complex
    eta_grid : array of float
        Increasing positive grid.
    """
    f = np.asarray(values, dtype=float)
    p = np.asarray(points, dtype=complex)
    eta = np.asarray(eta_grid, dtype=float)
    if np.any(np.diff(eta) <= 0) or eta[0] <= 0:
        raise ValueError("eta grid must be positive and increasing")
    best = np.zeros(eta.size)
    n = p.size
    min_d = np.inf

    def accumulate(d, df):
        nonlocal min_d
        if angular:
            df = np.mod(df + np.pi, TWO_PI) - np.pi
        df = np.abs(df)
        pos = d > 0
        if pos.any():
            min_d = min(min_d, float(d[pos].min()))
        k = np.searchsorted(eta, d, side="left")
        ok = k < eta.size
        np.maximum.at(best, k[ok], df[ok])

    span = np.ptp(p.real) + np.ptp(p.imag)
    if eta[-1] < 0.1 * span:
        # only pairs closer than the largest eta matter
        x, y = p.real, p.imag
        tree = cKDTree(np.column_stack([x, y]))
        pairs = tree.query_pairs(eta[-1], output_type="ndarray")
        for s in range(0, len(pairs), 1 << 22):
            i, j = pairs[s:s + (1 << 22)].T
            accumulate(np.hypot(x[i] - x[j], y[i] - y[j]), f[i] - f[j])
    else:
        for i in range(0, n, chunk):
            accumulate(np.abs(p[i:i + chunk, None] - p[None, i:]).ravel(),
                       (f[i:i + chunk, None] - f[None, i:]).ravel())
    omega = np.maximum.accumulate(best)
    res = 0.0 if not np.isfinite(min_d) else min_d
    return ModulusTable(eta, omega, n, res, res)


def _curve_samples(curve, extra=None):
    pts = curve.vertices[:-1]
    seg = np.arange(curve.n_segments)
    u = np.zeros(seg.size)
    if extra is not None:
        s2, u2 = curve.locate(extra)
        seg = np.concatenate([seg, s2])
        u = np.concatenate([u, u2])
        pts = curve.eval(seg, u)
    return pts, seg, u


def density_modulus(curve, density, eta_grid, max_samples=8000):
    """Modulus of a density over curve vertices (strided above ``max_samples``)."""
    pts, seg, u = _curve_samples(curve)
    if pts.size > max_samples:
        keep = np.union1d(np.arange(0, pts.size, int(np.ceil(pts.size / max_samples))),
                          np.flatnonzero(np.diff(curve.seg_piece, prepend=curve.seg_piece[-1]) != 0))
        pts, seg, u = pts[keep], seg[keep], u[keep]
    vals = density.at(curve, seg, u)
    tab = modulus_of_continuity(vals, pts, eta_grid)
    from .zoo import truncation_scale
    tab.floor = max(tab.floor, truncation_scale(curve))
    return tab


def tangent_modulus(curve, eta_grid, samples=4000):
    """Modulus of the tangent angle, sampled at equally spaced arc coordinates."""
    s = np.linspace(0, curve.length, samples, endpoint=False)
    seg, u = curve.locate(s)
    ang = np.angle(curve.deriv(seg, u))
    return modulus_of_continuity(ang, curve.eval(seg, u), eta_grid, angular=True)


def omega_characteristic(table: ModulusTable, a, b):
    """``Omega(a, b) = sup_{a <= eta <= b} omega(eta) / eta`` for the step-function table."""
    if a > b:
        raise ValueError("need a <= b")
    if a <= 0:
        raise ValueError("need a > 0")
    eta, om = table.eta, table.omega
    cand = [float(table.at(a)) / a]
    sel = (eta > a) & (eta <= b)
    if sel.any():
        cand.append(float(np.max(om[sel] / eta[sel])))
    return max(cand)


def dini_integral(table: ModulusTable, kind="plain", upper=None, lower_limits=None,
                  policy: TrendPolicy = DEFAULT_POLICY):
    """Partial Dini integrals ``int_delta^upper omega(eta)/eta [ln(2/eta)] d eta``.

    ``kind`` is ``"plain"``, ``"log"`` (weight ``ln(2/eta)``), ``"tangent"``
    or ``"arg"`` (plain integrals of the respective moduli).  Trapezoid rule
    in ``ln eta``; the sweep over lower limits is classified with the shared
    trend policy.
    """
    if kind not in ("plain", "log", "tangent", "arg"):
        raise ValueError(f"unknown Dini kind '{kind}'")
    eta, om = table.eta, table.omega
    upper = eta[-1] if upper is None else float(upper)
    if not eta[0] < upper <= eta[-1] * (1 + 1e-12):
        raise ValueError("upper limit outside the table grid")
    sel = eta < upper * (1 - 1e-12)
    eta = np.append(eta[sel], upper)
    om = np.append(om[sel], table.at(upper))
    f = om.copy()
    if kind == "log":
        f = f * np.log(2.0 / eta)
    x = np.log(eta)
    seg = 0.5 * (f[1:] + f[:-1]) * np.diff(x)
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    if lower_limits is None:
        floor = max(table.floor, eta[0])
        k = int(np.floor(np.log2(eta[-1] / floor)))
        if k < 2:
            raise ValueError("table does not cover a Dini sweep above its sampling floor")
        lower_limits = eta[-1] * 2.0 ** -np.arange(1, k + 1)
    lower_limits = np.asarray(lower_limits, dtype=float)
    vals = np.interp(np.log(lower_limits), x, tail)
    return classify(lower_limits, vals, policy)


# -- sufficient-condition report ------------------------------------------------

@dataclass
class Theorem3Report:
    variant: str
    r0: float
    gamma1: list = field(default_factory=list)
    gamma2: list = field(default_factory=list)
    sup_gamma1: float = 0.0
    sup_gamma2_integral: float = 0.0
    sup_gamma2_total: float = 0.0
    sup_variation: float = 0.0
    verdict: str = "FAIL"
    stable: bool = False
    notes: list = field(default_factory=list)

    @property
    def sup_integral(self):
        return max(self.sup_gamma1, self.sup_gamma2_integral)

    def to_dict(self):
        return {k: (v if not isinstance(v, np.ndarray) else v.tolist())
                for k, v in self.__dict__.items()}


def _integrand(profile, table, variant):
    eta = profile.R
    if variant == "corollary":
        return profile.phi_hat * profile.k_hat * table.at(eta) / eta
    return profile.phi_hat * np.array([omega_characteristic(table, e / k, e)
                                       for e, k in zip(eta, profile.k_hat)])


def _log_trapezoid(eta, f):
    x = np.log(eta)
    y = f * eta
    return np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))])


def _coarse_integral(R, f):
    # every other radius, keeping both ends
    idx = np.unique(np.concatenate([np.arange(R.size - 1, -1, -2), [0]]))
    return float(_log_trapezoid(R[idx], f[idx])[-1])


def theorem3_report(curve, density, gamma1, gamma2, r_of_xi, R0, variant="corollary",
                    eta_min=None, table=None, sectors=None, var_levels=16):
    """Evaluate the two sup conditions for a partition ``gamma1 | gamma2``.

    Parameters
    ----------
    gamma1, gamma2 : sequences of complex
        Sampled points of the two parts.
    r_of_xi : callable
        ``r(xi)`` in ``(0, R0]`` for points of ``gamma2``.
    variant : {"corollary", "theorem"}
        Integrand ``phi_hat * k_hat * omega(eta) / eta`` or
        ``phi_hat * Omega(eta / k_hat, eta)``.

    The verdict is PASS when every integral sweep over its lower limit is
    finite (not DIVERGENT), the variations converge, and the sups change by
    less than 5 % between the full grid and one with every other radius.
    """
    if variant not in ("corollary", "theorem"):
        raise ValueError("variant must be 'corollary' or 'theorem'")
    if eta_min is None:
        from .zoo import truncation_scale
        eta_min = max(truncation_scale(curve) / 4, 1e-7 * curve.diameter)
    if table is None:
        table = density_modulus(curve, density, np.geomspace(eta_min / 4, curve.diameter, 400))
    rep = Theorem3Report(variant, float(R0))
    finite = True
    coarse_sup = 0.0
    for xi in np.atleast_1d(np.asarray(gamma1, dtype=complex)):
        prof = oscillation_profile(curve, xi, eta_min, R0, sectors)
        f = _integrand(prof, table, variant)
        cum = _log_trapezoid(prof.R, f)
        partial = cum[-1] - cum
        lows = prof.R[:-1][::-PER_OCTAVE][::-1][::-1]
        tr = classify(np.sort(lows)[::-1], np.interp(np.sort(lows)[::-1], prof.R, partial))
        val = float(partial[0])
        coarse_sup = max(coarse_sup, _coarse_integral(prof.R, f))
        finite &= tr.finite
        rep.gamma1.append({"xi": [xi.real, xi.imag], "integral": val, "status": tr.status,
                           "k_hat_max": int(prof.k_hat.max()),
                           "phi_hat": prof.phi_hat.tolist(), "eta": prof.R.tolist()})
        rep.sup_gamma1 = max(rep.sup_gamma1, val)
    for xi in np.atleast_1d(np.asarray(gamma2, dtype=complex)):
        r = float(r_of_xi(xi))
        if not 0 < r <= R0:
            raise ValueError("r(xi) must lie in (0, R0]")
        sched = r * 2.0 ** -np.arange(1, var_levels + 1)
        S = shell_sums(curve, xi, np.concatenate([sched, [r]]))
        # variation over delta < |t - xi| <= r for each delta of the schedule
        inner = np.cumsum(S.variation[1:-1][::-1])
        tv = classify(sched, inner)
        V = float(inner[-1])
        val = 0.0
        kmax = 1
        if r < R0:
            prof = oscillation_profile(curve, xi, r, R0, sectors)
            f = _integrand(prof, table, variant)
            val = float(_log_trapezoid(prof.R, f)[-1])
            kmax = int(prof.k_hat.max())
            coarse_sup = max(coarse_sup, _coarse_integral(prof.R, f))
        finite &= tv.finite
        rep.gamma2.append({"xi": [xi.real, xi.imag], "r": r, "variation": V,
                           "variation_status": tv.status, "integral": val, "k_hat_max": kmax})
        rep.sup_gamma2_integral = max(rep.sup_gamma2_integral, val)
        rep.sup_variation = max(rep.sup_variation, V)
        rep.sup_gamma2_total = max(rep.sup_gamma2_total, V + val)
    fine = rep.sup_integral
    rep.stable = bool(abs(coarse_sup - fine) <= 0.05 * max(fine, 1e-12))
    rep.verdict = "PASS" if (finite and rep.stable) else "FAIL"
    if not finite:
        rep.notes.append("a sweep was classified DIVERGENT")
    if not rep.stable:
        rep.notes.append("sup changed by more than 5% under radius-grid coarsening")
    return rep


def lemma_inequality_check(curve, density, xi, R=None, which="lemma2", delta=None, eps=None,
                           table=None, sectors=None, constant=None):
    """Compare a Stieltjes integral around ``xi`` with its annulus-type bound.

    ``which="lemma2"``: ``|int_{R/2<|t-xi|<=R} (g - g(xi)) d arg|`` against
    ``6 R phi(xi, R) Omega(R/k, R)``.

    ``which="lemma3"``: ``|int_{delta<|t-xi|<=eps} ...|`` against
    ``c * (int_delta^{2 eps} phi_hat Omega(eta/k_hat, eta) d eta + omega(eps))``
    with ``c = constant`` (1 when omitted, so that the ratio itself can be
    used to fit ``c`` on a calibration batch, see :func:`fit_lemma3_constant`).

    Returns a dict with ``lhs``, ``rhs`` and ``ratio`` (0 when both vanish).
    """
    if table is None:
        table = density_modulus(curve, density, np.geomspace(curve.diameter * 1e-7, curve.diameter, 400))
    sectors = dyadic_sectors() if sectors is None else sectors
    c2, _, xi_c = locate_on_curve(curve, xi)
    if which == "lemma2":
        if R is None or not R > 0:
            raise ValueError("lemma2 needs a radius R > 0")
        S = shell_sums(curve, xi, [R / 2, R], density=density, keep_outer=False)
        lhs = abs(float(S.stieltjes[1]))
        pieces = annulus_pieces(c2, xi_c, R / 2, R)
        k = max(1, int(_sector_counts(pieces, sectors).max())) if pieces else 1
        phi = _phi_from_pieces(pieces)
        Om = omega_characteristic(table, R / k, R)
        rhs = 6 * R * phi * Om
        extra = {"R": float(R), "k": k, "phi": phi, "Omega": Om}
    elif which == "lemma3":
        if delta is None or eps is None or not 0 < delta < eps:
            raise ValueError("lemma3 needs 0 < delta < eps")
        S = shell_sums(curve, xi, [delta, eps], density=density, keep_outer=False)
        lhs = abs(float(S.stieltjes[1]))
        prof = oscillation_profile(curve, xi, delta, 2 * eps, sectors)
        f = _integrand(prof, table, "theorem")
        integral = float(_log_trapezoid(prof.R, f)[-1])
        rhs = (1.0 if constant is None else float(constant)) * (integral + float(table.at(eps)))
        extra = {"delta": float(delta), "eps": float(eps), "integral": integral,
                 "constant": constant}
    else:
        raise ValueError("which must be 'lemma2' or 'lemma3'")
    ratio = 0.0 if lhs == 0 else (np.inf if rhs == 0 else lhs / rhs)
    return {"xi": complex(xi_c), "lhs": lhs, "rhs": float(rhs), "ratio": float(ratio), **extra}


def fit_lemma3_constant(results):
    """Smallest ``c`` making every uncalibrated shell-inequality ratio at most 1."""
    return max(r["ratio"] for r in results)


# -- curve-class checks ------------------------------------------------------

def ahlfors_check(curve, eps_grid=None, xi_sample=None, stability=0.05):
    """Finite and refinement-stable sup of ``theta(eps)/eps``.

    Stability compares the full centre sample with every other centre.
    Returns ``(passed, report)``.
    """
    if eps_grid is None:
        eps_grid = curve.diameter / 4 * 2.0 ** -np.arange(10)
    xs = default_xi_sample(curve) if xi_sample is None else np.asarray(xi_sample, dtype=complex)
    full = theta_report(curve, eps_grid, xs)
    half = theta_report(curve, eps_grid, xs[::2])
    ok = bool(np.isfinite(full.constant)
              and abs(full.constant - half.constant) <= stability * full.constant)
    return ok, full


def kral_check(curve, xi_sample, schedule=None):
    """Every sampled ``total_arg_variation`` sweep converges.

    Returns ``(passed, results)``.
    """
    res = [total_arg_variation(curve, xi, schedule) for xi in np.atleast_1d(xi_sample)]
    return all(r.converged for r in res), res
