"""Adaptive panels on a curve, graded towards a centre point.

A panel is a sub-interval ``[w0, w1]`` of one polyline segment, with ``w``
measured from the segment start (``rev`` false) or from its end (``rev``
true).  Measuring from the end nearest the centre keeps panels that are
exponentially close to the centre exactly representable.

Panels are refined until each is small compared to its distance from the
centre and subtends a small angle there, and they are clipped at given
circle radii so that every kept panel lies in a single annulus (its
``shell``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Panels", "SingularityError", "refine_panels", "panels_around",
           "locate_on_curve", "gauss_legendre"]

BAND = 1e-12
MAX_PANELS = 4_000_000
_GL_CACHE = {}


class SingularityError(ValueError):
    """Raised when refinement cannot separate an arc from the centre point."""


def gauss_legendre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


@dataclass
class Panels:
    """Ordered panel set (curve orientation) with cached end points."""

    curve: object
    center: complex
    seg: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    rev: np.ndarray
    start: np.ndarray
    end: np.ndarray
    shell: np.ndarray

    def __len__(self):
        return self.seg.size

    def subset(self, mask):
        return Panels(self.curve, self.center, self.seg[mask], self.w0[mask], self.w1[mask],
                      self.rev[mask], self.start[mask], self.end[mask], self.shell[mask])

    def local(self, x):
        """Points ``w`` at fractions ``x`` (shape (k,)) of each panel in curve orientation."""
        x = np.asarray(x, dtype=float)
        # orientation runs from w0 to w1 unless rev, where it runs from w1 to w0
        lo = np.where(self.rev, self.w1, self.w0)[:, None]
        hi = np.where(self.rev, self.w0, self.w1)[:, None]
        return np.where(x <= 0.5, lo + (hi - lo) * x, hi - (hi - lo) * (1 - x))

    def eval_at(self, x):
        w = self.local(x)
        seg = np.broadcast_to(self.seg[:, None], w.shape)
        rev = np.broadcast_to(self.rev[:, None], w.shape)
        return self.curve.eval(seg, w, rev), seg, w, rev

    def gauss(self, n=16):
        """Gauss-Legendre nodes: ``(t, dt, seg, w, rev)``, each of shape (panels, n).

        ``dt`` already includes the weights and the orientation sign, so
        ``sum(f(t) * dt)`` approximates the oriented integral of ``f``.
        """
        x, wts = gauss_legendre(n)
        frac = 0.5 * (x + 1)
        w = self.w0[:, None] + (self.w1 - self.w0)[:, None] * frac
        seg = np.broadcast_to(self.seg[:, None], w.shape)
        rev = np.broadcast_to(self.rev[:, None], w.shape)
        t = self.curve.eval(seg, w, rev)
        sign = np.where(self.rev, -1.0, 1.0)[:, None]
        dt = self.curve.deriv(seg, w, rev) * (0.5 * (self.w1 - self.w0))[:, None] * wts * sign
        return t, dt, seg, w, rev

    def increments(self, m):
        """Argument increments about the centre on ``m`` equal sub-steps per panel.

        Returns ``(darg, mid_points, mid_seg, mid_w, mid_rev)`` of shape (panels, m).
        """
        x = np.linspace(0.0, 1.0, m + 1)
        pts, _, _, _ = self.eval_at(x[1:-1])
        pts = np.column_stack([self.start, pts, self.end]) - self.center
        darg = np.angle(pts[:, 1:] / pts[:, :-1])
        xm = 0.5 * (x[1:] + x[:-1])
        mid, seg, w, rev = self.eval_at(xm)
        return darg, mid, seg, w, rev


def locate_on_curve(curve, xi, rtol=1e-6):
    """Snap ``xi`` to the curve and make it a vertex.

    Returns ``(curve2, vertex_index, xi_on_curve)`` or ``(curve, None, xi)``
    when ``xi`` is farther than ``rtol * diameter`` from the curve.
    """
    xi = complex(xi)
    seg, u, dist = curve.nearest(xi)
    seg, u, dist = int(seg[0]), float(u[0]), float(dist[0])
    if dist > rtol * curve.diameter:
        return curve, None, xi
    if dist > 0 and 0.0 < u < 1.0 and curve.seg_piece[seg] >= 0:
        for _ in range(4):
            t = curve.eval(seg, u)
            d = curve.deriv(seg, u)
            u = float(np.clip(u - np.real((t - xi) * np.conj(d)) / abs(d) ** 2, 0.0, 1.0))
    if u < 1e-15:
        u = 0.0
    elif u > 1 - 1e-15:
        u = 1.0
    c2, k = curve.insert_vertex(seg, u)
    return c2, k, complex(c2.vertices[k])


def _side(d, r):
    """-1 inside, +1 outside, 0 within the relative band of the circle."""
    return np.where(d < r * (1 - BAND), -1, np.where(d > r * (1 + BAND), 1, 0))


def _shell(d, radii):
    return np.searchsorted(radii, d, side="left") if radii.size else np.zeros(d.shape, dtype=np.int64)


def refine_panels(curve, center, seg, w0, w1, rev, radii=(), kappa=0.125,
                  max_angle=np.pi / 64, keep_inner=False, keep_outer=True,
                  min_width=0.0):
    """Refine panels about ``center`` and clip them at ``radii``.

    Parameters
    ----------
    radii : sequence of float
        Increasing circle radii.  Shell ``k`` holds panels between
        ``radii[k-1]`` and ``radii[k]``; shell 0 is inside ``radii[0]``.
    kappa : float
        Panels are split while their chord exceeds ``kappa`` times the
        distance from their midpoint to the centre.
    max_angle : float
        Maximum angle subtended at the centre.
    keep_inner, keep_outer : bool
        Whether the innermost and outermost shells are returned.
    """
    c = complex(center)
    radii = np.asarray(sorted(radii), dtype=float)
    nr = radii.size
    seg = np.asarray(seg, dtype=np.int64)
    w0 = np.asarray(w0, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    rev = np.asarray(rev, dtype=bool)
    done = []
    total = 0
    while seg.size:
        if total + seg.size > MAX_PANELS:
            raise SingularityError(
                "refinement did not separate the arc from the centre; "
                "exclude a neighbourhood of the centre (delta > 0)")
        wm = 0.5 * (w0 + w1)
        ww = np.stack([w0, 0.75 * w0 + 0.25 * w1, wm, 0.25 * w0 + 0.75 * w1, w1])
        pts = curve.eval(np.broadcast_to(seg, ww.shape), ww, np.broadcast_to(rev, ww.shape))
        d = np.abs(pts - c)
        split_at = np.full(seg.size, np.nan)
        # clip at radii: find a crossing between the end points
        for r in radii:
            s0, s1 = _side(d[0], r), _side(d[4], r)
            cross = (s0 * s1 < 0) & np.isnan(split_at)
            if cross.any():
                split_at[cross] = _bisect_radius(curve, c, r, seg[cross], w0[cross],
                                                 w1[cross], rev[cross], s0[cross])
        todo = np.isnan(split_at)
        # dips: interior samples on the other side of a circle
        for r in radii:
            sd = _side(d, r)
            ends = np.where(sd[0] != 0, sd[0], sd[4])
            dip = todo & np.any(sd[1:4] * ends < 0, axis=0)
            split_at[dip] = wm[dip]
            todo &= ~dip
        sh = _shell(d[2], radii)
        drop = todo & (nr > 0) & (((sh == 0) & (not keep_inner)) | ((sh == nr) & (not keep_outer)))
        chord = np.abs(pts[4] - pts[0])
        with np.errstate(invalid="ignore", divide="ignore"):
            ang = np.abs(np.angle((pts[4] - c) / (pts[0] - c)))
        coarse = (chord > kappa * d[2]) | (ang > max_angle) | ~np.isfinite(ang)
        coarse &= (w1 - w0) > min_width
        if keep_inner or nr == 0:
            active = todo & ~drop
        else:
            active = todo & ~drop & (sh > 0)
        need = active & coarse
        split_at[need] = wm[need]
        fin = todo & ~drop & ~need
        if fin.any():
            done.append((seg[fin], w0[fin], w1[fin], rev[fin], sh[fin]))
            total += int(fin.sum())
        sp = ~np.isnan(split_at)
        # guard against splits that do not shrink the panel
        sp &= (split_at > w0) & (split_at < w1)
        seg = np.concatenate([seg[sp], seg[sp]])
        rev = np.concatenate([rev[sp], rev[sp]])
        nw0 = np.concatenate([w0[sp], split_at[sp]])
        nw1 = np.concatenate([split_at[sp], w1[sp]])
        w0, w1 = nw0, nw1
    if not done:
        e = np.empty(0)
        return Panels(curve, c, e.astype(np.int64), e, e, e.astype(bool),
                      e.astype(complex), e.astype(complex), e.astype(np.int64))
    seg, w0, w1, rev, sh = (np.concatenate(x) for x in zip(*done))
    order = np.lexsort((np.where(rev, -w0, w0), seg))
    seg, w0, w1, rev, sh = seg[order], w0[order], w1[order], rev[order], sh[order]
    a = curve.eval(seg, np.where(rev, w1, w0), rev)
    b = curve.eval(seg, np.where(rev, w0, w1), rev)
    return Panels(curve, c, seg, w0, w1, rev, a, b, sh)


def _bisect_radius(curve, c, r, seg, lo, hi, rev, s_lo, iters=200):
    lo, hi = lo.copy(), hi.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        sm = _side(np.abs(curve.eval(seg, mid, rev) - c), r)
        on = sm == 0
        same = sm == s_lo
        lo = np.where(same & ~on, mid, lo)
        hi = np.where(~same & ~on, mid, hi)
        if on.all() or np.all(hi - lo <= 1e-17 * np.maximum(np.abs(hi), 1e-300)):
            return np.where(on, mid, 0.5 * (lo + hi))
        lo = np.where(on, mid, lo)
        hi = np.where(on, mid, hi)
    return 0.5 * (lo + hi)


def panels_around(curve, xi, radii=(), arc=None, **kwargs):
    """Panels of the whole curve (or an arc) graded towards ``xi``.

    Parameters
    ----------
    curve : Curve
    xi : complex
        Centre.  Points on the curve are inserted as vertices first.
    radii : sequence of float
        Clipping radii (see :func:`refine_panels`).
    arc : (s0, s1), optional
        Restrict to arc coordinates ``s0 <= s <= s1`` (``s1`` may exceed the length).

    Returns
    -------
    Panels
    """
    c2, k, xi_c = locate_on_curve(curve, xi)
    n = c2.n_segments
    if arc is None:
        seg = np.arange(n)
        u0 = np.zeros(n)
        u1 = np.ones(n)
    else:
        s0, s1 = float(arc[0]), float(arc[1])
        seg, u0, u1 = _arc_segments(c2, s0, s1)
    a = c2.vertices[seg]
    b = c2.vertices[seg + 1]
    rev = np.abs(b - xi_c) < np.abs(a - xi_c)
    w0 = np.where(rev, 1.0 - u1, u0)
    w1 = np.where(rev, 1.0 - u0, u1)
    keep = w1 > w0
    return refine_panels(c2, xi_c, seg[keep], w0[keep], w1[keep], rev[keep], radii, **kwargs)


def _arc_segments(curve, s0, s1):
    L = curve.length
    if s1 - s0 >= L:
        n = curve.n_segments
        return np.arange(n), np.zeros(n), np.ones(n)
    ac = curve.arc_coords
    out_s, out0, out1 = [], [], []
    base = np.floor(s0 / L) * L
    s0 -= base
    s1 -= base
    for shift in (0.0, L):
        lo, hi = s0 - shift, s1 - shift
        ks = np.flatnonzero((ac[1:] > lo) & (ac[:-1] < hi))
        if ks.size == 0:
            continue
        u0 = np.clip((lo - ac[ks]) / curve.seg_lengths[ks], 0, 1)
        u1 = np.clip((hi - ac[ks]) / curve.seg_lengths[ks], 0, 1)
        out_s.append(ks)
        out0.append(u0)
        out1.append(u1)
    return np.concatenate(out_s), np.concatenate(out0), np.concatenate(out1)
