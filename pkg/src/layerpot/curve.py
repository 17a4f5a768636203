"""Closed Jordan curves stored as adaptive polylines over analytic pieces.

A :class:`Curve` is a closed, positively oriented polyline.  Each segment
remembers which analytic :class:`Piece` it was sampled from and the piece
parameter interval it covers, so quadrature can run on the true geometry
and refinement near a point can bisect in parameter space.  Curves built
from raw vertex lists have straight segments only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

CLOSURE_RTOL = 1e-9
INTERSECT_RTOL = 1e-12
CORNER_ATOL = 1e-6

__all__ = [
    "Piece",
    "Curve",
    "Corner",
    "NeighborhoodSlice",
    "CurveError",
    "ClosureError",
    "SelfIntersectionError",
    "OrientationError",
    "line_piece",
    "arc_piece",
    "build_polyline",
    "refine_near",
    "neighborhood",
    "tangent_angle",
    "tangent_angles",
    "diameter",
    "segment_disk_lengths",
]


class CurveError(ValueError):
    """Base class for curve construction and validation failures."""


class ClosureError(CurveError):
    pass


class SelfIntersectionError(CurveError):
    pass


class OrientationError(CurveError):
    pass


@dataclass(frozen=True, eq=False)
class Piece:
    """Analytic arc ``t = func(p)`` traversed from ``t0`` to ``t1``.

    ``t0 > t1`` is allowed and means the parameter decreases along the
    curve orientation.  ``init`` optionally returns the initial parameter
    samples (in traversal order, endpoints included); adaptive bisection
    refines from there.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    t0: float
    t1: float
    deriv: Callable[[np.ndarray], np.ndarray] | None = None
    init: Callable[[], np.ndarray] | None = None

    def __call__(self, p):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.func(np.asarray(p, dtype=float)), dtype=complex)

    def derivative(self, p):
        p = np.asarray(p, dtype=float)
        if self.deriv is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.asarray(self.deriv(p), dtype=complex)
        lo, hi = min(self.t0, self.t1), max(self.t0, self.t1)
        step = 1e-6 * max(hi - lo, 1e-300)
        a = np.clip(p - step, lo, hi)
        b = np.clip(p + step, lo, hi)
        return (self(b) - self(a)) / (b - a)


def line_piece(a, b, name="line"):
    a, b = complex(a), complex(b)
    return Piece(name, lambda u: a + (b - a) * u, 0.0, 1.0,
                 deriv=lambda u: np.full(np.shape(u), b - a, dtype=complex))


def arc_piece(center, radius, phi0, phi1, name="arc"):
    """Circular arc ``center + radius*exp(i*phi)``, phi from phi0 to phi1."""
    c, r = complex(center), float(radius)
    return Piece(name, lambda p: c + r * np.exp(1j * p), float(phi0), float(phi1),
                 deriv=lambda p: 1j * r * np.exp(1j * p))


class Corner(NamedTuple):
    """One-sided tangent angles at a corner point."""

    before: float
    after: float


@dataclass
class NeighborhoodSlice:
    center: complex
    radius: float
    subarcs: list = field(default_factory=list)
    measure: float = 0.0


class Curve:
    """Closed positively oriented polyline with optional analytic pieces.

    Parameters
    ----------
    vertices : array-like of complex, shape (n + 1,)
        Closed vertex list; the last vertex repeats the first.
    pieces : sequence of Piece, optional
    seg_piece : int array, shape (n,)
        Piece index per segment, ``-1`` for a straight segment.
    seg_params : float array, shape (n, 2)
        Piece parameter at the start and end of each segment.
    """

    def __init__(self, vertices, pieces=(), seg_piece=None, seg_params=None,
                 generator_id="polyline", params=None, validate=True):
        v = np.asarray(vertices, dtype=complex).ravel()
        if v.size < 2:
            raise CurveError("a curve needs at least two vertices")
        scale = float(np.max(np.abs(v - v[0]))) or 1.0
        if abs(v[-1] - v[0]) > CLOSURE_RTOL * scale:
            raise ClosureError(
                f"polyline is not closed: |last - first| = {abs(v[-1] - v[0]):.3e}")
        if v.size < 4:
            raise CurveError("a closed curve needs at least three segments")
        n = v.size - 1
        self.pieces = tuple(pieces)
        self.seg_piece = (np.full(n, -1, dtype=np.int64) if seg_piece is None
                          else np.asarray(seg_piece, dtype=np.int64))
        if seg_params is None:
            sp = np.zeros((n, 2))
            sp[:, 1] = 1.0
        else:
            sp = np.asarray(seg_params, dtype=float).reshape(n, 2)
        self.seg_params = sp
        self.generator_id = generator_id
        self.params = dict(params or {})
        v[-1] = v[0]
        self.vertices = v
        v.setflags(write=False)
        if validate:
            self.validate()

    # -- basic geometry -------------------------------------------------
    @property
    def n_segments(self):
        return self.vertices.size - 1

    @cached_property
    def seg_lengths(self):
        return np.abs(np.diff(self.vertices))

    @cached_property
    def arc_coords(self):
        return np.concatenate([[0.0], np.cumsum(self.seg_lengths)])

    @property
    def length(self):
        return float(self.arc_coords[-1])

    @cached_property
    def diameter(self):
        return diameter(self)

    @cached_property
    def signed_area(self):
        x, y = self.vertices.real, self.vertices.imag
        return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))

    def validate(self):
        if np.any(self.seg_lengths == 0):
            k = int(np.flatnonzero(self.seg_lengths == 0)[0])
            raise CurveError(f"zero-length segment at index {k} ({self.describe_segment(k)})")
        if self.signed_area <= 0:
            raise OrientationError("curve must be positively oriented (signed area > 0)")
        pairs = find_self_intersections(self.vertices)
        if len(pairs):
            i, j = pairs[0]
            raise SelfIntersectionError(
                "self-intersection between " + self.describe_segment(i)
                + " and " + self.describe_segment(j))

    def describe_segment(self, k):
        pid = self.seg_piece[k]
        p0, p1 = self.seg_params[k]
        if pid < 0:
            return f"segment {k}"
        return f"piece '{self.pieces[pid].name}' on parameter interval [{p0:.6g}, {p1:.6g}]"

    # -- evaluation on segments -----------------------------------------
    def _piece_params(self, seg, u, rev=False):
        p0 = self.seg_params[seg, 0]
        p1 = self.seg_params[seg, 1]
        # ``rev`` means u is measured from the segment end; either way the
        # parameter is formed from the nearer endpoint to keep tiny offsets exact
        fwd = np.where(u <= 0.5, p0 + (p1 - p0) * u, p1 - (p1 - p0) * (1.0 - u))
        bwd = np.where(u <= 0.5, p1 - (p1 - p0) * u, p0 + (p1 - p0) * (1.0 - u))
        return np.where(rev, bwd, fwd)

    def eval(self, seg, u, rev=False):
        """Curve points at local coordinate ``u`` in [0, 1] of segments ``seg``.

        With ``rev`` true, ``u`` is measured backwards from the segment end.
        """
        seg, u, rev = np.broadcast_arrays(np.asarray(seg, dtype=np.int64),
                                          np.asarray(u, dtype=float), np.asarray(rev, dtype=bool))
        out = np.empty(seg.shape, dtype=complex)
        pid = self.seg_piece[seg]
        straight = pid < 0
        if straight.any():
            a = self.vertices[seg[straight]]
            b = self.vertices[seg[straight] + 1]
            a, b = np.where(rev[straight], b, a), np.where(rev[straight], a, b)
            us = u[straight]
            out[straight] = np.where(us <= 0.5, a + (b - a) * us, b - (b - a) * (1.0 - us))
        for k in np.unique(pid[~straight]):
            m = pid == k
            out[m] = self.pieces[k](self._piece_params(seg[m], u[m], rev[m]))
        return out

    def deriv(self, seg, u, rev=False):
        """Derivative ``dt/du`` at local coordinate ``u`` of segments ``seg``."""
        seg, u, rev = np.broadcast_arrays(np.asarray(seg, dtype=np.int64),
                                          np.asarray(u, dtype=float), np.asarray(rev, dtype=bool))
        out = np.empty(seg.shape, dtype=complex)
        pid = self.seg_piece[seg]
        straight = pid < 0
        if straight.any():
            out[straight] = self.vertices[seg[straight] + 1] - self.vertices[seg[straight]]
        for k in np.unique(pid[~straight]):
            m = pid == k
            span = self.seg_params[seg[m], 1] - self.seg_params[seg[m], 0]
            out[m] = self.pieces[k].derivative(self._piece_params(seg[m], u[m], rev[m])) * span
        return np.where(rev, -out, out)

    def insert_vertex(self, seg, u):
        """Copy of the curve with the point at ``(seg, u)`` made a vertex.

        Returns ``(curve, index)``; when the point already is a vertex the
        curve itself is returned.
        """
        seg, u = int(seg), float(u)
        if u <= 0.0:
            return self, seg
        if u >= 1.0:
            return self, (seg + 1) % self.n_segments
        p = complex(self.eval(seg, u))
        if p == self.vertices[seg]:
            return self, seg
        if p == self.vertices[seg + 1]:
            return self, (seg + 1) % self.n_segments
        pm = float(self._piece_params(np.array([seg]), np.array([u]))[0])
        v = np.insert(np.array(self.vertices), seg + 1, p)
        sp = np.insert(self.seg_piece, seg, self.seg_piece[seg])
        pr = np.insert(self.seg_params, seg, self.seg_params[seg], axis=0)
        if self.seg_piece[seg] < 0:
            pr[seg] = (0.0, 1.0)
            pr[seg + 1] = (0.0, 1.0)
        else:
            pr[seg, 1] = pm
            pr[seg + 1, 0] = pm
        c = Curve(v, pieces=self.pieces, seg_piece=sp, seg_params=pr,
                  generator_id=self.generator_id, params=self.params, validate=False)
        return c, seg + 1

    def arc_coordinate(self, seg, u):
        seg = np.asarray(seg, dtype=np.int64)
        return self.arc_coords[seg] + np.asarray(u, dtype=float) * self.seg_lengths[seg]

    def locate(self, s):
        """Map arc coordinates (mod length) to ``(seg, u)``."""
        s = np.mod(np.asarray(s, dtype=float), self.length)
        seg = np.clip(np.searchsorted(self.arc_coords, s, side="right") - 1, 0, self.n_segments - 1)
        u = np.clip((s - self.arc_coords[seg]) / self.seg_lengths[seg], 0.0, 1.0)
        return seg, u

    def point_at(self, s):
        seg, u = self.locate(s)
        return self.eval(seg, u)

    def piece_arc_coordinate(self, name, p):
        """Arc coordinate of the point with parameter ``p`` on the named piece."""
        pid = next(i for i, pc in enumerate(self.pieces) if pc.name == name)
        segs = np.flatnonzero(self.seg_piece == pid)
        lo = np.minimum(self.seg_params[segs, 0], self.seg_params[segs, 1])
        hi = np.maximum(self.seg_params[segs, 0], self.seg_params[segs, 1])
        hit = segs[(lo <= p) & (p <= hi)]
        if hit.size == 0:
            raise ValueError(f"parameter {p} outside piece '{name}'")
        k = int(hit[0])
        p0, p1 = self.seg_params[k]
        return float(self.arc_coordinate(k, (p - p0) / (p1 - p0)))

    # -- point queries --------------------------------------------------
    @cached_property
    def _vertex_tree(self):
        v = self.vertices[:-1]
        return cKDTree(np.column_stack([v.real, v.imag]))

    def nearest(self, z):
        """Nearest polyline position to each point: ``(seg, u, distance)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        k = min(8, self.n_segments)
        _, idx = self._vertex_tree.query(np.column_stack([z.real, z.imag]), k=k)
        idx = np.atleast_2d(idx).reshape(z.size, k)
        n = self.n_segments
        cand = np.concatenate([idx, (idx - 1) % n], axis=1)
        a = self.vertices[cand]
        d = self.vertices[cand + 1] - a
        u = np.clip(np.real((z[:, None] - a) * np.conj(d)) / np.abs(d) ** 2, 0.0, 1.0)
        dist = np.abs(a + u * d - z[:, None])
        best = np.argmin(dist, axis=1)
        rows = np.arange(z.size)
        return cand[rows, best], u[rows, best], dist[rows, best]

    def winding_number(self, z, chunk=256):
        """Winding number of the polyline around each point (0 or 1 for z off-curve)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.size)
        a, b = self.vertices[:-1], self.vertices[1:]
        for i in range(0, z.size, chunk):
            zz = z[i:i + chunk, None]
            out[i:i + chunk] = np.sum(np.angle((b - zz) / (a - zz)), axis=1) / (2 * np.pi)
        return np.rint(out).astype(np.int64)

    def contains(self, z):
        return self.winding_number(z) == 1

    # -- serialization --------------------------------------------------
    def to_dict(self):
        v = self.vertices
        return {
            "generator_id": self.generator_id,
            "params": self.params,
            "vertices": np.column_stack([v.real, v.imag]).tolist(),
            "arc_coords": self.arc_coords.tolist(),
            "length": self.length,
            "diameter": self.diameter,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "s"])
            for p, s in zip(self.vertices, self.arc_coords):
                w.writerow([f"{p.real:.17g}", f"{p.imag:.17g}", f"{s:.17g}"])

    @classmethod
    def from_points(cls, points, close=False, orient=False, **kwargs):
        """Straight polyline from points given as complex or (n, 2) reals."""
        p = np.asarray(points)
        if p.ndim == 2 and p.shape[1] == 2:
            p = p[:, 0] + 1j * p[:, 1]
        p = np.asarray(p, dtype=complex).ravel()
        if close and p[-1] != p[0]:
            p = np.append(p, p[0])
        if orient:
            x, y = p.real, p.imag
            if np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]) < 0:
                p = p[::-1].copy()
        return cls(p, **kwargs)

    @classmethod
    def from_json(cls, path_or_dict):
        d = path_or_dict
        if not isinstance(d, dict):
            with open(d) as fh:
                d = json.load(fh)
        return cls.from_points(np.asarray(d["vertices"], dtype=float),
                               generator_id=d.get("generator_id", "polyline"),
                               params=d.get("params"))

    @classmethod
    def from_csv(cls, path, orient=True):
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        pts = np.array([[float(r[0]), float(r[1])] for r in rows])
        return cls.from_points(pts, orient=orient)

    def __repr__(self):
        return (f"Curve({self.generator_id!r}, segments={self.n_segments}, "
                f"length={self.length:.6g})")


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


# -- construction ---------------------------------------------------------

def _sample_piece(piece, h, max_turn, max_rounds=64):
    if piece.init is not None:
        ts = np.asarray(piece.init(), dtype=float)
    else:
        ts = np.linspace(piece.t0, piece.t1, 9)
    for _ in range(max_rounds):
        a, b = ts[:-1], ts[1:]
        m = 0.5 * (a + b)
        pa, pb, pm = piece(a), piece(b), piece(m)
        d1, d2 = pm - pa, pb - pm
        with np.errstate(invalid="ignore"):
            turn = np.abs(np.angle(d2 * np.conj(d1)))
        turn = np.where((d1 == 0) | (d2 == 0), 0.0, turn)
        split = (np.abs(pb - pa) > h) | (turn > max_turn)
        if not split.any():
            break
        ts = np.insert(ts, np.flatnonzero(split) + 1, m[split])
    return ts


def build_polyline(pieces: Sequence[Piece], h=1e-3, max_turn=0.05,
                   generator_id="custom", params=None, validate=True):
    """Sample analytic pieces into a closed polyline.

    Each piece is bisected until every chord is at most ``h`` and the
    turning between half-chords is at most ``max_turn`` radians.  Pieces
    must chain end to start and the last must end where the first begins.
    """
    verts, seg_piece, seg_params = [], [], []
    ends = []
    for k, piece in enumerate(pieces):
        ts = _sample_piece(piece, h, max_turn)
        pts = piece(ts)
        ends.append((pts[0], pts[-1]))
        verts.append(pts[:-1])
        seg_piece.append(np.full(ts.size - 1, k))
        seg_params.append(np.column_stack([ts[:-1], ts[1:]]))
    all_pts = np.concatenate(verts)
    scale = float(np.max(np.abs(all_pts - all_pts[0]))) or 1.0
    for k in range(len(pieces)):
        end = ends[k][1]
        nxt = ends[(k + 1) % len(pieces)][0]
        if abs(end - nxt) > CLOSURE_RTOL * scale:
            raise ClosureError(
                f"piece '{pieces[k].name}' ends at {end:.6g} but "
                f"'{pieces[(k + 1) % len(pieces)].name}' starts at {nxt:.6g}")
    v = np.concatenate(verts + [[verts[0][0]]])
    return Curve(v, pieces=pieces, seg_piece=np.concatenate(seg_piece),
                 seg_params=np.concatenate(seg_params), generator_id=generator_id,
                 params=params, validate=validate)


def refine_near(curve: Curve, xi, radius, factor=2):
    """Subdivide every segment within ``radius`` of ``xi`` into ``factor`` parts."""
    factor = int(factor)
    if factor <= 1:
        return curve
    a, b = curve.vertices[:-1], curve.vertices[1:]
    d = b - a
    u = np.clip(np.real((xi - a) * np.conj(d)) / np.abs(d) ** 2, 0, 1)
    near = np.abs(a + u * d - xi) <= radius
    frac = np.arange(factor) / factor
    segs, us = [], []
    for k in range(curve.n_segments):
        if near[k]:
            segs.append(np.full(factor, k))
            us.append(frac)
        else:
            segs.append([k])
            us.append([0.0])
    segs = np.concatenate(segs)
    us = np.concatenate(us)
    verts = curve.eval(segs, us)
    verts[us == 0] = curve.vertices[segs[us == 0]]
    u_end = np.where(np.roll(segs, -1) == segs, np.roll(us, -1), 1.0)
    p0 = curve._piece_params(segs, us)
    p1 = curve._piece_params(segs, u_end)
    straight = curve.seg_piece[segs] < 0
    p0[straight], p1[straight] = 0.0, 1.0
    new_piece = curve.seg_piece[segs]
    if straight.any():
        # straight segments become independent straight segments
        new_piece = np.where(straight, -1, new_piece)
    return Curve(np.append(verts, verts[0]), pieces=curve.pieces, seg_piece=new_piece,
                 seg_params=np.column_stack([p0, p1]), generator_id=curve.generator_id,
                 params=curve.params, validate=False)


# -- geometric queries ----------------------------------------------------

def segment_disk_lengths(a, b, center, eps):
    """Parameter intervals and lengths of segments ``[a, b]`` inside disks.

    Returns ``(u_lo, u_hi, length)`` broadcast over segments and ``eps``;
    empty intersections have ``length == 0``.
    """
    d = b - a
    w = a - center
    A = np.abs(d) ** 2
    B = 2 * np.real(w * np.conj(d))
    C = np.abs(w) ** 2
    eps = np.asarray(eps, dtype=float)
    A_, B_, C_ = A[..., None], B[..., None], C[..., None]
    disc = B_ ** 2 - 4 * A_ * (C_ - eps ** 2)
    sq = np.sqrt(np.maximum(disc, 0.0))
    u_lo = np.clip((-B_ - sq) / (2 * A_), 0.0, 1.0)
    u_hi = np.clip((-B_ + sq) / (2 * A_), 0.0, 1.0)
    length = np.where(disc > 0, (u_hi - u_lo), 0.0) * np.sqrt(A_)
    return u_lo, u_hi, length


def neighborhood(curve: Curve, xi, eps):
    """Connected pieces of the curve within distance ``eps`` of ``xi``."""
    if not eps > 0:
        raise ValueError("neighborhood radius must be positive")
    xi = complex(xi)
    a, b = curve.vertices[:-1], curve.vertices[1:]
    u_lo, u_hi, ln = segment_disk_lengths(a, b, xi, [eps])
    u_lo, u_hi, ln = u_lo[:, 0], u_hi[:, 0], ln[:, 0]
    hit = np.flatnonzero(ln > 0)
    out = NeighborhoodSlice(center=xi, radius=float(eps), measure=float(np.sum(ln)))
    if hit.size == 0:
        return out
    if hit.size == curve.n_segments and np.all(u_lo == 0) and np.all(u_hi == 1):
        out.subarcs = [(0.0, curve.length)]
        return out
    n = curve.n_segments
    runs = []
    start = hit[0]
    prev = hit[0]
    for k in hit[1:]:
        if k == prev + 1 and u_hi[prev] == 1.0 and u_lo[k] == 0.0:
            prev = k
            continue
        runs.append((start, prev))
        start = prev = k
    runs.append((start, prev))
    # merge a run wrapping through the closing vertex
    if (len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1
            and u_lo[0] == 0.0 and u_hi[n - 1] == 1.0):
        first = runs.pop(0)
        runs[-1] = (runs[-1][0], first[1] + n)
    for s, e in runs:
        s0 = curve.arc_coordinate(s, u_lo[s])
        e0 = curve.arc_coordinate(e % n, u_hi[e % n]) + (curve.length if e >= n else 0.0)
        out.subarcs.append((float(s0), float(e0)))
    return out


def tangent_angle(curve: Curve, s):
    """Forward tangent angle at arc coordinate ``s``; a :class:`Corner` at corners."""
    seg, u = curve.locate(float(s))
    seg, u = int(seg), float(u)
    tol = 1e-12
    if u < tol or u > 1 - tol:
        if u > 1 - tol:
            seg, u = (seg + 1) % curve.n_segments, 0.0
        before = float(np.angle(curve.deriv((seg - 1) % curve.n_segments, 1.0)))
        after = float(np.angle(curve.deriv(seg, 0.0)))
        if abs(np.angle(np.exp(1j * (after - before)))) > CORNER_ATOL:
            return Corner(before, after)
        return after
    return float(np.angle(curve.deriv(seg, u)))


def tangent_angles(curve: Curve, s):
    """Unwrapped forward tangent angles along increasing arc coordinates."""
    s = np.sort(np.asarray(s, dtype=float))
    seg, u = curve.locate(s)
    return np.unwrap(np.angle(curve.deriv(seg, u)))


def diameter(curve: Curve):
    """Maximum pairwise vertex distance (attained on the convex hull)."""
    v = curve.vertices[:-1]
    pts = np.column_stack([v.real, v.imag])
    try:
        hv = v[ConvexHull(pts).vertices]
    except Exception:
        hv = v
    return float(np.max(np.abs(hv[:, None] - hv[None, :])))


# -- simplicity -----------------------------------------------------------

def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def _candidate_pairs(a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * np.abs(b - a)
    cls = np.floor(np.log2(np.maximum(half, 1e-300))).astype(int)
    groups = {c: np.flatnonzero(cls == c) for c in np.unique(cls)}
    trees = {c: cKDTree(np.column_stack([mid[g].real, mid[g].imag])) for c, g in groups.items()}
    keys = sorted(groups)
    out = []
    for i, c1 in enumerate(keys):
        g1 = groups[c1]
        r1 = half[g1].max()
        for c2 in keys[i:]:
            g2 = groups[c2]
            r = (r1 + half[g2].max()) * (1 + 1e-9)
            if c1 == c2:
                pr = trees[c1].query_pairs(r, output_type="ndarray")
                if len(pr):
                    out.append(np.column_stack([g1[pr[:, 0]], g1[pr[:, 1]]]))
            else:
                sm = trees[c1].sparse_distance_matrix(trees[c2], r, output_type="ndarray")
                if len(sm):
                    out.append(np.column_stack([g1[sm["i"]], g2[sm["j"]]]))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    pr = np.concatenate(out)
    return np.sort(pr, axis=1)


def _point_segment_distance(p, a, b):
    d = b - a
    u = np.clip(np.real((p - a) * np.conj(d)) / np.abs(d) ** 2, 0, 1)
    return np.abs(a + u * d - p)


def find_self_intersections(vertices):
    """Index pairs of non-adjacent segments that touch or cross."""
    v = np.asarray(vertices, dtype=complex)
    a, b = v[:-1], v[1:]
    n = a.size
    pr = _candidate_pairs(a, b)
    if pr.size == 0:
        return pr
    i, j = pr[:, 0], pr[:, 1]
    adjacent = (j - i == 1) | ((i == 0) & (j == n - 1))
    a1, b1, a2, b2 = a[i], b[i], a[j], b[j]
    d1, d2 = b1 - a1, b2 - a2
    o1, o2 = _cross(d1, a2 - a1), _cross(d1, b2 - a1)
    o3, o4 = _cross(d2, a1 - a2), _cross(d2, b1 - a2)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    tol = INTERSECT_RTOL * np.maximum(np.abs(d1), np.abs(d2))
    touch = ((_point_segment_distance(a2, a1, b1) <= tol)
             | (_point_segment_distance(b2, a1, b1) <= tol)
             | (_point_segment_distance(a1, a2, b2) <= tol)
             | (_point_segment_distance(b1, a2, b2) <= tol))
    bad = ~adjacent & (proper | touch)
    # adjacent segments only fail when they fold back onto each other
    par = np.abs(_cross(d1, d2)) <= INTERSECT_RTOL * np.abs(d1) * np.abs(d2)
    fold = adjacent & par & (np.real(d1 * np.conj(d2)) < 0)
    return pr[bad | fold]
