"""Continuous branches of ``arg(t - xi)`` and integrals against them.

Instead of fixing a branch through a cut, the argument is tracked by its
principal-value increments over panels that each subtend a small angle at
``xi``; the increments are the only thing any integral needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._trend import DEFAULT_POLICY, TrendPolicy, TrendResult, classify, dyadic_schedule
from .panels import SingularityError, locate_on_curve, panels_around
from .zoo import truncation_scale

__all__ = [
    "ArgBranch",
    "ShellSums",
    "track_arg",
    "arg_variation",
    "total_arg_variation",
    "stieltjes_arg_integral",
    "shell_sums",
    "default_schedule",
    "SingularityError",
]

SUBSTEPS = 8


@dataclass
class ArgBranch:
    """Unwrapped argument samples along an arc.

    Attributes
    ----------
    base : complex
        The point ``xi``.
    params : ndarray
        Arc coordinates of the samples (panel end points, in curve order).
    values : ndarray
        Continuous argument at the samples.
    subtended_max : float
        Largest increment between consecutive samples.
    """

    base: complex
    params: np.ndarray
    values: np.ndarray
    subtended_max: float
    variation: float

    @property
    def increment(self):
        return float(self.values[-1] - self.values[0])


def _panel_arc(panels, which):
    c = panels.curve
    w = np.where(panels.rev, 1.0 - panels.w1, panels.w0) if which == 0 else \
        np.where(panels.rev, 1.0 - panels.w0, panels.w1)
    return c.arc_coordinate(panels.seg, w)


def track_arg(curve, xi, arc=None, delta=None, substeps=SUBSTEPS):
    """Track ``arg(t - xi)`` along ``arc`` (whole curve when omitted).

    Parameters
    ----------
    curve : Curve
    xi : complex
    arc : (s0, s1), optional
        Arc-coordinate interval.
    delta : float, optional
        Exclusion radius around ``xi``; required when ``xi`` lies on the arc.

    Raises
    ------
    SingularityError
        If the arc passes through ``xi`` and no exclusion radius is given.
    """
    radii = [] if delta is None else [float(delta)]
    if delta is None:
        c2, k, xi_c = locate_on_curve(curve, xi)
        if k is not None:
            s_xi = c2.arc_coords[k]
            L = c2.length
            inside = arc is None or _arc_contains(arc, s_xi, L)
            if inside:
                raise SingularityError("xi lies on the arc; pass an exclusion radius delta > 0")
    P = panels_around(curve, xi, radii=radii, arc=arc)
    if len(P) == 0:
        raise SingularityError("nothing of the arc lies outside the exclusion disk")
    s_start = _panel_arc(P, 0)
    if arc is not None:
        # curve order starting at the arc start
        order = np.argsort(np.mod(s_start - arc[0], P.curve.length), kind="stable")
        P = P.subset(order)
        s_start = s_start[order]
    darg, *_ = P.increments(substeps)
    inc = darg.sum(axis=1)
    v0 = float(np.angle(P.start[0] - P.center))
    values = np.concatenate([[v0], v0 + np.cumsum(inc)])
    params = np.concatenate([s_start, [_panel_arc(P, 1)[-1]]])
    return ArgBranch(P.center, params, values, float(np.max(np.abs(inc))),
                     float(np.abs(darg).sum()))


def _arc_contains(arc, s, L):
    s0, s1 = float(arc[0]), float(arc[1])
    if s1 - s0 >= L:
        return True
    return (np.mod(s - s0, L) <= s1 - s0)


@dataclass
class ShellSums:
    """Per-annulus sums around ``xi`` for a fixed radius list.

    ``stieltjes[k]``, ``gauss[k]``, ``variation[k]`` and ``increment[k]``
    are taken over the panels of shell ``k`` (between ``radii[k-1]`` and
    ``radii[k]``; the last shell is outside the largest radius).
    """

    xi: complex
    g_xi: float
    radii: np.ndarray
    stieltjes: np.ndarray
    gauss: np.ndarray
    pv: np.ndarray
    variation: np.ndarray
    increment: np.ndarray
    n_panels: int


def shell_sums(curve, xi, radii, density=None, substeps=SUBSTEPS, gauss_nodes=16,
               keep_outer=True):
    """Stieltjes sums, arg variation and principal-value pieces per shell.

    The Stieltjes sum over a shell is the midpoint rule
    ``sum (g(mid) - g(xi)) * darg`` on ``substeps/2`` and ``substeps``
    sub-steps per panel, combined by one Richardson step.  ``gauss`` is the
    independent Gauss-Legendre value of ``Im int (g - g(xi)) / (t - xi) dt``
    and ``pv`` its complex version.
    """
    radii = np.asarray(sorted(radii), dtype=float)
    P = panels_around(curve, xi, radii=radii, keep_outer=keep_outer)
    c2 = P.curve
    nshell = radii.size + 1
    xi_c = P.center
    if density is not None:
        k_seg, k_u, _ = c2.nearest(xi_c)
        g_xi = float(density.at(c2, k_seg, k_u)[0])
    else:
        g_xi = 0.0
    sh = P.shell
    darg_f, mid_f, seg_f, w_f, rev_f = P.increments(substeps)
    var = np.bincount(sh, np.abs(darg_f).sum(axis=1), minlength=nshell)
    inc = np.bincount(sh, darg_f.sum(axis=1), minlength=nshell)
    if density is None:
        z = np.zeros(nshell)
        return ShellSums(xi_c, g_xi, radii, z, z.copy(), z.astype(complex), var, inc, len(P))
    gm = density.at(c2, seg_f, w_f, rev_f) - g_xi
    s_f = np.sum(gm * darg_f, axis=1)
    darg_c, mid_c, seg_c, w_c, rev_c = P.increments(substeps // 2)
    gc = density.at(c2, seg_c, w_c, rev_c) - g_xi
    s_c = np.sum(gc * darg_c, axis=1)
    st = np.bincount(sh, (4 * s_f - s_c) / 3, minlength=nshell)
    t, dt, seg, w, rev = P.gauss(gauss_nodes)
    gg = density.at(c2, seg, w, rev) - g_xi
    f = np.sum(gg * dt / (t - xi_c), axis=1)
    pv = np.bincount(sh, f.real, minlength=nshell) + 1j * np.bincount(sh, f.imag, minlength=nshell)
    return ShellSums(xi_c, g_xi, radii, st, pv.imag.copy(), pv, var, inc, len(P))


def arg_variation(curve, xi, delta, substeps=SUBSTEPS):
    """Variation of ``arg(t - xi)`` over the curve outside the disk of radius ``delta``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    S = shell_sums(curve, xi, [delta], substeps=substeps)
    return float(S.variation[1])


def default_schedule(curve, delta0=None, count=None):
    """Dyadic exclusion radii ``delta0 * 2**-k`` down to the truncation scale.

    Without a truncation scale ``count`` defaults to 16 levels.
    """
    if delta0 is None:
        delta0 = curve.diameter / 4
    floor = truncation_scale(curve)
    if count is None:
        count = 16 if floor <= 0 else min(64, int(np.floor(np.log2(delta0 / floor))) + 1)
    return dyadic_schedule(delta0, count, floor=floor)


def total_arg_variation(curve, xi, schedule=None, policy: TrendPolicy = DEFAULT_POLICY,
                        substeps=SUBSTEPS):
    """Variation of ``arg(t - xi)`` along a shrinking-exclusion schedule.

    Returns
    -------
    TrendResult
        ``status`` is CONVERGED, BOUNDED or DIVERGENT; ``values`` holds the
        variation at each ``delta`` of the schedule.
    """
    sched = default_schedule(curve) if schedule is None else np.asarray(schedule, dtype=float)
    if sched.size < 4:
        raise ValueError("schedule needs at least four radii")
    radii = np.sort(sched)
    S = shell_sums(curve, xi, radii, substeps=substeps)
    # variation outside radii[i] = sum of shells i+1 ...
    tail = np.cumsum(S.variation[::-1])[::-1]
    by_radius = {r: tail[i + 1] for i, r in enumerate(radii)}
    vals = np.array([by_radius[d] for d in sched])
    return classify(sched, vals, policy)


def stieltjes_arg_integral(curve, density, xi, delta, eps=None, return_check=False,
                           substeps=SUBSTEPS):
    """Integral of ``(g(t) - g(xi)) d arg(t - xi)`` over ``delta < |t - xi| <= eps``.

    ``eps=None`` integrates over the whole curve outside the ``delta`` disk.
    With ``return_check`` the Gauss-Legendre value of
    ``Im int (g - g(xi)) / (t - xi) dt`` over the same set is returned too.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if eps is not None and not delta < eps:
        raise ValueError("need delta < eps")
    radii = [delta] if eps is None else [delta, eps]
    S = shell_sums(curve, xi, radii, density=density, substeps=substeps,
                   keep_outer=eps is None)
    a = float(S.stieltjes[1:].sum())
    b = float(S.gauss[1:].sum())
    return (a, b) if return_check else a
