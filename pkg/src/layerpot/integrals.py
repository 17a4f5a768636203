"""Cauchy-type integral, double layer potential and their boundary values.

Off the curve the integral ``(1/2 pi i) oint g(t) / (t - z) dt`` is computed
by composite Gauss-Legendre quadrature on the analytic pieces, with panels
near ``z`` bisected until each is small against its distance to ``z``.  No
singularity subtraction is used.

On the curve, the one-sided limits follow from the reduced singular
integral and the Stieltjes integral against ``d arg(t - xi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._trend import dyadic_schedule
from .argtrack import shell_sums
from .density import Density
from .panels import Panels, locate_on_curve, refine_panels

__all__ = [
    "CauchyEvaluator",
    "cauchy_integral",
    "double_layer_potential",
    "PVResult",
    "pv_reduced_singular",
    "SokhotskiResult",
    "sokhotski_values",
    "BoundaryValueResult",
    "boundary_limit",
    "criterion_functional",
    "criterion_sweep",
    "inward_normal",
    "local_holder_exponent",
]

ON_CURVE_ATOL = 1e-12


class NonConvergenceError(RuntimeError):
    pass


class CauchyEvaluator:
    """Reusable quadrature of the Cauchy-type integral on one curve.

    Parameters
    ----------
    curve : Curve
    density : Density
    nodes : int
        Gauss-Legendre nodes per panel.
    kappa : float
        A panel is used as is when its chord is at most ``kappa`` times its
        distance to ``z``; otherwise it is bisected.
    """

    def __init__(self, curve, density, nodes=16, kappa=0.5):
        self.curve = curve
        self.density = density
        self.nodes = nodes
        self.kappa = kappa
        n = curve.n_segments
        base = Panels(curve, 0j, np.arange(n), np.zeros(n), np.ones(n), np.zeros(n, bool),
                      curve.vertices[:-1], curve.vertices[1:], np.zeros(n, np.int64))
        t, dt, seg, w, rev = base.gauss(nodes)
        g = density.at(curve, seg, w, rev)
        self._t = t
        self._gdt = g * dt
        self._dt = dt
        self._a = curve.vertices[:-1]
        self._b = curve.vertices[1:]
        self._chord = np.abs(self._b - self._a)

    def _seg_dist(self, z):
        d = self._b - self._a
        u = np.clip(np.real((z[:, None] - self._a) * np.conj(d)) / np.abs(d) ** 2, 0, 1)
        return np.abs(self._a + u * d - z[:, None])

    def _near_sum(self, z, segs, kappa, with_one=False):
        c = self.curve
        a, b = self._a[segs], self._b[segs]
        rev = np.abs(b - z) < np.abs(a - z)
        P = refine_panels(c, z, segs, np.zeros(segs.size), np.ones(segs.size), rev,
                          radii=(), kappa=kappa, max_angle=np.pi)
        t, dt, seg, w, rv = P.gauss(self.nodes)
        g = self.density.at(c, seg, w, rv)
        k = dt / (t - z)
        s = np.sum(g * k)
        return (s, np.sum(k)) if with_one else s

    def integral_sums(self, z, chunk=16, kappa=None, with_one=False):
        """``oint g(t)/(t - z) dt`` (and ``oint dt/(t - z)`` with ``with_one``)."""
        kappa = self.kappa if kappa is None else kappa
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.size, dtype=complex)
        one = np.empty(z.size, dtype=complex)
        for i in range(0, z.size, chunk):
            zz = z[i:i + chunk]
            dist = self._seg_dist(zz)
            if np.any(dist.min(axis=1) <= ON_CURVE_ATOL * max(1.0, self.curve.diameter)):
                raise ValueError("z lies on the curve; use the boundary-value routines")
            near = self._chord[None, :] > kappa * dist
            far = np.sum(self._gdt[None] / (self._t[None] - zz[:, None, None]), axis=2)
            out[i:i + chunk] = np.where(near, 0.0, far).sum(axis=1)
            if with_one:
                k = np.sum(self._dt[None] / (self._t[None] - zz[:, None, None]), axis=2)
                one[i:i + chunk] = np.where(near, 0.0, k).sum(axis=1)
            for j in range(zz.size):
                segs = np.flatnonzero(near[j])
                if segs.size:
                    r = self._near_sum(zz[j], segs, kappa, with_one)
                    if with_one:
                        out[i + j] += r[0]
                        one[i + j] += r[1]
                    else:
                        out[i + j] += r
        return (out, one) if with_one else out

    def __call__(self, z, kappa=None):
        """Values of the Cauchy-type integral at off-curve points ``z``."""
        return self.integral_sums(z, kappa=kappa) / (2j * np.pi)

    def with_error(self, z):
        """Values and the change under halving ``kappa`` (an error estimate)."""
        v1 = self(z)
        v2 = self(z, kappa=self.kappa / 2)
        return v2, np.abs(v2 - v1)


def cauchy_integral(curve, density, z, **kwargs):
    """Cauchy-type integral ``(1/2 pi i) oint g(t)/(t - z) dt`` at points ``z``."""
    out = CauchyEvaluator(curve, density, **kwargs)(z)
    return out if np.ndim(z) else complex(out[0])


def double_layer_potential(curve, density, z, **kwargs):
    """Logarithmic double layer potential, the real part of the Cauchy-type integral."""
    out = CauchyEvaluator(curve, density, **kwargs)(z).real
    return out if np.ndim(z) else float(out[0])


# -- principal values -----------------------------------------------------

@dataclass
class PVResult:
    """Truncation trace of ``int_{|t-xi|>delta} (g(t) - g(xi)) / (t - xi) dt``."""

    value: complex
    deltas: np.ndarray
    partials: np.ndarray
    converged: bool
    re_converged: bool
    im_converged: bool
    tolerance: float
    stieltjes: np.ndarray = field(default_factory=lambda: np.empty(0))
    g_xi: float = 0.0
    xi: complex = 0j

    @property
    def trace(self):
        return list(zip(self.deltas.tolist(), self.partials.tolist()))

    @property
    def stieltjes_value(self):
        """Richardson value of the arg-Stieltjes partials (limit of the Im part)."""
        s = self.stieltjes
        return float(2 * s[-1] - s[-2]) if s.size >= 2 else float(s[-1])


def _default_pv_schedule(curve, count=24):
    return dyadic_schedule(curve.diameter / 4, count)


def pv_reduced_singular(curve, density, xi, schedule=None, tol=1e-4):
    """Reduced singular Cauchy integral at ``xi`` along a shrinking-exclusion schedule.

    The value is the order-one Richardson combination of the last two
    partials; the convergence flags compare the last two raw partials
    (real and imaginary parts separately) against ``tol``.
    """
    sched = _default_pv_schedule(curve) if schedule is None else np.asarray(schedule, dtype=float)
    if sched.size < 2 or np.any(np.diff(sched) >= 0):
        raise ValueError("schedule must hold at least two strictly decreasing radii")
    radii = np.sort(sched)
    S = shell_sums(curve, xi, radii, density=density)
    tail_pv = np.cumsum(S.pv[::-1])[::-1]
    tail_st = np.cumsum(S.stieltjes[::-1])[::-1]
    idx = {r: i + 1 for i, r in enumerate(radii)}
    partials = np.array([tail_pv[idx[d]] for d in sched])
    st = np.array([tail_st[idx[d]] for d in sched])
    diff = partials[-1] - partials[-2]
    re_ok = bool(abs(diff.real) < tol)
    im_ok = bool(abs(diff.imag) < tol)
    value = 2 * partials[-1] - partials[-2]
    return PVResult(complex(value), sched, partials, re_ok and im_ok, re_ok, im_ok, tol,
                    st, S.g_xi, S.xi)


@dataclass
class SokhotskiResult:
    """One-sided boundary values at ``xi``.

    ``plus``/``minus`` are complex when the full principal value converged
    and ``None`` otherwise; ``re_plus``/``re_minus`` are always the real
    parts ``g(xi) + S/2pi`` and ``S/2pi`` from the arg-Stieltjes integral.
    """

    xi: complex
    g_xi: float
    plus: complex | None
    minus: complex | None
    re_plus: float
    re_minus: float
    real_only: bool
    pv: PVResult

    @property
    def jump(self):
        return self.re_plus - self.re_minus


def sokhotski_values(curve, density, xi, schedule=None, tol=1e-4):
    """Boundary values from the reduced singular integral at ``xi``.

    Raises
    ------
    NonConvergenceError
        When neither the full principal value nor its imaginary part settles.
    """
    pv = pv_reduced_singular(curve, density, xi, schedule, tol)
    if not pv.im_converged:
        raise NonConvergenceError("the reduced singular integral did not converge at xi")
    g = pv.g_xi
    s = pv.stieltjes_value
    re_minus = s / (2 * np.pi)
    re_plus = g + re_minus
    if pv.converged:
        minus = pv.value / (2j * np.pi)
        plus = g + minus
        return SokhotskiResult(pv.xi, g, complex(plus), complex(minus), re_plus, re_minus, False, pv)
    return SokhotskiResult(pv.xi, g, None, None, re_plus, re_minus, True, pv)


# -- boundary limits ------------------------------------------------------

def inward_normal(curve, k):
    """Unit normal into the interior at vertex ``k`` (bisector of one-sided normals)."""
    n = curve.n_segments
    before = complex(curve.deriv((k - 1) % n, 1.0))
    after = complex(curve.deriv(k % n, 0.0))
    T = before / abs(before) + after / abs(after)
    if abs(T) < 1e-8:
        # cusp: the two one-sided tangents are opposite
        return 1j * after / abs(after)
    return 1j * T / abs(T)


def local_holder_exponent(curve, density, k, levels=12):
    """Fitted exponent of ``|g(t) - g(xi)|`` against arc distance at vertex ``k``."""
    s0 = curve.arc_coords[k]
    L = curve.length
    hs = L * 2.0 ** -np.arange(4, 4 + levels)
    seg_p, u_p = curve.locate(s0 + hs)
    seg_m, u_m = curve.locate(s0 - hs)
    g0 = density.at(curve, np.array([k % curve.n_segments]), np.array([0.0]))[0]
    dp = np.abs(density.at(curve, seg_p, u_p) - g0)
    dm = np.abs(density.at(curve, seg_m, u_m) - g0)
    d = np.maximum(dp, dm)
    ok = d > 1e-14
    if ok.sum() < 3:
        return 1.0, 0.0
    slope = np.polyfit(np.log(hs[ok]), np.log(d[ok]), 1)[0]
    return float(np.clip(slope, 0.0, 1.0)), float(d.max())


def _model(name, alpha):
    if name == "linear":
        return lambda h: h
    if name == "log":
        return lambda h: 1.0 / (1.0 + np.log(1.0 / h))
    if name == "power":
        return lambda h: h ** alpha
    raise ValueError(f"unknown extrapolation model '{name}'")


@dataclass
class BoundaryValueResult:
    xi: complex
    side: str
    direction: complex
    h: np.ndarray
    values: np.ndarray
    extrapolants: np.ndarray
    limit: float
    formula: float | None
    discrepancy: float | None
    converged: bool
    model: str
    tolerance: float

    @property
    def approach_trace(self):
        return list(zip(self.h.tolist(), self.values.tolist()))


def boundary_limit(curve, density, xi, side="+", schedule=None, model="auto",
                   formula=True, pv_schedule=None, evaluator=None):
    """Limit of ``Re g~(z)`` as ``z -> xi`` from ``D+`` (side ``'+'``) or ``D-``.

    Points ``z_k = xi + h_k * n`` approach along the inward (or outward)
    normal; each is checked to lie on the requested side.  The values are
    extrapolated under an error model ``c * phi(h)``: ``h`` (linear),
    ``h**alpha`` (power) or ``1/(1 + ln(1/h))`` (log).  ``"auto"`` picks the
    model from the local Hölder exponent of the density at ``xi``.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    c2, k, xi_c = locate_on_curve(curve, xi)
    if k is None:
        raise ValueError("xi is not on the curve")
    h = dyadic_schedule(curve.diameter * 1e-3, 10) if schedule is None \
        else np.asarray(schedule, dtype=float)
    if h.size < 3 or np.any(np.diff(h) >= 0):
        raise ValueError("approach schedule needs at least three decreasing steps")
    alpha, _ = local_holder_exponent(c2, density, k)
    if model == "auto":
        model = "log" if alpha < 0.25 else ("linear" if alpha >= 0.999 else "power")
    phi = _model(model, max(alpha, 1e-3))
    n = inward_normal(c2, k)
    direction = n if side == "+" else -n
    want = 1 if side == "+" else 0
    z = xi_c + h * direction
    if not np.all(c2.winding_number(z) == want):
        direction = _reaim(c2, xi_c, h, direction, want)
        z = xi_c + h * direction
    ev = evaluator if evaluator is not None and evaluator.curve is c2 else CauchyEvaluator(c2, density)
    vals = ev(z).real
    p = phi(h)
    ext = (p[1:] * vals[:-1] - p[:-1] * vals[1:]) / (p[1:] - p[:-1])
    limit = float(ext[-1])
    # tolerance scaled by density roughness at the finest step
    seg_p, u_p = c2.locate(c2.arc_coords[k] + np.linspace(-h[-1], h[-1], 17))
    g0 = density.at(c2, np.array([k % c2.n_segments]), np.array([0.0]))[0]
    om = float(np.max(np.abs(density.at(c2, seg_p, u_p) - g0)))
    tol = 1e-6 + 1e-3 * om
    converged = bool(abs(ext[-1] - ext[-2]) < tol)
    fval = disc = None
    if formula:
        sv = sokhotski_values(curve, density, xi_c, pv_schedule)
        fval = sv.re_plus if side == "+" else sv.re_minus
        disc = abs(limit - fval)
    return BoundaryValueResult(xi_c, side, direction, h, vals, ext, limit, fval, disc,
                               converged, model, tol)


def _reaim(curve, xi, h, direction, want):
    for j in range(1, 32):
        for sgn in (1, -1):
            d = direction * np.exp(1j * sgn * j * np.pi / 64)
            if np.all(curve.winding_number(xi + h * d) == want):
                return d
    raise ValueError("no approach direction keeps all points on the requested side")


# -- criterion functional ---------------------------------------------------

@dataclass
class CriterionResult:
    eps: float
    value: float
    argmax_xi: complex
    argmax_delta: float


def criterion_sweep(curve, density, eps_list, xi_grid, delta_levels=12):
    """``sup_xi sup_delta |int_{delta<|t-xi|<=eps} (g - g(xi)) d arg(t - xi)|`` per ``eps``.

    For each ``eps`` the ``delta`` grid is ``eps * 2**-k``, ``k = 1..delta_levels``.
    The sup is a lower bound of the true sup over the continuum.
    """
    eps_list = np.asarray(eps_list, dtype=float)
    radii = np.unique(np.concatenate([e * 2.0 ** -np.arange(0, delta_levels + 1) for e in eps_list]))
    best = {float(e): CriterionResult(float(e), 0.0, complex(np.nan), np.nan) for e in eps_list}
    for xi in np.atleast_1d(np.asarray(xi_grid, dtype=complex)):
        S = shell_sums(curve, xi, radii, density=density, keep_outer=False)
        cum = np.concatenate([[0.0], np.cumsum(S.stieltjes[1:])])
        # cum[i] = integral over radii[0] < |t - xi| <= radii[i]
        pos = {r: i for i, r in enumerate(radii)}
        for e in eps_list:
            ie = pos[float(e)]
            for kk in range(1, delta_levels + 1):
                d = e * 2.0 ** -kk
                val = abs(cum[ie] - cum[pos[d]])
                if val > best[float(e)].value:
                    best[float(e)] = CriterionResult(float(e), float(val), complex(S.xi), float(d))
    return [best[float(e)] for e in eps_list]


def criterion_functional(curve, density, eps, xi_grid, delta_grid=None):
    """Sampled value of the criterion functional at one ``eps``."""
    if delta_grid is None:
        return criterion_sweep(curve, density, [eps], xi_grid)[0].value
    delta_grid = np.asarray(delta_grid, dtype=float)
    if np.any(delta_grid >= eps) or np.any(delta_grid <= 0):
        raise ValueError("delta grid must lie in (0, eps)")
    radii = np.unique(np.concatenate([delta_grid, [eps]]))
    best = 0.0
    for xi in np.atleast_1d(np.asarray(xi_grid, dtype=complex)):
        S = shell_sums(curve, xi, radii, density=density, keep_outer=False)
        cum = np.concatenate([[0.0], np.cumsum(S.stieltjes[1:])])
        for i in range(radii.size - 1):
            best = max(best, abs(cum[-1] - cum[i]))
    return float(best)
