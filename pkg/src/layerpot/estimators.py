"""scikit-learn style wrappers.

The "training data" of these estimators is a curve rather than a feature
matrix: ``fit`` takes a :class:`~layerpot.curve.Curve`, and ``predict`` /
``transform`` take evaluation points as complex numbers or ``(n, 2)`` real
arrays.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .curve import Curve, segment_disk_lengths
from .density import parse_density
from .diagnostics import kral_functional
from .integrals import CauchyEvaluator, sokhotski_values

__all__ = ["CauchyIntegral", "DoubleLayerPotential", "BoundaryTrace", "RegularityProfile",
           "as_points"]


def as_points(X):
    """Complex array from complex input or an ``(n, 2)`` array of coordinates."""
    X = np.asarray(X)
    if np.iscomplexobj(X):
        return X.ravel().astype(complex)
    X = X.astype(float)
    if X.ndim == 2 and X.shape[1] == 2:
        return X[:, 0] + 1j * X[:, 1]
    if X.ndim == 1:
        return X.astype(complex)
    raise ValueError("points must be complex or an (n, 2) array")


def _check_curve(curve):
    if not isinstance(curve, Curve):
        raise TypeError("fit expects a Curve")
    return curve


class CauchyIntegral(BaseEstimator):
    """Cauchy-type integral of a fixed density over a fitted curve.

    Parameters
    ----------
    density : str or Density
        Density spec, e.g. ``"re"``, ``"const:1"``, ``"ex4-log"``.
    nodes : int
        Gauss-Legendre nodes per panel.
    kappa : float
        Panels with chord above ``kappa`` times their distance to ``z`` are refined.
    """

    def __init__(self, density="const:1", nodes=16, kappa=0.5):
        self.density = density
        self.nodes = nodes
        self.kappa = kappa

    def fit(self, curve, y=None):
        self.curve_ = _check_curve(curve)
        self.density_ = parse_density(self.density, curve)
        self.evaluator_ = CauchyEvaluator(curve, self.density_, nodes=self.nodes, kappa=self.kappa)
        return self

    def predict(self, X):
        check_is_fitted(self, "evaluator_")
        return self.evaluator_(as_points(X))


class DoubleLayerPotential(CauchyIntegral):
    """Real part of :class:`CauchyIntegral`: the logarithmic double layer potential."""

    def predict(self, X):
        return super().predict(X).real


class BoundaryTrace(TransformerMixin, BaseEstimator):
    """Boundary values from the principal-value formulas.

    ``transform(xi)`` returns columns ``Re g+``, ``Re g-``, ``g(xi)`` and the
    real part of the reduced singular integral.
    """

    def __init__(self, density="const:1", tol=1e-4):
        self.density = density
        self.tol = tol

    def fit(self, curve, y=None):
        self.curve_ = _check_curve(curve)
        self.density_ = parse_density(self.density, curve)
        return self

    def transform(self, X):
        check_is_fitted(self, "curve_")
        rows = []
        for xi in as_points(X):
            sv = sokhotski_values(self.curve_, self.density_, xi, tol=self.tol)
            rows.append([sv.re_plus, sv.re_minus, sv.g_xi, sv.pv.value.real])
        return np.array(rows, dtype=float).reshape(-1, 4)


class RegularityProfile(TransformerMixin, BaseEstimator):
    """Per-point regularity features: ``theta_xi(eps)/eps`` per ``eps`` and the ray-crossing integral."""

    def __init__(self, eps_grid=(0.5, 0.25, 0.125, 0.0625), grid_size=3600):
        self.eps_grid = eps_grid
        self.grid_size = grid_size

    def fit(self, curve, y=None):
        self.curve_ = _check_curve(curve)
        return self

    def transform(self, X):
        check_is_fitted(self, "curve_")
        c = self.curve_
        eps = np.asarray(self.eps_grid, dtype=float)
        a, b = c.vertices[:-1], c.vertices[1:]
        out = []
        for xi in as_points(X):
            _, _, ln = segment_disk_lengths(a, b, xi, eps)
            out.append(np.concatenate([ln.sum(axis=0) / eps,
                                       [kral_functional(c, xi, self.grid_size)]]))
        return np.array(out).reshape(-1, eps.size + 1)
