"""Cauchy-type integrals and logarithmic double layer potentials on rough Jordan curves."""

__version__ = "0.1.0"

from .curve import (ClosureError, Curve, CurveError, OrientationError, Piece,
                    SelfIntersectionError, arc_piece, build_polyline, line_piece, neighborhood,
                    refine_near, tangent_angle)
from .density import Density, parse_density
from .zoo import ZOO, make_curve, make_density_example4, truncation_scale
from .panels import SingularityError
from .argtrack import (arg_variation, shell_sums, stieltjes_arg_integral, total_arg_variation,
                       track_arg)
from .integrals import (NonConvergenceError, boundary_limit, cauchy_integral,
                        criterion_functional, criterion_sweep, double_layer_potential,
                        pv_reduced_singular, sokhotski_values)
from .diagnostics import (dini_integral, k_gamma, kral_functional, lemma_inequality_check,
                          modulus_of_continuity, omega_characteristic, oscillation_count,
                          phi_gamma, ray_crossings, theorem3_report, theta_report)
from .estimators import BoundaryTrace, CauchyIntegral, DoubleLayerPotential, RegularityProfile

__all__ = [
    "Curve", "Piece", "CurveError", "ClosureError", "SelfIntersectionError", "OrientationError",
    "line_piece", "arc_piece", "build_polyline", "neighborhood", "refine_near", "tangent_angle",
    "Density", "parse_density", "ZOO", "make_curve", "make_density_example4", "truncation_scale",
    "SingularityError", "track_arg", "arg_variation", "total_arg_variation", "shell_sums",
    "stieltjes_arg_integral", "NonConvergenceError", "cauchy_integral", "double_layer_potential",
    "pv_reduced_singular", "sokhotski_values", "boundary_limit", "criterion_functional",
    "criterion_sweep", "theta_report", "ray_crossings", "kral_functional", "oscillation_count",
    "k_gamma", "phi_gamma", "modulus_of_continuity", "omega_characteristic", "dini_integral",
    "theorem3_report", "lemma_inequality_check", "CauchyIntegral", "DoubleLayerPotential",
    "BoundaryTrace", "RegularityProfile",
]
