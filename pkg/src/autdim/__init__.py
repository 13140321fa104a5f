"""Invariant metrics, holomorphic flows and automorphism-dimension estimates for planar and C^2 domains."""

from .domains import (Annulus, Ball, DiskMinusDisk, Ellipse, ProductMinusDiagonal, Sampled, Strip, UnitDisk,
                      UpperHalfPlane, boundary_samples, contains, dist_to_boundary, domain_from_json,
                      domain_to_json, hausdorff_distance, inner_outer_radii)
from .errors import AutDimError
from .metric import (ball_caratheodory, extremal_length_search, extremal_search, model_caratheodory,
                     poincare_distance, sandwich_bounds)
from .fields import VectorFieldPoly
from .flow import GroupAction, complexify, cr_residual, flow, group_property_residual, infinitesimal_residual
from .dimension import aut_dim_estimate, field_convergence_experiment, semicontinuity_experiment, tangency_matrix
from .estimates import gram_normalize, run_battery

__version__ = "0.1.0"
