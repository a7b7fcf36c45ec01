"""Field-consistent four-node Mindlin plate element with crack enrichment."""

from .enrichment import enrichment_F, enrichment_G
from .matrices import (
    ElementDofLayout,
    EnrichmentFunction,
    element_mass,
    element_matrices,
    element_stiffness,
    standard_matrices,
    strain_operators,
)
from .quadrature import QuadraturePlan, gauss_square, quadrature_plan, triangle_rule
from .shape import cartesian_derivatives, parent_coords, shape_q4
from .shear import direct_shear_strain, substitute_shear_strain

__all__ = [
    "ElementDofLayout",
    "EnrichmentFunction",
    "QuadraturePlan",
    "cartesian_derivatives",
    "direct_shear_strain",
    "element_mass",
    "element_matrices",
    "element_stiffness",
    "enrichment_F",
    "enrichment_G",
    "gauss_square",
    "parent_coords",
    "quadrature_plan",
    "shape_q4",
    "standard_matrices",
    "strain_operators",
]
