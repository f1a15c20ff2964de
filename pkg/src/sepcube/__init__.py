"""Separating polytopes for subsets of the Boolean cube.

Constructions, exact separation checks and a Fourier-Motzkin oracle, plus
rectangle partitions of edge/non-edge disjointness matrices.
"""
from .cube import BoolSet, CapacityError, CoordPartition, CubePoint, enum_cube, odd_set, split_point, weight2_set
from .polytope import AffineMap, ExtendedFormulation, HPolytope, LinConstraint, Relation, boolean_points
from .project import ResourceCapError, ef_boolean_points, fm_eliminate, is_contained, is_valid, maximize_linear, project_onto
from .constructions import (
    Graph,
    canonical_lift,
    edge_hull_relaxation,
    edge_polytope,
    halfspace_even_outside,
    halfsquare_separator,
    hamming_separator,
    pairwise_polytope,
    verify_separation_direct,
    verify_separation_ef,
)
from .matrices import eis_matrix, ene_decompose_bipartite, ene_decompose_general, ene_matrix, verify_decomposition

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "BoolSet",
    "CapacityError",
    "CoordPartition",
    "CubePoint",
    "ExtendedFormulation",
    "Graph",
    "HPolytope",
    "LinConstraint",
    "Relation",
    "ResourceCapError",
    "boolean_points",
    "canonical_lift",
    "edge_hull_relaxation",
    "edge_polytope",
    "ef_boolean_points",
    "eis_matrix",
    "ene_decompose_bipartite",
    "ene_decompose_general",
    "ene_matrix",
    "enum_cube",
    "fm_eliminate",
    "halfspace_even_outside",
    "halfsquare_separator",
    "hamming_separator",
    "is_contained",
    "is_valid",
    "maximize_linear",
    "odd_set",
    "pairwise_polytope",
    "project_onto",
    "split_point",
    "verify_decomposition",
    "verify_separation_direct",
    "verify_separation_ef",
    "weight2_set",
]
