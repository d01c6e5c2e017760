"""Hierarchically refined simple-cubic lattices and their exact Voronoi cells."""

from .exactnum import Mat3, Rat, SingularSystem, Vec3, solve3, triple_product
from .lattice import (
    PLANS,
    Box,
    RefinementPlan,
    Site,
    SiteClass,
    candidate_neighbors,
    generate,
    nearest_gap,
    self_similarity_check,
    shell_histogram,
)
from .voronoi import ConvexCell, HalfSpace, bisector, clip, face_census, volume, voronoi_cell
from .analysis import montecarlo_volume, run_golden_checks, verify_max_free_point, volume_table

__version__ = "0.1.0"
