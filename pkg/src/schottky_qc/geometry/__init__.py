"""Sphere geometry primitives."""

from .circles import (Cap, DiskRegion, GeneralizedCircle, GeometryError, cell_spherical_area,
                      region_contains, region_gap,
                      fit_circle, reflect_in, spherical_area)
from .continua import (ContinuumSample, FatnessResult, cap_intersection_area, dcross_bruteforce,
                       dcross_estimate, fatness_test, is_self_intersecting, quasicircle_constant,
                       relative_distance)
from .moebius import (MoebiusMap, apply_moebius, compose, cross_ratio, map_disk, random_moebius,
                      random_rotation, refit_residual, rotation_moebius)
from .points import (INF, ExtendedPoint, as_array, chordal_dist, euclidean_dist, is_inf, lift,
                     pairwise, project, random_sphere_points, spherical_dist)

__all__ = [
    "Cap", "ContinuumSample", "DiskRegion", "ExtendedPoint", "FatnessResult", "GeneralizedCircle",
    "GeometryError", "INF", "MoebiusMap", "apply_moebius", "as_array", "cap_intersection_area",
    "cell_spherical_area", "chordal_dist", "compose", "cross_ratio", "dcross_bruteforce",
    "dcross_estimate", "euclidean_dist", "fatness_test", "fit_circle", "is_inf",
    "is_self_intersecting", "lift", "map_disk", "pairwise", "project", "quasicircle_constant",
    "random_moebius", "random_rotation", "region_contains", "region_gap", "random_sphere_points", "reflect_in", "refit_residual",
    "relative_distance", "rotation_moebius", "spherical_area", "spherical_dist",
]
