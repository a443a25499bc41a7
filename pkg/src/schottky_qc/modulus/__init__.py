"""Classical and transboundary modulus of curve families on chart grids."""

from .api import (ModulusResult, auto_grid, brute_force_check, classical_modulus, compare_report,
                  compare_suite, invariance_check, loewner_sweep, random_path_check,
                  rotation_invariance, shortest_rho_length, transboundary_modulus,
                  transform_family)
from .explicit import (ExplicitDensity, cap_width, explicit_admissibility,
                       explicit_annulus_density, mass_profile, random_width_capped_caps)
from .grid import GridSpec
from .network import (DiscretizationError, FamilySpec, InfiniteModulusError, Network,
                      build_network)
from .potential import solve_potential
from .scenes import (loewner_scene, narrow_passage, narrow_passage_grid, random_disk_obstacles,
                     random_family, separated_segments, toy_case, toy_suite)
from .shapes import DiskShape, PolygonShape, PolylineShape, as_shape, transform_shape

__all__ = [
    "DiscretizationError", "DiskShape", "ExplicitDensity", "FamilySpec", "GridSpec",
    "InfiniteModulusError", "ModulusResult", "Network", "PolygonShape", "PolylineShape",
    "as_shape", "auto_grid", "brute_force_check", "build_network", "cap_width",
    "classical_modulus", "compare_report", "compare_suite", "explicit_admissibility",
    "explicit_annulus_density", "invariance_check", "loewner_scene", "loewner_sweep",
    "mass_profile", "narrow_passage", "narrow_passage_grid", "random_disk_obstacles",
    "random_family", "random_path_check", "random_width_capped_caps", "rotation_invariance",
    "separated_segments", "shortest_rho_length", "solve_potential", "toy_case", "toy_suite",
    "transboundary_modulus", "transform_shape", "transform_family",
]
