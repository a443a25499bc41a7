"""Numerical uniformization onto circle domains by Koebe's iteration."""

from .distortion import (QSReport, annulus_modulus_check, random_segments_in_domain,
                         separating_width, weak_qs_check)
from .iterate import (KoebeStep, StagnationError, UniformizationResult, check_disjoint,
                      default_triple, koebe_iterate)
from .loops import AnalyticLoop, LoopError, lsq_circle
from .pipeline import (DEFAULT_STAGES, PipelineResult, configuration_loops, domain_samples,
                       stage_sweep, uniformize_configuration)
from .theodorsen import (CIRCULARITY_LIMIT, DivergenceError, RiemannMap, conjugate,
                         riemann_step, self_convergence)

__all__ = [
    "AnalyticLoop", "CIRCULARITY_LIMIT", "DEFAULT_STAGES", "DivergenceError", "KoebeStep",
    "LoopError", "PipelineResult", "QSReport", "RiemannMap", "StagnationError",
    "UniformizationResult", "annulus_modulus_check", "check_disjoint", "configuration_loops",
    "conjugate", "default_triple", "domain_samples", "koebe_iterate", "lsq_circle",
    "random_segments_in_domain", "riemann_step", "self_convergence", "separating_width",
    "stage_sweep", "uniformize_configuration", "weak_qs_check",
]
