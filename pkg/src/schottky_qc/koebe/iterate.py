"""Koebe's iteration: make one boundary loop round at a time, renormalize, repeat."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..geometry import GeneralizedCircle, MoebiusMap
from .loops import AnalyticLoop, LoopError, lsq_circle
from .theodorsen import RiemannMap, riemann_step


class StagnationError(RuntimeError):
    """Residual decreased by less than 1% over three full cycles."""

    def __init__(self, message: str, result: "UniformizationResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True, eq=False)
class KoebeStep:
    component: int
    riemann: RiemannMap
    normalize: MoebiusMap

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.normalize(self.riemann(z)), dtype=complex)


@dataclass(eq=False)
class UniformizationResult:
    """Circles of the computed circle domain plus everything needed to audit the map.

    ``trace[0]`` is the largest initial circularity and ``trace[s]`` the largest
    circularity after step s.  ``correspondence[i]`` pairs the original boundary samples of
    loop i with their final images."""

    circles: list
    trace: list
    cycle_trace: list
    steps: list
    correspondence: list
    triple: tuple
    status: str
    fit_residuals: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def residual(self) -> float:
        return float(self.trace[-1])

    def map(self, z) -> np.ndarray:
        """The composite conformal map at points of the original domain."""
        out = np.asarray(z, dtype=complex)
        for st in self.steps:
            out = st(out)
        return out

    def triple_error(self) -> float:
        img = self.map(np.array(self.triple, dtype=complex))
        err = 0.0
        for a, b in zip(img, self.triple):
            if np.isinf(abs(b)):
                err = max(err, 0.0 if np.isinf(abs(a)) else np.inf)
            else:
                err = max(err, abs(a - b))
        return float(err)

    def min_gap(self) -> float:
        gaps = [abs(a.center - b.center) - a.radius - b.radius
                for a, b in itertools.combinations(self.circles, 2)]
        return float(min(gaps)) if gaps else np.inf


def _cloud_circularity(p: np.ndarray) -> float:
    c, _ = lsq_circle(p)
    r = np.abs(p - c)
    return float((r.max() - r.min()) / r.mean())


def check_disjoint(loops, samples: int = 1024) -> None:
    for (i, a), (j, b) in itertools.combinations(enumerate(loops), 2):
        if np.any(a.contains(b.points(samples))) or np.any(b.contains(a.points(samples))):
            raise LoopError(f"loops {i} and {j} overlap")
        if a.distance_to(b, samples) <= 0:
            raise LoopError(f"loops {i} and {j} touch")


def default_triple(loops, margin: float = 0.05) -> tuple:
    """(0, 1, ∞) when 0 and 1 lie well inside the domain; otherwise ∞ plus the first two
    points of the form center_i + 1.25·r_max,i·e^{ikπ/4} (loops in order, k = 0..7) lying
    at distance >= margin·r_max,i from every loop."""
    scale = max(float(np.max(L.radius(np.linspace(0, 2 * np.pi, 256)))) for L in loops)

    def ok(z):
        for L in loops:
            if L.contains(np.array([z]))[0]:
                return False
            if np.min(np.abs(L.points(1024) - z)) < margin * scale:
                return False
        return True

    if ok(0j) and ok(1 + 0j):
        return (0j, 1 + 0j, complex(np.inf, 0))
    picks = []
    for L in loops:
        rmax = float(np.max(L.radius(np.linspace(0, 2 * np.pi, 256))))
        for k in range(8):
            z = L.center + 1.25 * rmax * np.exp(1j * k * np.pi / 4)
            if ok(z) and all(abs(z - p) > margin * scale for p in picks):
                picks.append(complex(z))
            if len(picks) == 2:
                return (picks[0], picks[1], complex(np.inf, 0))
    raise LoopError("could not place a normalization triple in the domain")


def _circles(clouds) -> list:
    return [GeneralizedCircle.circle(*lsq_circle(p)) for p in clouds]


def koebe_iterate(loops, tol: float = 1e-6, triple=None, samples: int = 512,
                  max_steps: int = 200, modes: int | None = None, fit_method: str = "auto",
                  raise_on_stagnation: bool = True) -> UniformizationResult:
    """Uniformize the complement of the closed regions bounded by ``loops`` onto a circle
    domain.

    Components are visited cyclically; a component whose circularity is already below
    ``tol`` is skipped.  Each step maps the exterior of the current component conformally
    onto the exterior of the unit circle, pushes every other component's 512-node sample
    cloud through the barycentric Cauchy integral, refits all clouds as Fourier loops, and
    renormalizes by the Möbius map restoring the triple.

    Refits use least squares up to 128 modes and the spline-FFT fit beyond
    (``fit_method`` "auto"); near-touching loops need clouds and modes growing like
    1/gap."""
    loops = list(loops)
    if not loops:
        raise LoopError("need at least one loop")
    check_disjoint(loops)
    triple = tuple(complex(z) for z in (triple if triple is not None else default_triple(loops)))
    for z in triple:
        if np.isfinite(z) and any(L.contains(np.array([z]))[0] for L in loops):
            raise LoopError(f"normalization point {z} lies inside a loop")
    clouds = [L.points(samples) for L in loops]
    original = [c.copy() for c in clouds]
    circ = [L.circularity() for L in loops]
    trace, cycle_trace, steps, fits = [max(circ)], [], [], [0.0] * len(loops)

    def result(status):
        if not steps:  # untouched input: report its circles exactly
            circles = [GeneralizedCircle.circle(L.center, float(L.cos_coeffs[0])) for L in loops]
        else:
            circles = _circles(clouds)
        return UniformizationResult(circles, trace, cycle_trace, steps,
                                    list(zip(original, clouds)), triple, status, list(fits))

    if max(circ) < tol:
        return result("converged")
    current = list(loops)
    fit_modes = modes or min(96, samples // 6)
    if fit_method == "auto":
        fit_method = "lsq" if fit_modes <= 128 else "spline"
    tracked = np.array(triple, dtype=complex)
    while len(steps) < max_steps:
        for i in range(len(loops)):
            if circ[i] < tol:
                continue
            rm = riemann_step(current[i], "exterior")
            for j in range(len(loops)):
                if j == i:
                    q = clouds[i] - current[i].center
                    t = np.angle(q)
                    clouds[i] = rm.boundary_image(t) * (np.abs(q) / current[i].radius(t))
                else:
                    clouds[j] = rm(clouds[j])
            tracked = rm(tracked)
            M = MoebiusMap.fixing(*tracked, targets=triple)
            clouds = [np.asarray(M(c), dtype=complex) for c in clouds]
            tracked = np.array(triple, dtype=complex)
            steps.append(KoebeStep(i, rm, M))
            for j in range(len(loops)):
                current[j], fits[j] = AnalyticLoop.fit(clouds[j], fit_modes, method=fit_method)
                circ[j] = _cloud_circularity(clouds[j])
            trace.append(max(circ))
            if max(circ) < tol:
                cycle_trace.append(max(circ))
                return result("converged")
            if len(steps) >= max_steps:
                break
        cycle_trace.append(max(circ))
        if len(cycle_trace) >= 4 and cycle_trace[-1] > 0.99 * cycle_trace[-4]:
            res = result("stagnated")
            if raise_on_stagnation:
                raise StagnationError(
                    f"residual {cycle_trace[-1]:.3e} fell by less than 1% over three cycles "
                    f"(trace {cycle_trace})", res)
            return res
    return result("max_steps")


__all__ = ["KoebeStep", "StagnationError", "UniformizationResult", "check_disjoint",
           "default_triple", "koebe_iterate"]
