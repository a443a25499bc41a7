"""End-to-end uniformization of disk or loop configurations, and the stage sweep for
tangent disks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..bilipschitz import exhaust_tangent_disks, find_tangencies
from .distortion import QSReport, random_segments_in_domain, weak_qs_check
from .iterate import UniformizationResult, koebe_iterate
from .loops import AnalyticLoop

DEFAULT_STAGES = tuple(range(3, 9))


@dataclass(eq=False)
class PipelineResult:
    result: UniformizationResult
    loops: list
    stage: int | None
    fit_residuals: list
    exhaustion: dict = field(default_factory=dict)
    qs: QSReport | None = None

    @property
    def circles(self):
        return self.result.circles


def _region_loop(region, samples: int, modes: int) -> tuple[AnalyticLoop, float]:
    """Fourier fit of a truncated disk's boundary, ordered by polar angle about its center."""
    b = region.boundary(samples)
    b = b[np.argsort(np.angle(b - region.center), kind="stable")]
    return AnalyticLoop.fit(b, modes, center=region.center)


def configuration_loops(cfg, stage: int | None = None, samples: int = 4096, modes: int = 24):
    """AnalyticLoops for a configuration: AnalyticLoop entries pass through; disks given as
    (center, radius) become circles, or, when some of them touch, the Fourier fits of the
    stage-n exhaustion regions.  The fit keeps few modes on purpose: it rounds the chord
    corners into an analytic loop whose spectrum the Koebe refits can follow.  Returns
    (loops, fit residuals, exhaustion metadata)."""
    cfg = list(cfg)
    if all(isinstance(c, AnalyticLoop) for c in cfg):
        return cfg, [0.0] * len(cfg), {}
    disks = [(complex(c), float(r)) for c, r in cfg]
    if not find_tangencies(disks):
        return [AnalyticLoop.circle(c, r) for c, r in disks], [0.0] * len(disks), {}
    if stage is None:
        raise ValueError("tangent disks need an exhaustion stage")
    st = exhaust_tangent_disks(disks, stage)
    fits = [_region_loop(R, samples, modes) for R in st.regions]
    meta = {"stage": stage,
            "hausdorff": [R.hausdorff_to_disk() for R in st.regions],
            "gaps": {f"{t.i}-{t.j}": st.gap(t.i, t.j) for t in st.tangencies}}
    return [f[0] for f in fits], [f[1] for f in fits], meta


def domain_samples(loops, rng: np.random.Generator, count: int = 600,
                   boundary: int = 64):
    """Random points of the domain in a box around the loops, plus ``boundary`` samples
    per loop just off each loop."""
    pts = np.concatenate([L.points(256) for L in loops])
    x0, x1, y0, y1 = pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max()
    pad = 0.25 * max(x1 - x0, y1 - y0)
    box = (x0 - pad, x1 + pad, y0 - pad, y1 + pad)
    z = rng.uniform(box[0], box[1], 4 * count) + 1j * rng.uniform(box[2], box[3], 4 * count)
    inside = np.zeros(z.size, bool)
    for L in loops:
        inside |= L.contains(z)
    z = z[~inside][:count]
    # boundary samples pulled slightly into the domain
    bd = np.concatenate([L.center + 1.001 * (L.points(boundary) - L.center) for L in loops])
    return np.r_[z, bd], box


def uniformize_configuration(cfg, stage: int | None = None, tol: float = 1e-6, seed: int = 0,
                             qs_points: int = 600, continua: int = 40,
                             **koebe_kw) -> PipelineResult:
    """Exhaust (if tangent) → fit loops → Koebe iteration → weak quasisymmetry check."""
    loops, fits, meta = configuration_loops(cfg, stage)
    if meta:  # near-touching loops need finer clouds
        koebe_kw.setdefault("samples", 1024)
        koebe_kw.setdefault("modes", 128)
    res = koebe_iterate(loops, tol=tol, **koebe_kw)
    rng = np.random.default_rng(seed)
    src, box = domain_samples(loops, rng, qs_points)

    def inside_any(z):
        out = np.zeros(np.shape(z), bool)
        for L in loops:
            out |= L.contains(z)
        return out

    segs = random_segments_in_domain(rng, inside_any, box, 2 * continua)
    pairs = [(E, F, res.map(E), res.map(F)) for E, F in zip(segs[0::2], segs[1::2])]
    qs = weak_qs_check(src, res.map(src), pairs)
    return PipelineResult(res, loops, stage, fits, meta, qs)


def stage_sweep(disks, stages=DEFAULT_STAGES, tol: float = 1e-6, **kw) -> dict:
    """Uniformize tangent disks at each stage; report the output circles, their mutual gaps
    and the Hausdorff-type distance between successive outputs (max over circles of
    |Δcenter| + |Δradius|)."""
    outs = [uniformize_configuration(disks, n, tol, **kw) for n in stages]
    gaps = [o.result.min_gap() for o in outs]
    moves = []
    for a, b in zip(outs, outs[1:]):
        moves.append(max(abs(c1.center - c2.center) + abs(c1.radius - c2.radius)
                         for c1, c2 in zip(a.circles, b.circles)))
    return {"stages": list(stages), "results": outs, "gaps": gaps, "successive": moves}


__all__ = ["DEFAULT_STAGES", "PipelineResult", "configuration_loops", "domain_samples",
           "stage_sweep", "uniformize_configuration"]
