"""Distortion diagnostics for computed conformal maps: weak quasisymmetry constants,
separating-annulus profiles and modulus preservation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely

from ..geometry import ContinuumSample, DiskRegion, GeneralizedCircle, pairwise, relative_distance
from ..profile import EmpiricalProfile


@dataclass(frozen=True)
class QSReport:
    """H is the largest σ(x',y')/σ(x',z') over sampled triples with σ(x,y) <= σ(x,z)
    (at least 1, attained by y = z); ``triples`` counts the ordered triples examined."""

    H: float
    triples: int
    worst: tuple
    profile: EmpiricalProfile | None


def _weak_qs(src: np.ndarray, img: np.ndarray) -> tuple[float, tuple]:
    """Exact maximum over all triples of the samples: for each x, sort the others by
    distance; the best ratio pairs a running max of image distances (y) with the
    suffix min (z)."""
    D = pairwise(src, src, "spherical")
    Dp = pairwise(img, img, "spherical")
    best, arg = 1.0, (0, 0, 0)
    n = src.size
    for x in range(n):
        others = np.r_[np.arange(x), np.arange(x + 1, n)]
        order = others[np.argsort(D[x, others], kind="stable")]
        d = Dp[x, order]
        pre = np.maximum.accumulate(d)
        suf = np.minimum.accumulate(d[::-1])[::-1]
        with np.errstate(divide="ignore"):
            ratio = pre / suf
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            y = order[int(np.argmax(d[:k + 1]))]
            z = order[k + int(np.argmin(d[k:]))]
            best, arg = float(ratio[k]), (x, int(y), int(z))
    return best, arg


def separating_width(E: np.ndarray, F: np.ndarray, centers=None) -> float:
    """Largest spherical width log(R/r) of a round annulus about one of ``centers``
    (default: all sample points) with one set inside σ <= r and the other in σ >= R;
    0 when no candidate separates."""
    E, F = np.asarray(E, complex).ravel(), np.asarray(F, complex).ravel()
    C = np.r_[E, F] if centers is None else np.asarray(centers, complex).ravel()
    dE = pairwise(C, E, "spherical")
    dF = pairwise(C, F, "spherical")
    best = 0.0
    for inner, outer in ((dE, dF), (dF, dE)):
        r = inner.max(axis=1)
        R = outer.min(axis=1)
        ok = (R > r) & (r > 0)
        if ok.any():
            best = max(best, float(np.max(np.log(R[ok] / r[ok]))))
    return best


def weak_qs_check(source, image, continua=None, max_points: int = 2000,
                  seed: int = 0) -> QSReport:
    """Empirical weak-quasisymmetry constant of a map given as sample pairs.

    ``continua`` is an optional list of (E, F, E', F') sample arrays: continuum pairs and
    their images.  Their (relative distance, largest separating annulus width of the
    images) pairs are fitted by an increasing EmpiricalProfile θ̂."""
    src = np.asarray(source, complex).ravel()
    img = np.asarray(image, complex).ravel()
    if src.size != img.size:
        raise ValueError("source and image samples must pair up")
    keep = np.isfinite(src) & np.isfinite(img)
    src, img = src[keep], img[keep]
    if src.size > max_points:
        idx = np.sort(np.random.default_rng(seed).choice(src.size, max_points, replace=False))
        src, img = src[idx], img[idx]
    if src.size < 11:
        raise ValueError("need at least 1000 sample triples (11 points)")
    H, worst = _weak_qs(src, img)
    prof = None
    if continua:
        args, vals = [], []
        for E, F, Ei, Fi in continua:
            args.append(relative_distance(ContinuumSample(np.asarray(E), False),
                                          ContinuumSample(np.asarray(F), False)))
            vals.append(separating_width(Ei, Fi))
        prof = EmpiricalProfile(np.array(args), np.array(vals), "increasing", "upper")
    n = src.size
    return QSReport(H, n * (n - 1) * (n - 1), worst, prof)


def random_segments_in_domain(rng: np.random.Generator, inside_any, box, count: int,
                              length=(0.05, 0.4), n: int = 24) -> list[np.ndarray]:
    """Random straight segments in ``box`` avoiding the set where ``inside_any`` holds."""
    x0, x1, y0, y1 = box
    out = []
    for _ in range(50 * count):
        if len(out) >= count:
            break
        a = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        seg = a + rng.uniform(*length) * np.exp(1j * rng.uniform(0, 2 * np.pi)) * np.linspace(0, 1, n)
        if not np.any(inside_any(seg)):
            out.append(seg)
    return out


def _polygon(points: np.ndarray) -> shapely.Polygon:
    return shapely.Polygon(np.column_stack([points.real, points.imag]))


def annulus_modulus_check(result, center: complex, r_in: float, r_out: float, n: int = 256,
                          samples: int = 1024) -> dict:
    """Classical modulus of the round annulus A(center; r_in, r_out), which must lie in the
    domain, and of its image under the computed map, both on N×N grids."""
    from ..modulus import FamilySpec, GridSpec, PolygonShape, classical_modulus

    t = 2 * np.pi * np.arange(samples) / samples
    inner = center + r_in * np.exp(1j * t)
    outer = center + r_out * np.exp(1j * t)
    pad = 1.08
    g0 = GridSpec.uniform((center.real - pad * r_out, center.real + pad * r_out,
                           center.imag - pad * r_out, center.imag + pad * r_out), n)
    fam0 = FamilySpec.connecting(DiskRegion(GeneralizedCircle.circle(center, r_in), True),
                                 DiskRegion(GeneralizedCircle.circle(center, r_out), False))
    before = classical_modulus(g0, fam0).estimate
    im_in, im_out = result.map(inner), result.map(outer)
    if not (np.all(np.isfinite(im_in)) and np.all(np.isfinite(im_out))):
        raise ValueError("annulus boundary maps through ∞; choose a bounded annulus image")
    x0, x1 = im_out.real.min(), im_out.real.max()
    y0, y1 = im_out.imag.min(), im_out.imag.max()
    cx, cy, half = (x0 + x1) / 2, (y0 + y1) / 2, pad * max(x1 - x0, y1 - y0) / 2
    g1 = GridSpec.uniform((cx - half, cx + half, cy - half, cy + half), n)
    big = shapely.box(cx - 2 * half, cy - 2 * half, cx + 2 * half, cy + 2 * half)
    F = PolygonShape.from_geometry(big.difference(_polygon(im_out)))
    fam1 = FamilySpec.connecting(PolygonShape.from_geometry(_polygon(im_in)), F)
    after = classical_modulus(g1, fam1).estimate
    return {"exact": 2 * np.pi / np.log(r_out / r_in), "before": before, "after": after,
            "deviation": abs(after - before) / before}


__all__ = ["QSReport", "annulus_modulus_check", "random_segments_in_domain", "separating_width",
           "weak_qs_check"]
