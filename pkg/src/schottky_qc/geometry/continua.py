"""Sampled continua and the quantities defined by infima/suprema over them.

Every estimator here is exact over the samples; the gap to the continuum value is
bounded by the sampling resolution h (one-sided, as documented per function).
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .circles import Cap, DiskRegion, GeometryError
from .points import as_array, metric_fn, pairwise, project


@dataclass(frozen=True, eq=False)
class ContinuumSample:
    """Ordered point samples of an arc (``closed=False``) or a loop (``closed=True``)."""

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_1d(as_array(self.points)).ravel())

    @property
    def n(self) -> int:
        return self.points.size

    def resolution(self, metric: str = "spherical") -> float:
        """Largest spacing between consecutive samples."""
        p = self.points
        if p.size < 2:
            return 0.0
        nxt = np.roll(p, -1) if self.closed else p[1:]
        cur = p if self.closed else p[:-1]
        return float(np.max(metric_fn(metric)(cur, nxt)))

    def diameter(self, metric: str = "spherical") -> float:
        return float(pairwise(self.points, self.points, metric).max()) if self.n > 1 else 0.0

    def refine(self, h: float, metric: str = "spherical") -> "ContinuumSample":
        """Insert points (linearly in the chart) until consecutive spacing is at most h."""
        p = self.points
        nxt = np.roll(p, -1) if self.closed else p[1:]
        cur = p if self.closed else p[:-1]
        d = metric_fn(metric)(cur, nxt)
        out = []
        for a, b, dd in zip(cur, nxt, np.atleast_1d(d)):
            k = max(1, int(np.ceil(dd / h)))
            out.append(a + (b - a) * np.arange(k) / k)
        if not self.closed:
            out.append(p[-1:])
        return ContinuumSample(np.concatenate(out), self.closed)

    @classmethod
    def segment(cls, a, b, n: int = 64) -> "ContinuumSample":
        return cls(complex(a) + (complex(b) - complex(a)) * np.linspace(0, 1, n), False)

    @classmethod
    def circle(cls, center, radius, n: int = 128) -> "ContinuumSample":
        t = 2 * np.pi * np.arange(n) / n
        return cls(complex(center) + radius * np.exp(1j * t), True)


def _require_nondegenerate(*cs: ContinuumSample):
    for c in cs:
        if c.n < 2 or np.ptp(c.points.real) + np.ptp(c.points.imag) == 0:
            raise GeometryError("degenerate continuum: need at least two distinct points")


def relative_distance(E: ContinuumSample, F: ContinuumSample, metric: str = "spherical") -> float:
    """dist(E,F) / min(diam E, diam F).  Sample distances overestimate dist by at most h
    and diameters underestimate by at most h."""
    _require_nondegenerate(E, F)
    dist = pairwise(E.points, F.points, metric).min()
    return float(dist / min(E.diameter(metric), F.diameter(metric)))


def dcross_estimate(E: ContinuumSample, F: ContinuumSample, metric: str = "spherical") -> float:
    """inf over x1, x4 in E and x2, x3 in F of
    min{d(x1,x3), d(x2,x4)} / min{d(x1,x4), d(x2,x3)}, exact over the samples.

    The swap (x1,x2,x3,x4) -> (x4,x3,x2,x1) exchanges the two numerator terms, so the
    infimum equals inf d(x1,x3) / min{d(x1,x4), d(x2,x3)}; for fixed x1, x3 the best x4, x2
    are the farthest points, giving an O(|E||F|) formula with eccentricities.
    """
    _require_nondegenerate(E, F)
    dEF = pairwise(E.points, F.points, metric)
    eccE = pairwise(E.points, E.points, metric).max(axis=1)
    eccF = pairwise(F.points, F.points, metric).max(axis=1)
    return float(np.min(dEF / np.minimum(eccE[:, None], eccF[None, :])))


def dcross_bruteforce(E: ContinuumSample, F: ContinuumSample, metric: str = "spherical") -> float:
    """Direct quadruple search; O(|E|^2 |F|^2), for small test samples only."""
    dEF = pairwise(E.points, F.points, metric)
    dEE = pairwise(E.points, E.points, metric)
    dFF = pairwise(F.points, F.points, metric)
    # axes: x1 (E), x4 (E), x2 (F), x3 (F)
    num = np.minimum(dEF[:, None, None, :], dEF[None, :, :, None])
    den = np.minimum(dEE[:, :, None, None], dFF[None, None, :, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / den, np.inf)
    return float(r.min())


@numba.njit(cache=True)
def _arc_diameter_ratio(d: np.ndarray) -> tuple:
    n = d.shape[0]
    # diam[i, L] = diameter of the arc of L+1 consecutive samples starting at i (cyclically)
    best = 1.0
    bi, bj = 0, 0
    # arcs of length L: diam(i, i+L) = max(diam(i+1, i+L), diam(i, i+L-1), d(i, i+L))
    diam = np.zeros((n, n))
    for L in range(1, n):
        for i in range(n):
            j = (i + L) % n
            v = d[i, j]
            a = diam[(i + 1) % n, L - 1]
            b = diam[i, L - 1]
            if a > v:
                v = a
            if b > v:
                v = b
            diam[i, L] = v
    for i in range(n):
        for L in range(1, n):
            j = (i + L) % n
            if i > j:
                continue
            # the two complementary arcs joining samples i and j
            d1 = diam[i, L]
            d2 = diam[j, n - L]
            e = d1 if d1 < d2 else d2
            if d[i, j] > 0:
                r = e / d[i, j]
                if r > best:
                    best = r
                    bi, bj = i, j
    return best, bi, bj


@numba.njit(cache=True)
def _segments_cross(x: np.ndarray, y: np.ndarray) -> bool:
    n = x.shape[0]
    for i in range(n):
        i2 = (i + 1) % n
        for j in range(i + 2, n):
            j2 = (j + 1) % n
            if j2 == i:
                continue
            d1 = (x[j] - x[i]) * (y[i2] - y[i]) - (y[j] - y[i]) * (x[i2] - x[i])
            d2 = (x[j2] - x[i]) * (y[i2] - y[i]) - (y[j2] - y[i]) * (x[i2] - x[i])
            d3 = (x[i] - x[j]) * (y[j2] - y[j]) - (y[i] - y[j]) * (x[j2] - x[j])
            d4 = (x[i2] - x[j]) * (y[j2] - y[j]) - (y[i2] - y[j]) * (x[j2] - x[j])
            if d1 * d2 < 0 and d3 * d4 < 0:
                return True
    return False


def is_self_intersecting(J: ContinuumSample) -> bool:
    """Proper crossing test between non-adjacent polygon edges (chart coordinates)."""
    p = J.points
    return bool(_segments_cross(np.ascontiguousarray(p.real), np.ascontiguousarray(p.imag)))


def quasicircle_constant(J: ContinuumSample, metric: str = "spherical", return_pair: bool = False):
    """Smallest L with diam(E) <= L·d(x, y) over sampled pairs, where E is the
    smaller-diameter arc of J between x and y.  Always >= 1."""
    if not J.closed:
        raise GeometryError("quasicircle constant needs a closed loop sample")
    if J.n < 3:
        raise GeometryError("loop sample needs at least three points")
    if is_self_intersecting(J):
        raise GeometryError("self-intersecting loop sample")
    d = pairwise(J.points, J.points, metric)
    L, i, j = _arc_diameter_ratio(np.ascontiguousarray(d))
    return (float(L), (int(i), int(j))) if return_pair else float(L)


_GL_S, _GL_SW = np.polynomial.legendre.leggauss(24)


def cap_intersection_area(x_axis: np.ndarray, r: float, K: Cap) -> float:
    """Spherical area of B(x, r) ∩ K for a spherical ball and a cap.

    Polar coordinates about x: area = ∫_0^r sin(s)·φ(s) ds with φ(s) the angle of the
    circle of radius s about x that lies inside K; integrated piecewise by
    Gauss–Legendre between the radii where φ changes regime.
    """
    u = np.asarray(K.axis)
    delta = float(np.arccos(np.clip(np.dot(x_axis, u), -1, 1)))
    th = K.angular_radius
    cth = np.cos(th)

    def phi(s):
        ss, cs = np.sin(s), np.cos(s)
        num = cth - cs * np.cos(delta)
        den = ss * np.sin(delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(den > 1e-300, num / den, np.where(num <= 0, -np.inf, np.inf))
        return 2 * np.arccos(np.clip(q, -1, 1))

    knots = sorted({0.0, r, *[k for k in (abs(th - delta), th + delta, 2 * np.pi - th - delta)
                               if 0 < k < r]})
    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        s = (a + b) / 2 + (b - a) / 2 * _GL_S
        total += (b - a) / 2 * float(np.sum(_GL_SW * np.sin(s) * phi(s)))
    return total


@dataclass(frozen=True)
class FatnessResult:
    passed: bool
    worst_ratio: float
    worst_point: complex | None
    worst_radius: float | None
    trials: int


def fatness_test(K, tau: float, trials: int = 2000, seed: int = 0) -> FatnessResult:
    """Sample x in K and radii r with B(x, r) not containing K, and test
    Σ(B(x,r) ∩ K) >= τ r² (spherical measure and metric).

    K is a DiskRegion / Cap (area computed exactly) or a ContinuumSample (a sampled set of
    measure zero, so any admissible ball gives ratio 0; a single point admits no ball).
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    rng = np.random.default_rng(seed)
    if isinstance(K, ContinuumSample):
        pts = K.points
        diam = K.diameter() if K.n > 1 else 0.0
        if diam == 0:
            return FatnessResult(True, float("inf"), None, None, 0)
        # B(x, r) with r < diam/2 can never contain K; the sampled set has zero area
        x = complex(pts[rng.integers(pts.size)])
        return FatnessResult(False, 0.0, x, diam / 4, 1)
    cap = K.to_cap() if isinstance(K, DiskRegion) else K
    u = np.asarray(cap.axis)
    th = cap.angular_radius
    worst = (float("inf"), None, None)
    # orthonormal frame around the cap axis
    tmp = np.array([1.0, 0, 0]) if abs(u[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(u, tmp)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    for _ in range(trials):
        # uniform point of the cap: cos(dist to axis) uniform in [cos th, 1]
        cd = rng.uniform(np.cos(th), 1.0)
        sd = np.sqrt(max(0.0, 1 - cd * cd))
        ang = rng.uniform(0, 2 * np.pi)
        x = cd * u + sd * (np.cos(ang) * e1 + np.sin(ang) * e2)
        delta = float(np.arccos(np.clip(cd, -1, 1)))
        rmax = min(delta + th, np.pi)  # beyond this the ball contains K
        if rmax <= 0:
            continue
        # log-uniform radii cover small scales where fatness is tested locally
        r = float(np.exp(rng.uniform(np.log(rmax * 1e-4), np.log(rmax))))
        ratio = cap_intersection_area(x, r, cap) / r ** 2
        if ratio < worst[0]:
            worst = (ratio, complex(project(x)), r)
    return FatnessResult(bool(worst[0] >= tau), worst[0], worst[1], worst[2], trials)
