"""Annulus widths, relative widths, subannulus selection and randomized searches for the
universal width-bound constants.

Relative widths only depend on the set of distances from the annulus center to K ∩ A.
For a connected K that set is an interval, so every width reduces to a distance
interval [lo, hi] intersected with [r, R].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .geometry import (Cap, ContinuumSample, DiskRegion, GeneralizedCircle, GeometryError,
                       MoebiusMap, as_array, euclidean_dist, lift, map_disk, project,
                       region_gap, spherical_dist)
from .geometry.points import is_inf


class PreconditionError(ValueError):
    """A named hypothesis of an operation does not hold."""


@dataclass(frozen=True)
class Annulus:
    """Closed annulus {r <= d(center, z) <= R} for the Euclidean chart metric or the
    spherical metric."""

    center: complex
    r: float
    R: float
    metric: str = "euclidean"

    def __post_init__(self):
        c = complex(as_array(self.center))
        object.__setattr__(self, "center", c)
        if self.metric not in ("euclidean", "spherical"):
            raise ValueError(f"unknown annulus metric {self.metric!r}")
        if not (0 < self.r < self.R):
            raise ValueError("annulus needs 0 < r < R")
        if self.metric == "spherical" and not self.R < np.pi:
            raise ValueError("spherical annulus needs R < pi")
        if self.metric == "euclidean" and (np.isinf(c.real) or np.isinf(c.imag)):
            raise ValueError("Euclidean annulus needs a finite center")

    @property
    def width(self) -> float:
        return float(np.log(self.R / self.r))

    def dist(self, z):
        if self.metric == "euclidean":
            return euclidean_dist(self.center, z)
        return spherical_dist(self.center, z)

    def contains(self, z) -> np.ndarray:
        d = self.dist(z)
        return (d >= self.r) & (d <= self.R)

    def sub(self, r: float, R: float) -> "Annulus":
        return Annulus(self.center, r, R, self.metric)

    def boundary_points(self, radius: float, n: int = 256) -> np.ndarray:
        """Points on the boundary circle {d(center, z) = radius}."""
        t = 2 * np.pi * np.arange(n) / n
        if self.metric == "euclidean":
            return self.center + radius * np.exp(1j * t)
        # circle of angular radius `radius` around the lifted center
        u = lift(self.center)
        tmp = np.array([1.0, 0, 0]) if abs(u[0]) < 0.9 else np.array([0, 1.0, 0])
        e1 = np.cross(u, tmp)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(u, e1)
        X = (np.cos(radius) * u[None, :]
             + np.sin(radius) * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2))
        return project(X)


def width(A: Annulus) -> float:
    return A.width


@dataclass(frozen=True)
class RelativeWidthReport:
    r_A: float
    R_A: float
    w: float
    meets: bool


def distance_interval(A: Annulus, K) -> tuple[float, float]:
    """[inf, sup] of the distance from A's center over the closed connected set K."""
    x = A.center
    if isinstance(K, DiskRegion):
        if A.metric == "spherical":
            cap = Cap.from_region(K)
            u = lift(x)
            delta = float(np.arctan2(np.linalg.norm(np.cross(u, cap.axis)), np.dot(u, cap.axis)))
            return max(delta - cap.theta, 0.0), min(delta + cap.theta, np.pi)
        b = K.boundary
        if b.kind == "circle":
            d = abs(b.center - x)
            if K.inside:
                return max(d - b.radius, 0.0), d + b.radius
            return max(b.radius - d, 0.0), np.inf
        s = (np.conj(b.normal) * x).real - b.offset
        s = s if K.inside else -s
        return max(s, 0.0), np.inf
    if isinstance(K, ContinuumSample):
        p = K.points
        if A.metric == "spherical" or p.size == 1:
            d = np.atleast_1d(A.dist(p))
            return float(d.min()), float(d.max())
        return _polyline_interval(p - x, K.closed)
    pts = np.atleast_1d(as_array(K))
    d = np.atleast_1d(A.dist(pts))
    return float(d.min()), float(d.max())


def _polyline_interval(p: np.ndarray, closed: bool) -> tuple[float, float]:
    a = p if closed else p[:-1]
    b = np.roll(p, -1) if closed else p[1:]
    if a.size == 0:
        d = abs(p[0])
        return d, d
    ab = b - a
    L2 = np.abs(ab) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(np.where(L2 > 0, -(np.conj(ab) * a).real / L2, 0.0), 0, 1)
    lo = float(np.min(np.abs(a + t * ab)))
    hi = float(np.max(np.abs(p)))
    return lo, hi


def relative_width(A: Annulus, K) -> RelativeWidthReport:
    """r_A(K), R_A(K) (inf / sup of the distance over K ∩ A) and w_A(K) = log(R_A/r_A);
    zero width when K misses A."""
    lo, hi = distance_interval(A, K)
    rA, RA = max(lo, A.r), min(hi, A.R)
    if rA > RA:
        return RelativeWidthReport(float("nan"), float("nan"), 0.0, False)
    return RelativeWidthReport(rA, RA, float(np.log(RA / rA)), True)


def meets_both_boundaries(A: Annulus, K) -> bool:
    lo, hi = distance_interval(A, K)
    return lo <= A.r and hi >= A.R


# ---------------------------------------------------------------------------------------
# subannulus selection


@dataclass(frozen=True)
class SubannulusResult:
    annulus: Annulus
    alternative: str  # "one-small" | "two-spanning"
    indices: tuple[int, ...]  # the exception (one-small) or the spanning pair
    stage: int


def _argmax_width(A: Annulus, Ks, skip=()) -> tuple[int | None, float]:
    best, bw = None, -np.inf
    for i, K in enumerate(Ks):
        if i in skip:
            continue
        w = relative_width(A, K).w
        if w > bw:  # strict: smallest index wins ties
            best, bw = i, w
    return best, bw


def subannulus_select(A: Annulus, Ks) -> SubannulusResult:
    """Three-stage selection: keep A when every set is thin (w_A(K) <= w_A^{1/3}); otherwise
    shrink to the annulus spanned by a widest set, then possibly once more around a second
    widest set, which yields two sets crossing the final annulus."""
    Ks = list(Ks)
    w0 = A.width
    i1, wi1 = _argmax_width(A, Ks)
    if i1 is None or wi1 <= w0 ** (1 / 3):
        return SubannulusResult(A, "one-small", (), 0)
    rep = relative_width(A, Ks[i1])
    A1 = A.sub(rep.r_A, rep.R_A)
    w1 = A1.width
    i2, wi2 = _argmax_width(A1, Ks, skip=(i1,))
    if i2 is None or wi2 <= w1 ** (1 / 3):
        return SubannulusResult(A1, "one-small", (i1,), 1)
    rep2 = relative_width(A1, Ks[i2])
    A2 = A1.sub(rep2.r_A, rep2.R_A)
    return SubannulusResult(A2, "two-spanning", (i1, i2), 2)


def _dense_points(K, n: int = 2048) -> np.ndarray:
    """Boundary-and-interior point samples of K for sampling-based re-verification."""
    if isinstance(K, ContinuumSample):
        p = K.points
        if p.size < 2:
            return p
        nxt = np.roll(p, -1) if K.closed else p[1:]
        cur = p if K.closed else p[:-1]
        t = np.linspace(0, 1, 17)[:-1]
        return np.concatenate([(cur[:, None] + (nxt - cur)[:, None] * t).ravel(), p])
    if isinstance(K, DiskRegion):
        b = K.boundary
        return b.sample(n)
    return np.atleast_1d(as_array(K))


def _meets_circle(A: Annulus, K, rad: float, tol: float) -> bool:
    """Whether K meets {d(center, z) = rad}: circle/line intersection geometry for Euclidean
    disk regions, sign changes of d - rad over dense samples otherwise."""
    scale = tol * max(1.0, rad)
    inner = A.boundary_points(rad, 64)
    if isinstance(K, DiskRegion):
        if np.any(K.contains(inner, tol=1e-12)):
            return True
        if A.metric == "euclidean":
            b = K.boundary
            if b.kind == "circle":
                d = abs(b.center - A.center)
                return abs(d - b.radius) <= rad + scale and rad <= d + b.radius + scale
            return abs((np.conj(b.normal) * A.center).real - b.offset) <= rad + scale
    if isinstance(K, ContinuumSample) and A.metric == "euclidean" and K.points.size > 1:
        # exact per segment: the distance to the center is convex along a segment, so a
        # segment meets the circle iff its nearest point is inside and an endpoint outside
        p = K.points - A.center
        a, b = (p, np.roll(p, -1)) if K.closed else (p[:-1], p[1:])
        ab = b - a
        L2 = np.maximum(np.abs(ab) ** 2, 1e-300)
        t = np.clip(-(np.conj(ab) * a).real / L2, 0.0, 1.0)
        near = np.abs(a + t * ab)
        far = np.maximum(np.abs(a), np.abs(b))
        return bool(np.any((near <= rad + scale) & (far >= rad - scale)))
    pts = _dense_points(K)
    d = np.atleast_1d(A.dist(pts))
    h = 0.0
    if isinstance(K, DiskRegion):
        h = float(np.max(np.abs(np.diff(d))))  # sample spacing bounds the sampling error
    return bool(d.min() <= rad + scale + h and d.max() >= rad - scale - h)


def verify_subannulus(A: Annulus, Ks, res: SubannulusResult, tol: float = 1e-9) -> tuple[bool, str]:
    """Re-check the selection's postconditions without reusing its construction: widths
    from the returned annulus alone, and boundary crossings by sign changes of
    d(center, ·) - radius along sampled boundaries / polylines."""
    Ap = res.annulus
    if Ap.metric != A.metric or Ap.center != A.center:
        return False, "not concentric"
    if Ap.r < A.r * (1 - tol) or Ap.R > A.R * (1 + tol):
        return False, "not a subannulus"
    w = A.width
    if Ap.width < min(w, w ** (1 / 9)) - tol:
        return False, f"width {Ap.width} below bound {min(w, w ** (1 / 9))}"
    if res.alternative == "one-small":
        bad = [i for i, K in enumerate(Ks) if relative_width(Ap, K).w > Ap.width ** (1 / 3) + tol]
        if len(bad) > 1:
            return False, f"alternative (i) fails for indices {bad}"
        return True, "ok"
    if res.alternative == "two-spanning":
        i1, i2 = res.indices
        if i1 == i2:
            return False, "spanning indices not distinct"
        for i in (i1, i2):
            for rad in (Ap.r, Ap.R):
                if not _meets_circle(Ap, Ks[i], rad, tol):
                    return False, f"set {i} misses the circle of radius {rad}"
        return True, "ok"
    return False, f"unknown alternative {res.alternative!r}"


# ---------------------------------------------------------------------------------------
# empirical constants


@dataclass(frozen=True)
class EmpiricalConstant:
    name: str
    value: float
    trials: int
    seed: int
    strata: dict = field(default_factory=dict)  # w_A -> per-stratum maximum
    argmax: dict = field(default_factory=dict)  # description of the maximizing trial

    def slope_vs_log_width(self) -> float:
        """Least-squares slope of the per-stratum maxima against log w_A."""
        if len(self.strata) < 2:
            return 0.0
        ws = np.array(sorted(self.strata))
        ms = np.array([self.strata[w] for w in ws])
        return float(np.polyfit(np.log(ws), ms, 1)[0])


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial)])


# Obstacles in the Euclidean chart are bounded disks (kind 0: center p, radius s) or
# closed half-planes (kind 1: {Re(conj(p) z) <= s}, |p| = 1).


def _eu_dist_to(c: np.ndarray, kind: np.ndarray, p: np.ndarray, s: np.ndarray) -> np.ndarray:
    disk = np.abs(c - p) - s
    hp = (np.conj(p) * c).real - s
    return np.where(kind == 0, disk, hp)


def _eu_best_width(centers: np.ndarray, obst, r: np.ndarray, R: np.ndarray) -> np.ndarray:
    """w_A(D) for the largest disk D centered at each candidate that avoids the obstacles.

    centers: (T, M); obst: tuple of (T, k) arrays; r, R: (T,)."""
    kind, p, s = obst
    d = _eu_dist_to(centers[:, :, None], kind[:, None, :], p[:, None, :], s[:, None, :])
    rad = np.maximum(d.min(axis=2), 0.0)
    m = np.abs(centers)
    lo = np.maximum(np.maximum(m - rad, 0.0), r[:, None])
    hi = np.minimum(m + rad, R[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where((hi > lo) & (rad > 0), np.log(hi / lo), 0.0)
    return w


def _sph_best_width(V: np.ndarray, axes: np.ndarray, thetas: np.ndarray, r, R) -> np.ndarray:
    """Spherical analogue: annulus centered at the south pole (chart 0); V (T, M, 3)."""
    cr = np.linalg.norm(np.cross(V[:, :, None, :], axes[:, None, :, :]), axis=-1)
    dt = np.einsum("tmi,tki->tmk", V, axes)
    ang = np.arctan2(cr, dt)
    rad = np.maximum((ang - thetas[:, None, :]).min(axis=2), 0.0)
    delta = np.arctan2(np.linalg.norm(V[..., :2], axis=-1), -V[..., 2])
    lo = np.maximum(np.maximum(delta - rad, 0.0), r[:, None])
    hi = np.minimum(np.minimum(delta + rad, np.pi), R[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where((hi > lo) & (rad > 0), np.log(hi / lo), 0.0)


def _maximize_centers(evaluate, init: np.ndarray, iters: int = 40, top: int = 3):
    """Vectorised compass search in log-polar coordinates (log-modulus, angle) of the
    D-center, started from the best ``top`` of the initial candidates per trial.

    init: (T, M, 2) log-polar coordinates.  Returns (best value, best coordinates)."""
    vals = evaluate(init)
    order = np.argsort(-vals, axis=1)[:, :top]
    x = np.take_along_axis(init, order[:, :, None], axis=1)
    f = np.take_along_axis(vals, order, axis=1)
    step = np.full(f.shape, 0.5)
    dirs = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [0.7, 0.7], [-0.7, 0.7], [0.7, -0.7],
                     [-0.7, -0.7]])
    for _ in range(iters):
        cand = x[:, :, None, :] + step[:, :, None, None] * dirs[None, None, :, :]
        T, K, D, _ = cand.shape
        cv = evaluate(cand.reshape(T, K * D, 2)).reshape(T, K, D)
        j = np.argmax(cv, axis=2)
        cbest = np.take_along_axis(cv, j[:, :, None], axis=2)[:, :, 0]
        better = cbest > f
        x = np.where(better[:, :, None],
                     np.take_along_axis(cand, j[:, :, None, None], axis=2)[:, :, 0, :], x)
        f = np.where(better, cbest, f)
        step = np.where(better, step, step * 0.5)
    k = np.argmax(f, axis=1)
    return f[np.arange(f.shape[0]), k], x[np.arange(f.shape[0]), k]


def _initial_logpolar(rngs, r: np.ndarray, R: np.ndarray, M: int) -> np.ndarray:
    out = np.empty((len(rngs), M, 2))
    for t, g in enumerate(rngs):
        out[t, :, 0] = g.uniform(np.log(r[t]) - 1.0, np.log(R[t]) + 1.0, M)
        out[t, :, 1] = g.uniform(0, 2 * np.pi, M)
    return out


def _sample_big_disk(g: np.random.Generator, r: float, R: float, alpha: float, phi: float):
    """A closed disk of diameter >= R/alpha within distance alpha·r of 0 (or a half-plane),
    lying in the direction phi from 0."""
    u = np.exp(1j * phi)
    if g.uniform() < 0.15:
        return 1, -u, alpha * r * g.uniform(-1, 1)  # {Re(conj(-u) z) <= s}
    rho = R / (2 * alpha) * np.exp(g.uniform(0, np.log(20)))
    d = max(rho + alpha * r * g.uniform(-1, 1), 0.0)
    return 0, d * u, rho


def _obstacle_scale(o) -> float:
    return o[2] if o[0] == 0 else np.inf


def _sample_pair(g, sampler, near: float, max_tries: int = 10_000):
    """Two disjoint obstacles from ``sampler(phi)``.  Both pass within ``near`` of 0, so
    disjoint pairs sit on nearly opposite sides; the second direction is the first plus pi
    with a jitter on the scale sqrt(near / radius) where disjointness is possible."""
    for _ in range(max_tries):
        phi = g.uniform(0, 2 * np.pi)
        o1 = sampler(phi)
        jit = 4 * np.sqrt(near / min(_obstacle_scale(o1), 1e300)) if near > 0 else np.pi
        o2 = sampler(phi + np.pi + g.uniform(-1, 1) * min(np.pi, jit + 1e-3))
        if _eu_disjoint(o1, o2):
            return o1, o2
    raise PreconditionError("could not sample a disjoint obstacle pair")


def _eu_disjoint(o1, o2) -> bool:
    k1, p1, s1 = o1
    k2, p2, s2 = o2
    if k1 == 0 and k2 == 0:
        return abs(p1 - p2) > s1 + s2
    if k1 == 1 and k2 == 1:
        # two half-planes are disjoint only if parallel and facing away
        return abs(p1 + p2) < 1e-12 and s1 + s2 < 0
    (kd, pd, sd), (kh, ph, sh) = (o1, o2) if k1 == 0 else (o2, o1)
    return (np.conj(ph) * pd).real - sh > sd


def _strata_widths(strata, trials):
    ws = [float(w) for w in strata]
    return ws, [trials] * len(ws)


def big_disk_bound_search(alpha: float = 1.0, trials: int = 10_000, seed: int = 0,
                          strata=(2.0, 5.0, 10.0), drop_second: bool = False,
                          candidates: int = 48) -> EmpiricalConstant:
    """Randomized maximization of w_A(D) over A = A^e(0; r, 1), disjoint big disks K1, K2
    (diam >= R/alpha, dist(K_i, 0) <= alpha r) and disks D avoiding K1 ∪ K2.

    For a fixed center the largest admissible D is the widest, so the search runs over
    D-centers only.  ``drop_second`` removes K2 (control showing the hypothesis matters)."""
    if alpha < 1:
        raise PreconditionError("alpha must be >= 1")
    per = {}
    best_all, arg = -np.inf, {}
    for si, wA in enumerate(strata):
        R = 1.0
        r = float(np.exp(-wA))
        rngs = [_trial_rng(seed, si * 1_000_003 + t) for t in range(trials)]
        kinds, ps, ss = (np.zeros((trials, 2), int), np.zeros((trials, 2), complex),
                         np.zeros((trials, 2)))
        for t, g in enumerate(rngs):
            if drop_second:
                # the second obstacle is a far-away tiny disk that never blocks anything
                o1 = _sample_big_disk(g, r, R, alpha, g.uniform(0, 2 * np.pi))
                o2 = (0, 1e9 + 0j, 1e-9)
            else:
                o1, o2 = _sample_pair(g, lambda ph: _sample_big_disk(g, r, R, alpha, ph), alpha * r)
            kinds[t], ps[t], ss[t] = (o1[0], o2[0]), (o1[1], o2[1]), (o1[2], o2[2])
        rr, RR = np.full(trials, r), np.full(trials, R)

        def ev(lp):
            c = np.exp(lp[..., 0] + 1j * lp[..., 1])
            return _eu_best_width(c, (kinds, ps, ss), rr, RR)

        vals, xs = _maximize_centers(ev, _initial_logpolar(rngs, rr, RR, candidates))
        t = int(np.argmax(vals))
        per[wA] = float(vals[t])
        if vals[t] > best_all:
            best_all = float(vals[t])
            arg = {"w_A": wA, "trial": t, "K": [(int(kinds[t, j]), complex(ps[t, j]), float(ss[t, j]))
                                               for j in range(2)],
                   "D_center": complex(np.exp(xs[t, 0] + 1j * xs[t, 1]))}
    name = "C(alpha)" if not drop_second else "C(alpha) single-disk control"
    return EmpiricalConstant(name, best_all, trials, seed, per, arg)


def _sample_spanning_eu(g, r, R, phi):
    """Disk or half-plane in direction phi meeting both circles |z| = r and |z| = R
    without containing the inner disk."""
    u = np.exp(1j * phi)
    if g.uniform() < 0.2:
        return 1, -u, r * g.uniform(-1, 1)
    s = g.uniform(-1, 1)
    d = (R - r * s) / 2 * np.exp(g.uniform(0, np.log(8)))
    return 0, d * u, d + r * s


def _eu_to_region(o) -> DiskRegion:
    k, p, s = o
    if k == 0:
        return DiskRegion.disk(p, s)
    return DiskRegion(GeneralizedCircle.line(p, s), True)


def _region_to_eu(D: DiskRegion):
    b = D.boundary
    if b.kind == "circle":
        if not D.inside:
            raise GeometryError("unbounded disk exterior not supported by the Euclidean search")
        return 0, b.center, b.radius
    n, t = (b.normal, b.offset) if D.inside else (-b.normal, -b.offset)
    return 1, n, t


def reflected_pair_bound_search(trials: int = 10_000, seed: int = 0, metric: str = "euclidean",
                                strata=(2.0, 5.0, 10.0), candidates: int = 48) -> EmpiricalConstant:
    """Randomized maximization of w_A(D) where K, L are disjoint closed disks meeting both
    boundary circles of A, L' is the reflection of L across ∂K, and D avoids L ∪ L'.

    ``metric="euclidean"`` estimates alpha_0 on A^e(0; r, 1); ``"spherical"`` estimates
    beta_0 on A(0; r, R) with R <= 3."""
    per, best_all, arg = {}, -np.inf, {}
    for si, wA in enumerate(strata):
        rngs = [_trial_rng(seed, si * 1_000_003 + t) for t in range(trials)]
        if metric == "euclidean":
            R = 1.0
        r_arr, R_arr = np.empty(trials), np.empty(trials)
        obst_eu = (np.zeros((trials, 2), int), np.zeros((trials, 2), complex), np.zeros((trials, 2)))
        axes, thetas = np.zeros((trials, 2, 3)), np.zeros((trials, 2))
        for t, g in enumerate(rngs):
            if metric == "euclidean":
                r = R * np.exp(-wA)
                oK, oL = _sample_pair(g, lambda ph: _sample_spanning_eu(g, r, R, ph), r)
                K, L = _eu_to_region(oK), _eu_to_region(oL)
                Lp = map_disk(MoebiusMap.reflection(K.boundary), L)
                oLp = _region_to_eu(Lp)
                for j, o in enumerate((oL, oLp)):
                    obst_eu[0][t, j], obst_eu[1][t, j], obst_eu[2][t, j] = o
            else:
                Rs = g.uniform(0.5, 3.0)
                r = Rs * np.exp(-wA)
                K, L = _sample_spanning_pair_sph(g, r, Rs)
                Lp = map_disk(MoebiusMap.reflection(K.boundary), L)
                for j, reg in enumerate((L, Lp)):
                    cap = Cap.from_region(reg)
                    axes[t, j], thetas[t, j] = cap.axis, cap.theta
                R = Rs
            r_arr[t], R_arr[t] = r, R
        if metric == "euclidean":
            def ev(lp):
                c = np.exp(lp[..., 0] + 1j * lp[..., 1])
                return _eu_best_width(c, obst_eu, r_arr, R_arr)
        else:
            def ev(lp):
                return _sph_best_width(_sph_from_logpolar(lp), axes, thetas, r_arr, R_arr)
        init = _initial_logpolar(rngs, r_arr, np.minimum(R_arr, np.pi / np.e), candidates)
        vals, xs = _maximize_centers(ev, init)
        t = int(np.argmax(vals))
        per[wA] = float(vals[t])
        if vals[t] > best_all:
            best_all = float(vals[t])
            arg = {"w_A": wA, "trial": t, "r": float(r_arr[t]), "R": float(R_arr[t])}
    name = "alpha_0" if metric == "euclidean" else "beta_0"
    return EmpiricalConstant(name, best_all, trials, seed, per, arg)


def _sph_from_logpolar(lp: np.ndarray) -> np.ndarray:
    """Points at angular distance exp(l) (clipped below pi) from the south pole."""
    delta = np.minimum(np.exp(lp[..., 0]), np.pi * (1 - 1e-12))
    phi = lp[..., 1]
    return np.stack([np.sin(delta) * np.cos(phi), np.sin(delta) * np.sin(phi), -np.cos(delta)],
                    axis=-1)


def _cap_region(delta: float, theta: float, phi: float) -> DiskRegion:
    axis = np.array([np.sin(delta) * np.cos(phi), np.sin(delta) * np.sin(phi), -np.cos(delta)])
    return Cap(tuple(axis), theta).to_region()


def _sample_spanning_pair_sph(g: np.random.Generator, r: float, R: float):
    """Two disjoint caps each meeting both circles of the spherical annulus A(0; r, R);
    azimuths are nearly opposite as in :func:`_sample_pair`."""
    for _ in range(10_000):
        caps = []
        phi = g.uniform(0, 2 * np.pi)
        for k in range(2):
            s = g.uniform(-1, 1)
            lo = (R - r * s) / 2
            delta = g.uniform(lo, min(np.pi - 1e-3, lo + g.uniform(0, np.pi)))
            theta = delta + r * s
            if not (0 < theta < np.pi):
                break
            if k == 1:
                jit = 4 * np.sqrt(r / min(caps[0][1], theta))
                phi = phi + np.pi + g.uniform(-1, 1) * min(np.pi, jit + 1e-3)
            caps.append((delta, theta, phi))
        if len(caps) < 2:
            continue
        (d1, t1, p1), (d2, t2, p2) = caps
        # angle between the axes by the spherical law of cosines about the south pole
        cosang = np.cos(d1) * np.cos(d2) + np.sin(d1) * np.sin(d2) * np.cos(p1 - p2)
        if np.arccos(np.clip(cosang, -1, 1)) - t1 - t2 > 1e-12:
            K, L = (_cap_region(*c) for c in caps)
            if region_gap(K, L) > 0:
                return K, L
    raise PreconditionError("could not sample a disjoint spanning pair")


def orbit_width_check(A: Annulus, K1: DiskRegion, K2: DiskRegion, D: DiskRegion, depth: int,
                      check: bool = True) -> dict:
    """max over reduced words φ of length <= depth of w_A(φ(D)) in the Schottky group of
    {K1, K2}; also reports per-depth maxima and the maximizing word."""
    from .schottky import SchottkyConfig, enumerate_words, word_map

    if check:
        if region_gap(K1, K2) <= 0:
            raise PreconditionError("K1, K2 must have disjoint closures")
        for name, K in (("K1", K1), ("K2", K2)):
            if not meets_both_boundaries(A, K):
                raise PreconditionError(f"{name} must meet both boundary circles of A")
        if region_gap(D, K1) <= 0 or region_gap(D, K2) <= 0:
            raise PreconditionError("D must lie in the complement of K1 ∪ K2")
    cfg = SchottkyConfig((K1, K2))
    per_depth, best, best_word = [], -np.inf, ()
    for n in range(depth + 1):
        m_n = -np.inf
        for w in enumerate_words(2, n):
            img = map_disk(word_map(cfg, w), D)
            v = relative_width(A, img).w
            if v > m_n:
                m_n = v
            if v > best:
                best, best_word = v, w.letters
        per_depth.append(float(m_n))
    return {"max": float(best), "per_depth": per_depth, "word": list(best_word)}


def random_orbit_config(g: np.random.Generator, wA: float):
    """Spherical annulus with a spanning pair K1, K2 and a widest-at-random-center disk D
    in their complement, for orbit searches."""
    for _ in range(100):
        Rs = g.uniform(0.5, 3.0)
        r = Rs * np.exp(-wA)
        A = Annulus(0j, r, Rs, "spherical")
        K1, K2 = _sample_spanning_pair_sph(g, r, Rs)
        c1, c2 = Cap.from_region(K1), Cap.from_region(K2)
        axes = np.array([c1.axis, c2.axis])
        lp = np.stack([g.uniform(np.log(r) - 1, np.log(Rs) + 0.5, 256),
                       g.uniform(0, 2 * np.pi, 256)], axis=-1)
        V = _sph_from_logpolar(lp)
        ang = np.arctan2(np.linalg.norm(np.cross(V[:, None, :], axes[None]), axis=-1), V @ axes.T)
        rad = (ang - np.array([c1.theta, c2.theta])).min(axis=1) * 0.999
        ok = np.flatnonzero(rad > 1e-9)
        if ok.size:
            j = ok[0]
            return A, K1, K2, Cap(tuple(V[j]), rad[j]).to_region()
    raise PreconditionError("failed to place D in the complement")


def orbit_bound_search(trials: int = 10_000, seed: int = 0, strata=(2.0, 5.0, 10.0),
                       depth: int = 4) -> EmpiricalConstant:
    """Stratified maxima of orbit_width_check over random spanning configurations, using
    a vectorised cap-image computation (three boundary points plus an interior point)."""
    from .schottky import enumerate_words

    words = [w for n in range(depth + 1) for w in enumerate_words(2, n)]
    per, best_all, arg = {}, -np.inf, {}
    for si, wA in enumerate(strata):
        vals = np.empty(trials)
        for t in range(trials):
            g = _trial_rng(seed, si * 1_000_003 + t)
            A, K1, K2, D = random_orbit_config(g, wA)
            vals[t] = _orbit_max_fast(A, K1, K2, D, words)
        t = int(np.argmax(vals))
        per[wA] = float(vals[t])
        if vals[t] > best_all:
            best_all, arg = float(vals[t]), {"w_A": wA, "trial": t}
    return EmpiricalConstant("beta_0 (orbit)", best_all, trials, seed, per, arg)


def _orbit_max_fast(A: Annulus, K1: DiskRegion, K2: DiskRegion, D: DiskRegion, words) -> float:
    cap = Cap.from_region(D)
    if cap.theta < 1e-4:
        # three rim points of a tiny cap no longer fix its plane in double precision
        depth = max(len(w.letters) for w in words)
        return orbit_width_check(A, K1, K2, D, depth, check=False)["max"]
    refl = [MoebiusMap.reflection(K1.boundary), MoebiusMap.reflection(K2.boundary)]
    u = np.asarray(cap.axis)
    tmp = np.array([1.0, 0, 0]) if abs(u[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(u, tmp)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    ang = np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])
    bpts = project(np.cos(cap.theta) * u + np.sin(cap.theta) * (np.cos(ang)[:, None] * e1
                                                              + np.sin(ang)[:, None] * e2))
    pts = np.concatenate([bpts, [cap.center_point]])
    x_axis = lift(A.center)
    best = 0.0
    for w in words:
        z = pts
        for i in reversed(w.letters):
            z = refl[i](z)
        X = lift(z)
        nrm = np.cross(X[1] - X[0], X[2] - X[0])
        nn = np.linalg.norm(nrm)
        if nn == 0:
            continue
        nrm /= nn
        c = float(np.dot(nrm, X[0]))
        if np.dot(nrm, X[3]) < c:  # orient the cap so that it contains the interior point
            nrm, c = -nrm, -c
        theta = float(np.arccos(np.clip(c, -1, 1)))
        delta = float(np.arctan2(np.linalg.norm(np.cross(x_axis, nrm)), np.dot(x_axis, nrm)))
        lo, hi = max(delta - theta, A.r), min(delta + theta, np.pi, A.R)
        if hi > lo:
            best = max(best, float(np.log(hi / lo)))
    return best


__all__ = [
    "Annulus", "EmpiricalConstant", "PreconditionError", "RelativeWidthReport", "SubannulusResult",
    "big_disk_bound_search", "distance_interval", "meets_both_boundaries", "orbit_bound_search",
    "orbit_width_check", "random_orbit_config", "reflected_pair_bound_search", "relative_width",
    "subannulus_select", "verify_subannulus", "width",
]
