"""Explicit piecewise bi-Lipschitz maps: pushing a chord onto a circular arc, detaching a
truncated disk from a half-plane, and the chord exhaustion of tangent round disks.

Both maps live in a normalized frame where the disk is B(-1, 1), the tangency (or arc
apex) is 0, a = 1 - cos δ and b = sin δ.  They are placed by a similarity
S(z) = p + ρ·u·z, which leaves bi-Lipschitz constants unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import GeometryError

DELTA_MAX = np.pi / 3


@dataclass(frozen=True)
class Piece:
    name: str
    contains: Callable  # (x, y) -> bool mask, closed region
    fn: Callable  # (x, y) -> (X, Y)
    jac: Callable | None = None  # (x, y) -> (..., 2, 2)
    min_jacobian: float | None = None  # proof bounds: J_f >= min_jacobian,
    max_partial: float | None = None  # |∂f_i/∂x_j| <= max_partial


@dataclass(frozen=True, eq=False)
class PiecewiseMap:
    """Planar map given by closed-form pieces in the normalized frame; points not claimed by
    any piece are fixed.  ``seams`` lists (piece_a, piece_b, z0, z1) segments shared by two
    pieces, ``window`` the normalized box used for sampling."""

    pieces: tuple[Piece, ...]
    seams: tuple = ()
    window: tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0)
    shift: complex = 0j  # similarity S(z) = shift + scale·z
    scale: complex = 1 + 0j
    params: dict = field(default_factory=dict)

    def to_frame(self, z):
        return (np.asarray(z, dtype=complex) - self.shift) / self.scale

    def from_frame(self, w):
        return self.shift + self.scale * w

    def local(self, w):
        """Evaluate in the normalized frame."""
        w = np.asarray(w, dtype=complex)
        x, y = w.real, w.imag
        out = w.copy()
        done = np.zeros(w.shape, bool)
        for pc in self.pieces:
            m = pc.contains(x, y) & ~done
            if np.any(m):
                X, Y = pc.fn(x[m], y[m])
                out[m] = X + 1j * Y
                done |= m
        return out

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        out = self.from_frame(self.local(self.to_frame(z)))
        return complex(out) if scalar else out

    def piece_of(self, z) -> np.ndarray:
        """Index of the piece claiming each point, -1 for the identity remainder."""
        w = self.to_frame(z)
        idx = np.full(w.shape, -1)
        for k, pc in enumerate(self.pieces):
            m = pc.contains(w.real, w.imag) & (idx < 0)
            idx[m] = k
        return idx

    def placed(self, shift: complex, scale: complex) -> "PiecewiseMap":
        """Conjugate by the similarity z ↦ shift + scale·z."""
        return PiecewiseMap(self.pieces, self.seams, self.window, complex(shift), complex(scale),
                            dict(self.params))


def identity_map(window=(-2.0, 2.0, -2.0, 2.0)) -> PiecewiseMap:
    return PiecewiseMap((), (), window)


def _delta_params(delta: float) -> tuple[float, float]:
    if not (0 < delta < DELTA_MAX):
        raise ValueError(f"delta must lie in (0, pi/3), got {delta}")
    return 1 - np.cos(delta), np.sin(delta)


def _cos_theta(y):
    # y = sin θ with |θ| <= δ < π/3
    return np.sqrt(np.clip(1 - y * y, 0.0, 1.0))


def _tan_theta(y):
    return y / _cos_theta(y)


def push_map(delta: float) -> PiecewiseMap:
    """Identity outside R = [-2a, a] × [-b, b]; maps the chord {-a} × [-b, b] onto the arc
    of ∂B(-1, 1) through (-a, ±b) and 0, so the part T of the disk left of the chord goes
    onto the whole disk."""
    a, b = _delta_params(delta)

    def in1(x, y):
        return (x >= -2 * a) & (x <= -a) & (np.abs(y) <= b)

    def in2(x, y):
        return (x >= -a) & (x <= a) & (np.abs(y) <= b)

    def f1(x, y):
        return (_cos_theta(y) - 1 + 2 * a) / a * (x + 2 * a) - 2 * a, y

    def f2(x, y):
        return (1 - _cos_theta(y) + a) / (2 * a) * (x - a) + a, y

    def j1(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = (_cos_theta(y) - 1 + 2 * a) / a
        J[..., 0, 1] = -_tan_theta(y) / a * (x + 2 * a)
        J[..., 1, 1] = 1
        return J

    def j2(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = (1 - _cos_theta(y) + a) / (2 * a)
        J[..., 0, 1] = _tan_theta(y) / (2 * a) * (x - a)
        J[..., 1, 1] = 1
        return J

    seams = (
        ("chord", "arc-side", complex(-a, -b), complex(-a, b)),
        ("chord", None, complex(-2 * a, -b), complex(-2 * a, b)),
        ("arc-side", None, complex(a, -b), complex(a, b)),
        ("chord", None, complex(-2 * a, b), complex(-a, b)),
        ("chord", None, complex(-2 * a, -b), complex(-a, -b)),
        ("arc-side", None, complex(-a, b), complex(a, b)),
        ("arc-side", None, complex(-a, -b), complex(a, -b)),
    )
    pieces = (Piece("chord", in1, f1, j1, 1.0, 2.0),
              Piece("arc-side", in2, f2, j2, 0.5, np.sqrt(3)))
    w = 3 * max(a, b)
    return PiecewiseMap(pieces, seams, (-2 * a - w, a + w, -b - w, b + w),
                        params={"kind": "push", "delta": delta, "a": a, "b": b})


def pull_map(delta: float) -> PiecewiseMap:
    """Identity on {x >= 0}; maps T (the part of B(-1, 1) left of the chord x = -a) onto
    the disk B(-1 - a, 1)."""
    a, b = _delta_params(delta)

    def inA(x, y):
        return (x <= -2 * a) | ((x <= -a) & (np.abs(y) >= b))

    def inB(x, y):
        return (x >= -a) & (x <= 0) & (np.abs(y) >= b)

    def inC(x, y):
        return (x >= -2 * a) & (x <= -a) & (np.abs(y) <= b)

    def inD(x, y):
        return (x >= -a) & (x <= 0) & (np.abs(y) <= b)

    def fA(x, y):
        return x - a, y

    def fB(x, y):
        return 2 * x, y

    def fC(x, y):
        return (_cos_theta(y) - 1 + 2 * a) / a * (x + 2 * a) - 3 * a, y

    def fD(x, y):
        return (1 - _cos_theta(y) + a) / a * x, y

    def jconst(m00):
        def j(x, y):
            J = np.zeros(np.shape(x) + (2, 2))
            J[..., 0, 0] = m00
            J[..., 1, 1] = 1
            return J
        return j

    def jC(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = (_cos_theta(y) - 1 + 2 * a) / a
        J[..., 0, 1] = -_tan_theta(y) / a * (x + 2 * a)
        J[..., 1, 1] = 1
        return J

    def jD(x, y):
        J = np.zeros(np.shape(x) + (2, 2))
        J[..., 0, 0] = (1 - _cos_theta(y) + a) / a
        J[..., 0, 1] = _tan_theta(y) / a * x
        J[..., 1, 1] = 1
        return J

    far = 4.0
    seams = (
        ("A", "C", complex(-2 * a, -b), complex(-2 * a, b)),
        ("A", "C", complex(-2 * a, b), complex(-a, b)),
        ("A", "C", complex(-2 * a, -b), complex(-a, -b)),
        ("C", "D", complex(-a, -b), complex(-a, b)),
        ("A", "B", complex(-a, b), complex(-a, far)),
        ("A", "B", complex(-a, -b), complex(-a, -far)),
        ("B", "D", complex(-a, b), complex(0, b)),
        ("B", "D", complex(-a, -b), complex(0, -b)),
        ("B", None, complex(0, b), complex(0, far)),
        ("B", None, complex(0, -b), complex(0, -far)),
        ("D", None, complex(0, -b), complex(0, b)),
    )
    # C repeats the push chord piece; in D, 1 <= J <= 2 and |tan θ · x / a| <= tan δ < √3
    pieces = (Piece("A", inA, fA, jconst(1.0), 1.0, 1.0), Piece("B", inB, fB, jconst(2.0), 2.0, 2.0),
              Piece("C", inC, fC, jC, 1.0, 2.0), Piece("D", inD, fD, jD, 1.0, 2.0))
    return PiecewiseMap(pieces, seams, (-3.0, 1.0, -2.0, 2.0),
                        params={"kind": "pull", "delta": delta, "a": a, "b": b})


def seam_residual(m: PiecewiseMap, n: int = 1000) -> float:
    """Largest disagreement between the two formulas sharing a seam (a missing partner
    means the identity), over ``n`` points spread across all seams."""
    byname = {pc.name: pc for pc in m.pieces}
    per = max(2, n // max(1, len(m.seams)))
    worst = 0.0
    for pa, pb, z0, z1 in m.seams:
        t = np.linspace(0, 1, per)
        w = z0 + (z1 - z0) * t
        x, y = w.real, w.imag
        Xa, Ya = byname[pa].fn(x, y)
        if pb is None:
            Xb, Yb = x, y
        else:
            Xb, Yb = byname[pb].fn(x, y)
        worst = max(worst, float(np.max(np.hypot(Xa - Xb, Ya - Yb))))
    return worst


def _grid(window, h, max_points: int, seed: int = 0) -> np.ndarray:
    x0, x1, y0, y1 = window
    xs = np.arange(x0, x1 + h / 2, h)
    ys = np.arange(y0, y1 + h / 2, h)
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    if Z.size > max_points:
        Z = np.random.default_rng(seed).choice(Z, max_points, replace=False)
    return Z


def derivative_check(m: PiecewiseMap, samples: int = 10_000, seed: int = 0,
                     fd_step: float = 1e-7) -> dict:
    """Sample interior points of every piece and test the derivative bounds from the
    construction: J_f >= min_jacobian and every |∂f_i/∂x_j| <= max_partial.  The closed-form
    Jacobian is also compared with central differences of the piece formula.

    Returns per-piece minimum Jacobian, maximum partial, finite-difference mismatch and the
    number of violations."""
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = m.window
    out, violations = {}, 0
    per = max(1, samples // max(1, len(m.pieces)))
    for pc in m.pieces:
        # sample in the piece's bounding box, located on a coarse grid
        gx, gy = np.meshgrid(np.linspace(x0, x1, 801), np.linspace(y0, y1, 801))
        hit = pc.contains(gx, gy)
        if not hit.any():
            continue
        hx, hy = (x1 - x0) / 800, (y1 - y0) / 800
        bx0, bx1 = max(x0, gx[hit].min() - hx), min(x1, gx[hit].max() + hx)
        by0, by1 = max(y0, gy[hit].min() - hy), min(y1, gy[hit].max() + hy)
        pts = np.empty(0, complex)
        for _ in range(200):
            z = rng.uniform(bx0, bx1, 4 * per) + 1j * rng.uniform(by0, by1, 4 * per)
            # interior of the piece: claimed by it, and by it alone a step away
            ok = pc.contains(z.real, z.imag)
            for dz in (fd_step, -fd_step, 1j * fd_step, -1j * fd_step):
                w = z + 10 * dz
                ok &= pc.contains(w.real, w.imag)
            pts = np.r_[pts, z[ok]][:per]
            if pts.size >= per:
                break
        x, y = pts.real, pts.imag
        J = pc.jac(x, y)
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        fx = np.stack(pc.fn(x + fd_step, y)) - np.stack(pc.fn(x - fd_step, y))
        fy = np.stack(pc.fn(x, y + fd_step)) - np.stack(pc.fn(x, y - fd_step))
        fd = np.stack([fx, fy], axis=-1) / (2 * fd_step)  # (2, n, 2): [i, point, j]
        mismatch = float(np.max(np.abs(np.moveaxis(fd, 1, 0) - J))) if pts.size else 0.0
        jmin = float(det.min()) if pts.size else np.inf
        pmax = float(np.abs(J).max()) if pts.size else 0.0
        bad = 0
        if pc.min_jacobian is not None:
            bad += int(np.sum(det < pc.min_jacobian - 1e-12))
        if pc.max_partial is not None:
            bad += int(np.sum(np.abs(J).max(axis=(-2, -1)) > pc.max_partial + 1e-12))
        violations += bad
        out[pc.name] = {"points": int(pts.size), "min_jacobian": jmin, "max_partial": pmax,
                        "fd_mismatch": mismatch, "violations": bad}
    return {"pieces": out, "violations": violations,
            "points": int(sum(v["points"] for v in out.values()))}


def identity_outside_residual(m: PiecewiseMap, samples: int = 10_000, seed: int = 0) -> float:
    """Largest |f(z) - z| over sampled window points claimed by no piece (exactly 0 when the
    remainder is the identity)."""
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = m.window
    w = rng.uniform(x0, x1, samples) + 1j * rng.uniform(y0, y1, samples)
    free = np.ones(w.shape, bool)
    for pc in m.pieces:
        free &= ~pc.contains(w.real, w.imag)
    if not free.any():
        return 0.0
    return float(np.max(np.abs(m.local(w[free]) - w[free])))


def delta_sweep(kind: str, deltas=None, resolution: float = 0.01) -> dict:
    """bilip_estimate of the push or pull map over δ, at spacing ``resolution`` times the
    window width; ``variation`` is max/min - 1."""
    make = {"push": push_map, "pull": pull_map}[kind]
    if deltas is None:
        deltas = np.linspace(np.pi / 12, np.pi / 3 - 0.05, 6)
    vals = []
    for d in deltas:
        m = make(float(d))
        vals.append(bilip_estimate(m, resolution * (m.window[1] - m.window[0])))
    v = np.array(vals)
    return {"deltas": [float(d) for d in deltas], "estimates": v.tolist(),
            "variation": float(v.max() / v.min() - 1)}


def orientation_preserved(m: PiecewiseMap, h: float = 0.02) -> bool:
    """No fold-over: every mapped triangle of a sampled grid keeps its orientation."""
    x0, x1, y0, y1 = m.window
    xs = np.arange(x0, x1 + h / 2, h)
    ys = np.arange(y0, y1 + h / 2, h)
    Z = xs[None, :] + 1j * ys[:, None]
    F = m.local(Z)

    def area(p, q, r):
        return ((q - p) * np.conj(r - p)).imag * -1

    a1 = area(F[:-1, :-1], F[:-1, 1:], F[1:, :-1])
    a2 = area(F[1:, 1:], F[1:, :-1], F[:-1, 1:])
    return bool(np.all(a1 > 0) and np.all(a2 > 0))


def bilip_estimate(m, h: float, window=None, max_points: int = 40_000, seed: int = 0) -> float:
    """max over sampled pairs of max(|f(x)-f(y)|/|x-y|, |x-y|/|f(x)-f(y)|) with pair
    separations h, 10h and diam/4 in sixteen directions.

    ``m`` is a PiecewiseMap (window taken from it, in its placed frame) or any vectorised
    callable together with an explicit ``window`` (x0, x1, y0, y1)."""
    if isinstance(m, PiecewiseMap):
        wx0, wx1, wy0, wy1 = m.window if window is None else window
        corners = m.from_frame(np.array([wx0 + 1j * wy0, wx1 + 1j * wy1, wx0 + 1j * wy1,
                                         wx1 + 1j * wy0]))
        win = (corners.real.min(), corners.real.max(), corners.imag.min(), corners.imag.max())
    else:
        if window is None:
            raise ValueError("a plain callable needs an explicit sampling window")
        win = window
    Z = _grid(win, h, max_points, seed)
    diam = np.hypot(win[1] - win[0], win[3] - win[2])
    FZ = m(Z)
    worst = 1.0
    dirs = np.exp(1j * np.pi * np.arange(16) / 8)
    for s in (h, 10 * h, diam / 4):
        for u in dirs:
            W = Z + s * u
            FW = m(W)
            num = np.abs(FW - FZ)
            with np.errstate(divide="ignore"):
                r = np.maximum(num / s, s / num)
            worst = max(worst, float(np.max(r)))
    return worst


# ---------------------------------------------------------------------------------------
# exhaustion of tangent round disks


@dataclass(frozen=True)
class Tangency:
    i: int
    j: int
    point: complex


@dataclass(frozen=True)
class TruncatedDisk:
    """Open disk B(center, radius) minus the closed caps cut off by chords; each cut is
    (unit direction u to the tangency point, sagitta s): the cap {Re(conj(u)(z - c)) >= ρ - s}."""

    center: complex
    radius: float
    cuts: tuple[tuple[complex, float], ...] = ()

    def contains(self, z, closed: bool = False) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        d = np.abs(z - self.center)
        ok = d <= self.radius if closed else d < self.radius
        for u, s in self.cuts:
            h = (np.conj(u) * (z - self.center)).real
            ok &= (h <= self.radius - s) if closed else (h < self.radius - s)
        return ok

    def boundary(self, n: int = 512) -> np.ndarray:
        """Sampled boundary: arcs of the circle outside the caps, plus the chords."""
        t = 2 * np.pi * np.arange(n) / n
        arc = self.center + self.radius * np.exp(1j * t)
        keep = np.ones(n, bool)
        for u, s in self.cuts:
            keep &= (np.conj(u) * (arc - self.center)).real <= self.radius - s
        pts = [arc[keep]]
        for u, s in self.cuts:
            half = np.sqrt(s * (2 * self.radius - s))
            mid = self.center + u * (self.radius - s)
            pts.append(mid + 1j * u * half * np.linspace(-1, 1, max(8, n // 16)))
        return np.concatenate(pts)

    def hausdorff_to_disk(self) -> float:
        """Hausdorff distance to the full closed disk: the deepest cap's sagitta."""
        return max((s for _, s in self.cuts), default=0.0)


@dataclass(frozen=True)
class ExhaustionStage:
    n: int
    regions: tuple[TruncatedDisk, ...]
    tangencies: tuple[Tangency, ...]
    chains: dict  # (i, k) -> list of (label, PiecewiseMap, bilip estimate)

    def gap(self, i: int, j: int, samples: int = 2048) -> float:
        """Distance between the closures of two regions, from boundary samples."""
        A = self.regions[i].boundary(samples)
        B = self.regions[j].boundary(samples)
        return float(np.min(np.abs(A[:, None] - B[None, :])))


def find_tangencies(disks, tol: float = 1e-9) -> list[Tangency]:
    """Pairs of disks (center, radius) meeting at a single boundary point; overlaps and
    triple points are rejected."""
    out = []
    for (i, (ci, ri)), (j, (cj, rj)) in itertools.combinations(enumerate(disks), 2):
        d = abs(complex(cj) - complex(ci))
        scale = max(ri, rj)
        if d < ri + rj - tol * scale:
            raise GeometryError(f"disks {i} and {j} overlap")
        if d <= ri + rj + tol * scale:
            u = (complex(cj) - complex(ci)) / d
            out.append(Tangency(i, j, complex(ci) + ri * u))
    for a, b in itertools.combinations(out, 2):
        if abs(a.point - b.point) <= tol * max(1.0, abs(a.point)):
            raise GeometryError("three disks meet at a single point")
    return out


def exhaust_tangent_disks(disks, n: int, scale: float | None = None,
                          estimate_h: float | None = None) -> ExhaustionStage:
    """Stage n of the chord exhaustion.  At every tangency both disks lose the cap cut by a
    chord parallel to the tangent line at sagitta s_n = scale·2⁻ⁿ (scale defaults to a
    quarter of the smallest radius); disks without tangencies are kept whole.

    For each pair (i, k) the chain lists push maps (restoring i and k at their other
    tangencies) and, if i and k touch, the two pull maps detaching them, each with its
    bi-Lipschitz estimate."""
    disks = [(complex(c), float(r)) for c, r in disks]
    if any(r <= 0 for _, r in disks):
        raise GeometryError("radii must be positive")
    tang = find_tangencies(disks)
    scale = min(r for _, r in disks) / 4 if scale is None else float(scale)
    s_n = scale * 2.0 ** (-n)
    cuts: list[list[tuple[complex, float]]] = [[] for _ in disks]
    placed: dict[tuple[int, complex], tuple[float, complex, complex]] = {}
    for t in tang:
        for i in (t.i, t.j):
            c, r = disks[i]
            if s_n >= r / 2:
                raise GeometryError(f"stage {n} too coarse: sagitta {s_n} >= radius/2 of disk {i}")
            u = (t.point - c) / abs(t.point - c)
            cuts[i].append((u, s_n))
    for i, (c, r) in enumerate(disks):
        for (u1, s1), (u2, s2) in itertools.combinations(cuts[i], 2):
            half = np.arccos(1 - s1 / r) + np.arccos(1 - s2 / r)
            if abs(np.angle(u2 / u1)) <= half:
                raise GeometryError(f"stage {n} too coarse: cut caps of disk {i} overlap")
    regions = tuple(TruncatedDisk(c, r, tuple(cuts[i])) for i, (c, r) in enumerate(disks))

    def local_map(kind, i, point):
        c, r = disks[i]
        u = (point - c) / abs(point - c)
        delta = float(np.arccos(1 - s_n / r))
        base = push_map(delta) if kind == "push" else pull_map(delta)
        # normalized frame: disk B(-1, 1) with the tangency at 0
        return base.placed(point, r * u)

    h = estimate_h
    chains: dict = {}
    for i, k in itertools.combinations(range(len(disks)), 2):
        chain = []
        touching = [t for t in tang if {t.i, t.j} == {i, k}]
        for t in tang:
            if t in touching:
                continue
            for idx in (t.i, t.j):
                if idx in (i, k):
                    m = local_map("push", idx, t.point)
                    chain.append((f"push {idx} at {t.point:.6g}", m, _est(m, h)))
        for t in touching:
            for idx in (t.i, t.j):
                m = local_map("pull", idx, t.point)
                chain.append((f"pull {idx} at {t.point:.6g}", m, _est(m, h)))
        chains[(i, k)] = chain
    return ExhaustionStage(n, regions, tuple(tang), chains)


def _est(m: PiecewiseMap, h: float | None) -> float | None:
    if h is None:
        return None
    return bilip_estimate(m, h * abs(m.scale), max_points=8000)


__all__ = [
    "ExhaustionStage", "Piece", "PiecewiseMap", "Tangency", "TruncatedDisk", "bilip_estimate",
    "delta_sweep", "derivative_check", "exhaust_tangent_disks", "identity_outside_residual", "find_tangencies", "identity_map", "orientation_preserved",
    "pull_map", "push_map", "seam_residual",
]
