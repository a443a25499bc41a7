"""Möbius and anti-Möbius maps, cross-ratios and sphere rotations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circles import DiskRegion, GeneralizedCircle, GeometryError, fit_circle, reflect_in
from .points import CHART_SWITCH, ExtendedPoint, as_array, is_inf, _INF_C


@dataclass(frozen=True)
class MoebiusMap:
    """z ↦ (a w + b)/(c w + d) with w = z, or w = conj(z) when ``conjugating``."""

    a: complex
    b: complex
    c: complex
    d: complex
    conjugating: bool = False

    def __post_init__(self):
        vals = [complex(v) for v in (self.a, self.b, self.c, self.d)]
        det = vals[0] * vals[3] - vals[1] * vals[2]
        scale = max(abs(v) for v in vals)
        if scale == 0 or not np.isfinite(scale) or abs(det) <= 1e-14 * scale * scale:
            raise GeometryError("degenerate Möbius coefficients (ad - bc = 0)")
        # normalise to det = 1 for numerical hygiene
        s = np.sqrt(det)
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v / s)

    @classmethod
    def from_matrix(cls, M, conjugating: bool = False) -> "MoebiusMap":
        M = np.asarray(M, dtype=complex)
        return cls(M[0, 0], M[0, 1], M[1, 0], M[1, 1], conjugating)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def reflection(cls, circle: GeneralizedCircle) -> "MoebiusMap":
        if circle.kind == "circle":
            a, r = circle.center, circle.radius
            return cls(a, r * r - abs(a) ** 2, 1, -np.conj(a), True)
        n, t = circle.normal, circle.offset
        return cls(-n * n, 2 * t * n, 0, 1, True)

    @classmethod
    def similarity(cls, scale: complex, shift: complex = 0j) -> "MoebiusMap":
        return cls(scale, shift, 0, 1)

    @classmethod
    def fixing(cls, p, q, r, targets=(0, 1, np.inf)) -> "MoebiusMap":
        """The Möbius map sending p, q, r to the given targets (default 0, 1, ∞)."""
        S = _to_zero_one_inf(p, q, r)
        T = _to_zero_one_inf(*targets)
        return T.inverse().compose(S)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z):
        return apply_moebius(self, z)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self ∘ other."""
        return compose(self, other)

    def inverse(self) -> "MoebiusMap":
        Mi = np.linalg.inv(self.matrix)
        if self.conjugating:
            # z = conj(M^-1 w)  ->  matrix conj(M^-1) acting on conj(w)
            return MoebiusMap.from_matrix(np.conj(Mi), True)
        return MoebiusMap.from_matrix(Mi, False)

    def is_identity(self, tol: float = 1e-12) -> bool:
        if self.conjugating:
            return False
        M = self.matrix
        return bool(np.allclose(M, np.eye(2), atol=tol) or np.allclose(M, -np.eye(2), atol=tol))


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """m1 ∘ m2 (m2 acts first)."""
    M2 = np.conj(m2.matrix) if m1.conjugating else m2.matrix
    return MoebiusMap.from_matrix(m1.matrix @ M2, m1.conjugating != m2.conjugating)


def apply_moebius(m: MoebiusMap, z):
    ep = isinstance(z, ExtendedPoint)
    arr = as_array(z)
    w = np.conj(arr) if m.conjugating else arr
    inf = is_inf(w)
    f = np.where(inf, 0, w)
    big = np.abs(f) > CHART_SWITCH
    with np.errstate(divide="ignore", invalid="ignore"):
        u = 1 / np.where(big, f, 1)
        num = np.where(big, m.a + m.b * u, m.a * f + m.b)
        den = np.where(big, m.c + m.d * u, m.c * f + m.d)
        num = np.where(inf, m.a, num)
        den = np.where(inf, m.c, den)
        # a denominator at rounding level of its terms is a pole
        scale = np.where(big, np.abs(m.c) + np.abs(m.d * u), np.abs(m.c * f) + np.abs(m.d))
        scale = np.where(inf, np.abs(m.c), scale)
        pole = np.abs(den) <= 4 * np.finfo(float).eps * scale
        out = num / den
    out = np.where(pole | ~np.isfinite(out), _INF_C, out)
    if ep:
        return ExtendedPoint.of(complex(out))
    if np.ndim(arr) == 0 and not isinstance(z, np.ndarray):
        return complex(out)
    return out


def map_disk(m: MoebiusMap, D: DiskRegion, check: bool = True) -> DiskRegion:
    """Image of a disk region under a (anti-)Möbius map.

    When the image is a circle its center is m(z*), where z* is the reflection of the pole
    m⁻¹(∞) in the boundary (symmetric points map to symmetric points), and its radius is
    read off pushed boundary samples.  This stays accurate for tiny image circles where the
    Hermitian-form route cancels catastrophically; the form is used only when the image is
    a line.  With ``check`` the 8 pushed boundary samples must lie on the result.
    """
    pole = complex(apply_moebius(m.inverse(), complex(np.inf, 0)))
    pole_inf = np.isinf(pole.real) or np.isinf(pole.imag)
    bnd = D.boundary
    samples = bnd.sample(8)
    img = apply_moebius(m, samples)
    if pole_inf:
        to_line = bnd.kind == "line"
    else:
        s = float(D.signed(pole))
        size = bnd.radius if bnd.kind == "circle" else 1.0 + abs(pole)
        to_line = abs(s) <= 1e-12 * size
    if to_line:
        A, B, Dd = D.hermitian()
        H = np.array([[A, B], [np.conj(B), Dd]], dtype=complex)
        if m.conjugating:
            H = np.conj(H)
        Mi = np.linalg.inv(m.matrix)
        H2 = Mi.conj().T @ H @ Mi
        out = DiskRegion.from_hermitian(float(H2[0, 0].real), complex(H2[0, 1]),
                                        float(H2[1, 1].real))
    else:
        if pole_inf:
            zs = bnd.center if bnd.kind == "circle" else None
            if zs is None:
                raise GeometryError("affine image of a line is a line")
            bounded = not D.contains_infinity(closed=False)
        else:
            zs = reflect_in(bnd, pole)
            bounded = float(D.signed(pole)) > 0
        center = complex(apply_moebius(m, zs))
        radius = float(np.median(np.abs(img - center)))
        out = DiskRegion(GeneralizedCircle.circle(center, radius), bounded)
    if check:
        pts = img[~is_inf(img)]
        if pts.size:
            # displacement measured on the sphere (chordal scale) so huge and tiny images are
            # judged alike
            res = out.boundary.distance_to(pts) * 2 / (1 + np.abs(pts) ** 2)
            if np.max(res) > 1e-8:
                raise GeometryError(f"map_disk refit residual {np.max(res):.3e} too large")
    return out


def refit_residual(m: MoebiusMap, D: DiskRegion, n: int = 8) -> float:
    """Residual of refitting a circle through n pushed boundary samples, relative to the
    analytic image.  Used by tests as an independent check of :func:`map_disk`."""
    pts = apply_moebius(m, D.boundary.sample(n))
    pts = pts[~is_inf(pts)]
    circ, res = fit_circle(pts)
    img = map_disk(m, D, check=False).boundary
    if circ.kind != img.kind:
        return float("inf")
    if circ.kind == "circle":
        return max(res, abs(circ.center - img.center) / img.radius,
                   abs(circ.radius - img.radius) / img.radius)
    return res


def _to_zero_one_inf(p, q, r) -> MoebiusMap:
    """Möbius map with p ↦ 0, q ↦ 1, r ↦ ∞."""
    P = [complex(as_array(v)) for v in (p, q, r)]
    fin = [not (np.isinf(v.real) or np.isinf(v.imag)) for v in P]
    if len({(v if f else "inf") for v, f in zip(P, fin)}) < 3:
        raise GeometryError("normalisation points must be distinct")
    p, q, r = P
    if not fin[0]:
        return MoebiusMap(0, q - r, 1, -r)
    if not fin[1]:
        return MoebiusMap(1, -p, 1, -r)
    if not fin[2]:
        return MoebiusMap(1, -p, 0, q - p)
    return MoebiusMap(q - r, -p * (q - r), q - p, -r * (q - p))


def cross_ratio(a, b, c, d) -> float:
    """[a,b,c,d] = |a-c||b-d| / (|a-d||b-c|), omitting factors that contain ∞."""
    P = [complex(as_array(v)) for v in (a, b, c, d)]
    fin = [not (np.isinf(v.real) or np.isinf(v.imag)) for v in P]
    keys = [(round(v.real, 15), round(v.imag, 15)) if f else "inf" for v, f in zip(P, fin)]
    if len(set(keys)) < 4:
        raise GeometryError("cross-ratio needs four distinct points")

    def fac(i, j):
        if not fin[i] or not fin[j]:
            return 1.0
        return abs(P[i] - P[j])

    return fac(0, 2) * fac(1, 3) / (fac(0, 3) * fac(1, 2))


def rotation_moebius(R: np.ndarray) -> MoebiusMap:
    """Möbius map induced on the chart by a rotation matrix R of the sphere.

    Built as the unique Möbius map agreeing with R on three points; rotations preserve
    orientation and circles, so this is the induced map."""
    from .points import lift, project

    src = np.array([0, 1, 1j], dtype=complex)
    dst = project(lift(src) @ np.asarray(R, dtype=float).T)
    return MoebiusMap.fixing(*src, targets=tuple(dst))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    from scipy.spatial.transform import Rotation

    return Rotation.random(random_state=rng).as_matrix()


def random_moebius(rng: np.random.Generator, spread: float = 1.0, conjugating: bool = False) -> MoebiusMap:
    while True:
        M = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) * spread + np.eye(2)
        if abs(np.linalg.det(M)) > 0.1:
            return MoebiusMap.from_matrix(M, conjugating)
