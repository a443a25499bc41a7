"""Generalized circles, the disks they bound, spherical caps and circle reflection.

A generalized circle is encoded by a Hermitian form
``q(z) = A|z|^2 + B conj(z) + conj(B) z + D`` with real A, D; the circle is
``q = 0`` and the canonical "inside" of a :class:`DiskRegion` is ``q < 0``.
Möbius maps act on the form by congruence, which is how disks are pushed
forward without any sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .points import CHART_SWITCH, ExtendedPoint, as_array, is_inf, lift, project, _INF_C


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class GeneralizedCircle:
    """Either ``circle(center, radius)`` or ``line(normal, offset)`` = {Re(conj(n) z) = t}."""

    kind: str
    center: complex = 0j
    radius: float = 1.0
    normal: complex = 1 + 0j
    offset: float = 0.0

    def __post_init__(self):
        if self.kind == "circle":
            if not (self.radius > 0 and np.isfinite(self.radius)):
                raise GeometryError("circle radius must be positive and finite")
            object.__setattr__(self, "center", complex(self.center))
            object.__setattr__(self, "radius", float(self.radius))
        elif self.kind == "line":
            n = complex(self.normal)
            if abs(abs(n) - 1) > 1e-9:
                raise GeometryError("line normal must have unit modulus")
            object.__setattr__(self, "normal", n / abs(n))
            object.__setattr__(self, "offset", float(self.offset))
        else:
            raise GeometryError(f"unknown circle kind {self.kind!r}")

    @classmethod
    def circle(cls, center, radius) -> "GeneralizedCircle":
        return cls("circle", center=complex(center), radius=float(radius))

    @classmethod
    def line(cls, normal, offset=0.0) -> "GeneralizedCircle":
        n = complex(normal)
        return cls("line", normal=n / abs(n), offset=float(offset) / 1.0)

    @classmethod
    def through(cls, p, q) -> "GeneralizedCircle":
        """The line through two finite points."""
        p, q = complex(p), complex(q)
        n = 1j * (q - p) / abs(q - p)
        return cls.line(n, (np.conj(n) * p).real)

    @property
    def is_line(self) -> bool:
        return self.kind == "line"

    def hermitian(self) -> tuple[float, complex, float]:
        if self.kind == "circle":
            a = self.center
            return 1.0, -a, abs(a) ** 2 - self.radius ** 2
        return 0.0, self.normal / 2, -self.offset

    @classmethod
    def from_hermitian(cls, A: float, B: complex, D: float) -> tuple["GeneralizedCircle", bool]:
        """Circle of the form plus a flag telling whether {q < 0} is the circle's interior
        (or, for lines, the half-plane Re(conj(n) z) < t)."""
        scale = max(abs(A), abs(B), abs(D))
        if scale == 0:
            raise GeometryError("degenerate Hermitian form")
        A, B, D = A / scale, B / scale, D / scale
        if abs(A) > 1e-13 * max(1.0, abs(B)):
            center = -B / A
            r2 = abs(B) ** 2 / A ** 2 - D / A
            if r2 <= 0:
                raise GeometryError("Hermitian form does not describe a real circle")
            return cls.circle(center, np.sqrt(r2)), A > 0
        if abs(B) == 0:
            raise GeometryError("degenerate Hermitian form")
        n = B / abs(B)
        return cls.line(n, -D / (2 * abs(B))), True

    def q(self, z) -> np.ndarray:
        """Signed defining function, normalised so |q| is comparable to a Euclidean distance."""
        a = as_array(z)
        inf = is_inf(a)
        f = np.where(inf, 0, a)
        if self.kind == "circle":
            val = np.abs(f - self.center) - self.radius
            return np.where(inf, np.inf, val)
        val = (np.conj(self.normal) * f).real - self.offset
        return np.where(inf, 0.0, val)

    def sample(self, n: int = 64) -> np.ndarray:
        """n points on the circle.  Lines are sampled through the chart so that
        the points spread over the whole great circle, ∞ excluded."""
        t = 2 * np.pi * (np.arange(n) + 0.5) / n
        if self.kind == "circle":
            return self.center + self.radius * np.exp(1j * t)
        # parametrise the line's great circle by angle: foot + tan((t-pi)/2) along direction
        foot = self.offset * self.normal
        d = 1j * self.normal
        return foot + d * np.tan((t - np.pi) / 2)

    def distance_to(self, z) -> np.ndarray:
        """Euclidean distance from finite points to the circle."""
        return np.abs(self.q(z))


@dataclass(frozen=True)
class DiskRegion:
    """The open region bounded by ``boundary``.  ``inside=True`` selects the bounded
    disk (or the half-plane Re(conj(n) z) < t for lines); ``inside=False`` the other side."""

    boundary: GeneralizedCircle
    inside: bool = True

    @classmethod
    def disk(cls, center, radius) -> "DiskRegion":
        return cls(GeneralizedCircle.circle(center, radius), True)

    @classmethod
    def exterior(cls, center, radius) -> "DiskRegion":
        return cls(GeneralizedCircle.circle(center, radius), False)

    @classmethod
    def half_plane(cls, normal, offset) -> "DiskRegion":
        """{Re(conj(n) z) < t}."""
        return cls(GeneralizedCircle.line(normal, offset), True)

    @property
    def center(self) -> complex:
        return self.boundary.center

    @property
    def radius(self) -> float:
        return self.boundary.radius

    @property
    def is_bounded_disk(self) -> bool:
        return self.boundary.kind == "circle" and self.inside

    def hermitian(self) -> tuple[float, complex, float]:
        A, B, D = self.boundary.hermitian()
        return (A, B, D) if self.inside else (-A, -B, -D)

    @classmethod
    def from_hermitian(cls, A, B, D) -> "DiskRegion":
        c, neg_is_inside = GeneralizedCircle.from_hermitian(A, B, D)
        return cls(c, neg_is_inside)

    def signed(self, z) -> np.ndarray:
        """Negative inside the region, positive outside, 0 on the boundary.
        At ∞ the sign comes from the region's side."""
        s = self.boundary.q(z)
        return s if self.inside else -s

    def contains(self, z, closed: bool = True, tol: float = 0.0) -> np.ndarray:
        a = as_array(z)
        s = self.signed(a)
        inf = is_inf(a)
        res = s <= tol if closed else s < -tol
        if np.any(inf):
            res = np.where(inf, self.contains_infinity(closed), res)
        return res

    def contains_infinity(self, closed: bool = True) -> bool:
        if self.boundary.kind == "line":
            return closed
        return not self.inside

    def boundary_samples(self, n: int = 64) -> np.ndarray:
        return self.boundary.sample(n)

    def complement(self) -> "DiskRegion":
        return DiskRegion(self.boundary, not self.inside)

    def to_cap(self) -> "Cap":
        return Cap.from_region(self)

    def euclidean_distance_interval(self, x: complex) -> tuple[float, float]:
        """(inf, sup) of |z - x| over the closed region (bounded disks only)."""
        if not self.is_bounded_disk:
            raise GeometryError("distance interval needs a bounded disk")
        d = abs(self.center - x)
        return max(d - self.radius, 0.0), d + self.radius


def _angle(u, v) -> float:
    """Angle between unit vectors, accurate for nearly parallel vectors."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return float(np.arctan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v)))


@dataclass(frozen=True)
class Cap:
    """Closed spherical cap of angular radius ``theta`` about the unit vector ``axis``."""

    axis: tuple[float, float, float]
    theta: float

    def __post_init__(self):
        u = np.asarray(self.axis, dtype=float)
        u = u / np.linalg.norm(u)
        object.__setattr__(self, "axis", tuple(float(v) for v in u))
        object.__setattr__(self, "theta", float(np.clip(self.theta, 0.0, np.pi)))

    @property
    def c(self) -> float:
        return float(np.cos(self.theta))

    @property
    def angular_radius(self) -> float:
        return self.theta

    @property
    def center_point(self) -> complex:
        return complex(project(np.asarray(self.axis)))

    def area(self) -> float:
        return 4 * np.pi * np.sin(self.theta / 2) ** 2

    def diameter(self) -> float:
        """Spherical diameter."""
        return 2 * self.theta if self.theta <= np.pi / 2 else np.pi

    def contains(self, z, tol: float = 0.0) -> np.ndarray:
        X = lift(z)
        u = np.asarray(self.axis)
        ang = np.arctan2(np.linalg.norm(np.cross(X, u), axis=-1), X @ u)
        return ang <= self.theta + tol

    @classmethod
    def from_region(cls, region: DiskRegion) -> "Cap":
        bnd = region.boundary
        if bnd.kind == "circle" and bnd.radius < 1e-3 * (1 + abs(bnd.center)):
            # small circle: the two boundary points on the ray through the center are
            # diametrically opposite on the cap, which keeps full relative precision
            u = bnd.center / abs(bnd.center) if bnd.center != 0 else 1.0
            p1, p2 = bnd.center - bnd.radius * u, bnd.center + bnd.radius * u
            X1, X2 = lift(p1), lift(p2)
            theta = float(np.arcsin(min(1.0, np.linalg.norm(X1 - X2) / 2)))
            axis = (X1 + X2) / 2
            if region.inside:
                return cls(tuple(axis), theta)
            return cls(tuple(-axis), np.pi - theta)
        # q(z) = A|z|^2 + 2Re(conj(B) z) + D; multiplying by (1 - x3) turns q < 0 into the
        # half-space n·X < h with n = (2 Re B, 2 Im B, A - D), h = -(A + D).
        A, B, D = region.hermitian()
        n = np.array([2 * B.real, 2 * B.imag, A - D])
        h = -(A + D)
        nn = np.linalg.norm(n)
        return cls(tuple(-n / nn), float(np.arccos(np.clip(-h / nn, -1, 1))))

    def to_region(self) -> DiskRegion:
        # The rim meets the axis meridian at chart radii tan((from_south -+ theta)/2).  Half
        # their sum and difference give the chart disk; writing the factors with angles from
        # both poles avoids any cancellation, even for tiny caps at 0 or at infinity.
        u = np.asarray(self.axis)
        theta = self.theta
        from_south = _angle(u, (0.0, 0.0, -1.0))
        from_north = _angle(u, (0.0, 0.0, 1.0))
        direction = np.exp(1j * np.arctan2(u[1], u[0]))
        if from_north - theta > 1e-14:
            denom = 2 * np.sin((from_north - theta) / 2) * np.cos((from_south - theta) / 2)
            return DiskRegion.disk(complex(direction * np.sin(from_south) / denom),
                                   float(np.sin(theta) / denom))
        if theta - from_north > 1e-14:
            # the cap contains infinity: exterior of the complementary cap's chart disk
            denom = 2 * np.sin((theta - from_north) / 2) * np.sin((theta + from_north) / 2)
            return DiskRegion.exterior(complex(-direction * np.sin(from_north) / denom),
                                       float(np.sin(theta) / denom))
        # rim through infinity: invert from_region, n·X < h with n = -axis, h = -cos(theta)
        c = self.c
        A = (c - u[2]) / 2
        D = (c + u[2]) / 2
        B = -(u[0] + 1j * u[1]) / 2
        return DiskRegion.from_hermitian(A, B, D)

    def rotated(self, R: np.ndarray) -> "Cap":
        return Cap(tuple(R @ np.asarray(self.axis)), self.theta)


def reflect_in(circle: GeneralizedCircle, z):
    """Reflection (inversion) in a generalized circle.  Accepts scalars, arrays or ExtendedPoint."""
    scalar_ep = isinstance(z, ExtendedPoint)
    a = as_array(z)
    inf = is_inf(a)
    f = np.where(inf, 0, a)
    if circle.kind == "line":
        n, t = circle.normal, circle.offset
        out = f - 2 * ((np.conj(n) * f).real - t) * n
        out = np.where(inf, _INF_C, out)
    else:
        c, r = circle.center, circle.radius
        d = np.conj(f - c)
        big = np.abs(f) > CHART_SWITCH
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = c + r * r / d
            # far away: z = 1/u, conj(z) - conj(c) = (1 - conj(c u))/conj(u)
            u = 1 / np.where(big, f, 1)
            chart = c + r * r * np.conj(u) / (1 - np.conj(c * u))
        out = np.where(big, chart, direct)
        out = np.where(d == 0, _INF_C, out)
        out = np.where(inf, c, out)
    out = np.where(np.isfinite(out), out, _INF_C)
    if scalar_ep:
        return ExtendedPoint.of(complex(out))
    if np.ndim(a) == 0 and not isinstance(z, np.ndarray):
        return complex(out)
    return out


def fit_circle(points, tol: float = 1e-9) -> tuple[GeneralizedCircle, float]:
    """Fit a generalized circle through finite sample points.

    Three well separated points define the candidate; the residual over all points
    (max |q|, scaled by the circle size) is returned.  Near-collinear triples
    (area below tol relative to the spread) are skipped in favour of the next triple.
    """
    p = as_array(points).ravel()
    p = p[~is_inf(p)]
    if p.size < 3:
        raise GeometryError("need at least three finite points to fit a circle")
    scale = np.max(np.abs(p - p.mean())) or 1.0
    n = p.size
    tried = []
    # candidate triples spread around the sample order
    for shift in range(max(1, n // 3)):
        i, j, k = shift % n, (shift + n // 3) % n, (shift + 2 * n // 3) % n
        if len({i, j, k}) < 3:
            continue
        tried.append((i, j, k))
        if len(tried) > 16:
            break
    best = None
    for i, j, k in tried:
        a, b, c = p[i], p[j], p[k]
        area = ((b - a).real * (c - a).imag - (b - a).imag * (c - a).real) / 2
        if abs(area) <= tol * scale * scale:
            continue
        circ = _circle_through(a, b, c)
        res = float(np.max(circ.distance_to(p))) / (circ.radius if circ.kind == "circle" else scale)
        if best is None or res < best[1]:
            best = (circ, res)
        if res < tol:
            break
    if best is None:
        # everything collinear: fit a line through the extreme points
        far = int(np.argmax(np.abs(p - p[0])))
        line = GeneralizedCircle.through(p[0], p[far])
        return line, float(np.max(line.distance_to(p))) / scale
    return best


def _circle_through(a: complex, b: complex, c: complex) -> GeneralizedCircle:
    # circumcenter via perpendicular bisectors
    ab, ac = b - a, c - a
    den = 2 * (ab.real * ac.imag - ab.imag * ac.real)
    ux = (ac.imag * abs(ab) ** 2 - ab.imag * abs(ac) ** 2) / den
    uy = (ab.real * abs(ac) ** 2 - ac.real * abs(ab) ** 2) / den
    center = a + complex(ux, uy)
    return GeneralizedCircle.circle(center, abs(center - a))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def cell_spherical_area(x0, x1, y0, y1) -> np.ndarray:
    """Spherical measure of axis-aligned chart rectangles (vectorised, 8x8 Gauss-Legendre)."""
    x0, x1, y0, y1 = (np.asarray(v, dtype=float) for v in (x0, x1, y0, y1))
    hx, hy = (x1 - x0) / 2, (y1 - y0) / 2
    mx, my = (x1 + x0) / 2, (y1 + y0) / 2
    xs = mx[..., None] + hx[..., None] * _GL_X
    ys = my[..., None] + hy[..., None] * _GL_X
    r2 = xs[..., :, None] ** 2 + ys[..., None, :] ** 2
    dens = 4 / (1 + r2) ** 2
    return hx * hy * np.einsum("...ij,i,j->...", dens, _GL_W, _GL_W)


def spherical_area(region) -> float:
    """Spherical measure of a DiskRegion, a Cap, a chart rectangle ``(x0, x1, y0, y1)``,
    ``"sphere"`` for the whole sphere or ``None`` for the empty set."""
    if region is None:
        return 0.0
    if isinstance(region, str):
        if region in ("sphere", "plane"):
            return 4 * np.pi
        raise GeometryError(f"unknown region {region!r}")
    if isinstance(region, DiskRegion):
        return Cap.from_region(region).area()
    if isinstance(region, Cap):
        return region.area()
    x0, x1, y0, y1 = region
    if not (x1 > x0 and y1 > y0):
        return 0.0
    # subdivide large rectangles so the fixed-order rule stays accurate
    nx = int(np.clip(np.ceil((x1 - x0) / 0.25), 1, 400))
    ny = int(np.clip(np.ceil((y1 - y0) / 0.25), 1, 400))
    xe, ye = np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1)
    X0, Y0 = np.meshgrid(xe[:-1], ye[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(xe[1:], ye[1:], indexing="ij")
    return float(cell_spherical_area(X0, X1, Y0, Y1).sum())


def region_gap(D1: DiskRegion | Cap, D2: DiskRegion | Cap) -> float:
    """Spherical distance between two closed disk regions; negative when they overlap
    (then it is minus the overlap depth along the axis-to-axis great circle)."""
    c1 = D1 if isinstance(D1, Cap) else Cap.from_region(D1)
    c2 = D2 if isinstance(D2, Cap) else Cap.from_region(D2)
    return _angle(c1.axis, c2.axis) - c1.theta - c2.theta


def region_contains(outer: DiskRegion | Cap, inner: DiskRegion | Cap, tol: float = 0.0) -> bool:
    """Whether the closed region ``inner`` lies in the closed region ``outer`` (spherical test)."""
    co = outer if isinstance(outer, Cap) else Cap.from_region(outer)
    ci = inner if isinstance(inner, Cap) else Cap.from_region(inner)
    return _angle(co.axis, ci.axis) + ci.theta <= co.theta + tol
