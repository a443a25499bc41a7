"""Closed planar sets used as terminals, domains and obstacles on a chart grid.

Disk regions (bounded disks, disk exteriors, half-planes) are handled analytically;
polygons and polylines go through shapely, which is exact for straight edges.
"""

from __future__ import annotations

import numpy as np
import shapely

from ..geometry import Cap, ContinuumSample, DiskRegion, GeometryError

_DISK_VERTICES = 4096


class Shape:
    thin = False  # measure-zero sets (curves)

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def meets_cells(self, x0, x1, y0, y1) -> np.ndarray:
        raise NotImplementedError

    def crossing(self, z0, z1) -> np.ndarray:
        """First parameter s in [0, 1] with z0 + s (z1 - z0) in the set, NaN if none."""
        raise NotImplementedError

    def distance(self, z) -> np.ndarray:
        raise NotImplementedError

    def geometry(self, window) -> shapely.Geometry:
        """shapely geometry clipped to ``window`` (x0, x1, y0, y1)."""
        raise NotImplementedError


class DiskShape(Shape):
    """A closed disk of the Riemann sphere seen in the chart: bounded disk, complement of
    an open disk, or closed half-plane."""

    def __init__(self, region: DiskRegion):
        self.region = region
        b = region.boundary
        self.kind = ("disk" if region.inside else "exterior") if b.kind == "circle" else "half"
        if b.kind == "circle":
            self.c, self.rho = b.center, b.radius
        else:
            # normalize to {Re(conj(n) z) <= t}
            self.n, self.t = (b.normal, b.offset) if region.inside else (-b.normal, -b.offset)

    def __repr__(self):
        return f"DiskShape({self.region!r})"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            return np.abs(z - self.c) <= self.rho
        if self.kind == "exterior":
            return np.abs(z - self.c) >= self.rho
        return (np.conj(self.n) * z).real <= self.t

    def meets_cells(self, x0, x1, y0, y1):
        if self.kind == "half":
            vals = [(np.conj(self.n) * (x + 1j * y)).real for x in (x0, x1) for y in (y0, y1)]
            return np.minimum.reduce(vals) <= self.t
        cx, cy = self.c.real, self.c.imag
        if self.kind == "disk":
            dx = np.maximum(np.maximum(x0 - cx, cx - x1), 0)
            dy = np.maximum(np.maximum(y0 - cy, cy - y1), 0)
            return np.hypot(dx, dy) <= self.rho
        dx = np.maximum(np.abs(x0 - cx), np.abs(x1 - cx))
        dy = np.maximum(np.abs(y0 - cy), np.abs(y1 - cy))
        return np.hypot(dx, dy) >= self.rho

    def crossing(self, z0, z1):
        z0 = np.asarray(z0, dtype=complex)
        d = np.asarray(z1, dtype=complex) - z0
        out = np.full(np.broadcast(z0, d).shape, np.nan)
        inside0 = self.contains(z0)
        if self.kind == "half":
            f0 = (np.conj(self.n) * z0).real - self.t
            fd = (np.conj(self.n) * d).real
            with np.errstate(divide="ignore", invalid="ignore"):
                s = -f0 / fd
            ok = (fd < 0) & (s >= 0) & (s <= 1)
            out = np.where(ok, s, out)
            return np.where(inside0, 0.0, out)
        w = z0 - self.c
        A = np.abs(d) ** 2
        B = (np.conj(w) * d).real
        C = np.abs(w) ** 2 - self.rho ** 2
        disc = B * B - A * C
        sq = np.sqrt(np.maximum(disc, 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            s_in = (-B - sq) / A  # entering the disk
            s_out = (-B + sq) / A  # leaving the disk
        if self.kind == "disk":
            ok = (disc >= 0) & (s_in >= 0) & (s_in <= 1)
            out = np.where(ok, s_in, out)
        else:
            ok = (disc >= 0) & (s_out >= 0) & (s_out <= 1)
            out = np.where(ok, s_out, out)
        return np.where(inside0, 0.0, out)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            return np.maximum(np.abs(z - self.c) - self.rho, 0)
        if self.kind == "exterior":
            return np.maximum(self.rho - np.abs(z - self.c), 0)
        return np.maximum((np.conj(self.n) * z).real - self.t, 0)

    def geometry(self, window):
        x0, x1, y0, y1 = window
        box = shapely.box(x0, y0, x1, y1)
        if self.kind == "half":
            big = 4 * (abs(x1 - x0) + abs(y1 - y0) + abs(x0) + abs(y0) + abs(self.t)) + 1
            n = self.n
            p = self.t * n
            tang = 1j * n
            pts = [p + big * tang, p - big * tang, p - big * tang - big * n, p + big * tang - big * n]
            return shapely.Polygon([(q.real, q.imag) for q in pts]).intersection(box)
        disk = shapely.Point(self.c.real, self.c.imag).buffer(self.rho, quad_segs=_DISK_VERTICES // 4)
        if self.kind == "disk":
            return disk
        return box.difference(disk)


class PolygonShape(Shape):
    """Closed polygonal region."""

    def __init__(self, vertices=None, geom=None):
        if geom is None:
            v = np.asarray(vertices, dtype=complex).ravel()
            geom = shapely.Polygon(np.c_[v.real, v.imag])
        self.poly = geom
        if not self.poly.is_valid or self.poly.area <= 0:
            raise GeometryError("invalid polygon")
        shapely.prepare(self.poly)

    @classmethod
    def from_geometry(cls, geom) -> "PolygonShape":
        """Any areal shapely geometry (polygon, multipolygon)."""
        return cls(geom=geom)

    @property
    def vertices(self) -> np.ndarray:
        xy = np.asarray(shapely.get_coordinates(shapely.get_exterior_ring(
            shapely.get_geometry(self.poly, 0))))
        return (xy[:-1, 0] + 1j * xy[:-1, 1])

    @classmethod
    def rect(cls, x0, x1, y0, y1) -> "PolygonShape":
        return cls([complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)])

    def __repr__(self):
        return f"PolygonShape({self.poly.geom_type}, area={self.poly.area:.4g})"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return shapely.intersects_xy(self.poly, z.real, z.imag)

    def meets_cells(self, x0, x1, y0, y1):
        boxes = shapely.box(x0, y0, x1, y1)
        return shapely.intersects(boxes, self.poly)

    def crossing(self, z0, z1):
        return _line_crossing(self.poly, z0, z1)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        return shapely.distance(shapely.points(z.real, z.imag), self.poly)

    def geometry(self, window):
        return self.poly


class PolylineShape(Shape):
    """A sampled continuum (arc or loop) taken as the polyline through its samples."""

    thin = True

    def __init__(self, sample: ContinuumSample):
        p = sample.points
        self.sample = sample
        if p.size == 1:
            self.geom = shapely.Point(p[0].real, p[0].imag)
        elif sample.closed:
            self.geom = shapely.LinearRing(np.c_[p.real, p.imag])
        else:
            self.geom = shapely.LineString(np.c_[p.real, p.imag])
        shapely.prepare(self.geom)

    def __repr__(self):
        return f"PolylineShape({self.sample.n} points)"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return shapely.distance(shapely.points(z.real, z.imag), self.geom) <= 1e-12

    def meets_cells(self, x0, x1, y0, y1):
        return shapely.intersects(shapely.box(x0, y0, x1, y1), self.geom)

    def crossing(self, z0, z1):
        return _line_crossing(self.geom, z0, z1)

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        return shapely.distance(shapely.points(z.real, z.imag), self.geom)

    def geometry(self, window):
        return self.geom


def _line_crossing(geom, z0, z1) -> np.ndarray:
    z0, z1 = np.broadcast_arrays(np.asarray(z0, dtype=complex), np.asarray(z1, dtype=complex))
    shape = z0.shape
    z0, z1 = z0.ravel(), z1.ravel()
    lines = shapely.linestrings(np.stack([np.c_[z0.real, z0.imag], np.c_[z1.real, z1.imag]], axis=1))
    inter = shapely.intersection(lines, geom)
    empty = shapely.is_empty(inter)
    d = shapely.distance(shapely.points(z0.real, z0.imag), inter)
    L = np.abs(z1 - z0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(empty | (L == 0), np.nan, d / L)
    return np.clip(s, 0, 1).reshape(shape) if s.size else s.reshape(shape)


def as_shape(obj) -> Shape:
    if isinstance(obj, Shape):
        return obj
    if isinstance(obj, DiskRegion):
        return DiskShape(obj)
    if isinstance(obj, Cap):
        return DiskShape(obj.to_region())
    if isinstance(obj, ContinuumSample):
        return PolylineShape(obj)
    if isinstance(obj, tuple) and len(obj) == 4:
        return PolygonShape.rect(*obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a planar set")


def transform_shape(S: Shape, m, samples: int = 1024) -> Shape:
    """Image of a shape under a (anti-)Möbius map.  Disk regions map exactly; polygon
    boundaries are resampled (about ``samples`` points) and mapped point by point."""
    from ..geometry import map_disk

    if isinstance(S, DiskShape):
        return DiskShape(map_disk(m, S.region))
    if isinstance(S, PolylineShape):
        p = S.sample.points
        if p.size > 1:
            p = _densify(p, S.sample.closed, samples)
        return PolylineShape(ContinuumSample(np.asarray(m(p)), S.sample.closed))
    if isinstance(S, PolygonShape):
        if S.poly.geom_type != "Polygon" or len(S.poly.interiors):
            raise GeometryError("only simple polygons can be transformed")
        q = np.asarray(m(_densify(S.vertices, True, samples)))
        if not np.all(np.isfinite(q)):
            raise GeometryError("polygon image passes through infinity")
        return PolygonShape(q)
    raise TypeError(f"cannot transform {type(S).__name__}")


def _densify(p: np.ndarray, closed: bool, samples: int) -> np.ndarray:
    q = np.r_[p, p[:1]] if closed else p
    seg = np.abs(np.diff(q))
    per = np.maximum(1, np.ceil(samples * seg / max(seg.sum(), 1e-300))).astype(int)
    pts = [q[i] + (q[i + 1] - q[i]) * np.arange(per[i]) / per[i] for i in range(seg.size)]
    if not closed:
        pts.append(q[-1:])
    return np.concatenate(pts)


def finite_extent(S: Shape):
    """Bounding box (x0, x1, y0, y1) of the finite boundary of a shape, None for a line."""
    if isinstance(S, DiskShape):
        if S.kind == "half":
            return None
        return (S.c.real - S.rho, S.c.real + S.rho, S.c.imag - S.rho, S.c.imag + S.rho)
    g = S.poly if isinstance(S, PolygonShape) else S.geom
    x0, y0, x1, y1 = g.bounds
    return (x0, x1, y0, y1)


def shape_distance(A: Shape, B: Shape, window) -> float:
    """Distance between two closed sets (exact for pairs of bounded disks)."""
    if isinstance(A, DiskShape) and isinstance(B, DiskShape) and A.kind == B.kind == "disk":
        return max(abs(A.c - B.c) - A.rho - B.rho, 0.0)
    return float(shapely.distance(A.geometry(window), B.geometry(window)))


__all__ = ["DiskShape", "PolygonShape", "PolylineShape", "Shape", "as_shape", "finite_extent",
           "shape_distance", "transform_shape"]
