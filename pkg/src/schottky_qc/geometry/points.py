"""Points of the Riemann sphere and the chordal / spherical metrics.

Internally, vectorised code carries points as complex numpy arrays in which
the point at infinity is encoded as ``complex(inf, 0)``.  The public
:class:`ExtendedPoint` value type wraps a single point with an explicit tag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Beyond this modulus formulas switch to the chart w = 1/z.
CHART_SWITCH = 1e3

_INF_C = complex(np.inf, 0.0)


@dataclass(frozen=True)
class ExtendedPoint:
    """A point of C ∪ {∞}.  Use :data:`INF` for the point at infinity."""

    value: complex = 0j
    at_infinity: bool = False

    def __post_init__(self):
        if self.at_infinity:
            # one canonical representation of infinity
            object.__setattr__(self, "value", 0j)
        else:
            v = complex(self.value)
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError("finite ExtendedPoint needs a finite coordinate; use INF")
            object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, z) -> "ExtendedPoint":
        if isinstance(z, ExtendedPoint):
            return z
        z = complex(z)
        if np.isinf(z.real) or np.isinf(z.imag):
            return INF
        return cls(z)

    def to_complex(self) -> complex:
        return _INF_C if self.at_infinity else self.value

    def __repr__(self) -> str:
        return "ExtendedPoint(∞)" if self.at_infinity else f"ExtendedPoint({self.value!r})"


INF = ExtendedPoint(0j, True)


def as_array(z) -> np.ndarray:
    """Convert points (ExtendedPoint, complex, sequences thereof) to a complex array."""
    if isinstance(z, ExtendedPoint):
        return np.asarray(z.to_complex(), dtype=complex)
    if isinstance(z, np.ndarray) and z.dtype != object:
        a = z.astype(complex, copy=False)
    elif isinstance(z, (list, tuple)):
        a = np.array([p.to_complex() if isinstance(p, ExtendedPoint) else complex(p) for p in z],
                     dtype=complex)
    else:
        a = np.asarray(z, dtype=complex)
    inf = np.isinf(a.real) | np.isinf(a.imag)
    if np.any(inf):
        a = np.where(inf, _INF_C, a)
    return a


def is_inf(a: np.ndarray) -> np.ndarray:
    return np.isinf(a.real) | np.isinf(a.imag)


def to_points(a) -> list[ExtendedPoint]:
    return [ExtendedPoint.of(v) for v in np.atleast_1d(as_array(a))]


def _scalar_out(x, *inputs):
    if all(np.ndim(as_array(i)) == 0 for i in inputs):
        return float(x)
    return x


def chordal_dist(z, w):
    """Chordal distance 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)), values in [0, 2]."""
    za, wa = np.broadcast_arrays(as_array(z), as_array(w))
    out = _chordal(za, wa)
    return _scalar_out(out, z, w)


def _chordal(za: np.ndarray, wa: np.ndarray) -> np.ndarray:
    zi, wi = is_inf(za), is_inf(wa)
    zf = np.where(zi, 0, za)
    wf = np.where(wi, 0, wa)
    az, aw = np.abs(zf), np.abs(wf)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 2 * np.abs(zf - wf) / (np.hypot(1, az) * np.hypot(1, aw))
        # both far out: use the inversion chart, where chi is unchanged
        uz = 1 / np.where(az > CHART_SWITCH, zf, 1)
        uw = 1 / np.where(aw > CHART_SWITCH, wf, 1)
        chart = 2 * np.abs(uz - uw) / (np.hypot(1, np.abs(uz)) * np.hypot(1, np.abs(uw)))
        # exactly one point at infinity
        to_inf_z = np.where(az > CHART_SWITCH, 2 * np.abs(uz) / np.hypot(1, np.abs(uz)),
                            2 / np.hypot(1, az))
        to_inf_w = np.where(aw > CHART_SWITCH, 2 * np.abs(uw) / np.hypot(1, np.abs(uw)),
                            2 / np.hypot(1, aw))
    far = (az > CHART_SWITCH) & (aw > CHART_SWITCH)
    out = np.where(far, chart, direct)
    out = np.where(wi & ~zi, to_inf_z, out)
    out = np.where(zi & ~wi, to_inf_w, out)
    out = np.where(zi & wi, 0.0, out)
    return np.minimum(out, 2.0)


def spherical_dist(z, w):
    """Great-circle distance on the unit sphere, 2·arcsin(chi/2), values in [0, pi]."""
    za, wa = np.broadcast_arrays(as_array(z), as_array(w))
    out = 2 * np.arcsin(np.minimum(_chordal(za, wa) / 2, 1.0))
    return _scalar_out(out, z, w)


def euclidean_dist(z, w):
    za, wa = np.broadcast_arrays(as_array(z), as_array(w))
    if np.any(is_inf(za) | is_inf(wa)):
        raise ValueError("Euclidean distance is undefined at infinity")
    return _scalar_out(np.abs(za - wa), z, w)


METRICS = {"spherical": spherical_dist, "chordal": chordal_dist, "euclidean": euclidean_dist}


def metric_fn(metric: str):
    try:
        return METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(METRICS)}") from None


def pairwise(zs, ws, metric: str = "spherical") -> np.ndarray:
    """Distance matrix between two point clouds."""
    za, wa = as_array(zs).ravel(), as_array(ws).ravel()
    return metric_fn(metric)(za[:, None], wa[None, :])


def lift(z) -> np.ndarray:
    """Inverse stereographic projection onto the unit sphere; ∞ goes to the north pole.

    Shape (..., 3).  |lift(z) - lift(w)| equals chordal_dist(z, w).
    """
    a = as_array(z)
    inf = is_inf(a)
    f = np.where(inf, 0, a)
    big = np.abs(f) > CHART_SWITCH
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(big, 1 / f, 0)
    s = 1 + np.abs(f) ** 2
    x = np.where(big, 2 * np.conj(u) / (1 + np.abs(u) ** 2), 2 * f / s)
    x3 = np.where(big, (1 - np.abs(u) ** 2) / (1 + np.abs(u) ** 2), (np.abs(f) ** 2 - 1) / s)
    x = np.where(inf, 0, x)
    x3 = np.where(inf, 1.0, x3)
    return np.stack([x.real, x.imag, x3], axis=-1)


def project(X: np.ndarray) -> np.ndarray:
    """Stereographic projection from the north pole (inverse of :func:`lift`)."""
    X = np.asarray(X, dtype=float)
    X = X / np.linalg.norm(X, axis=-1, keepdims=True)
    x1, x2, x3 = X[..., 0], X[..., 1], X[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        # (x1 + i x2)/(1 - x3) is cancellation-prone near the north pole; use (1 + x3)/(x1 - i x2)
        near = x3 > 0
        z = np.where(near, (1 + x3) / (x1 - 1j * x2), (x1 + 1j * x2) / (1 - x3))
    return np.where(np.isfinite(z), z, _INF_C)


def random_sphere_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """Points distributed uniformly for the spherical measure (as chart coordinates)."""
    X = rng.normal(size=(n, 3))
    return project(X)
