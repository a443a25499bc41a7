"""Star-like analytic loops: a center plus a truncated Fourier series for the radius."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline

from ..geometry import GeometryError


class LoopError(GeometryError):
    """A loop is not star-like about its center, or a fit failed."""


def lsq_circle(points) -> tuple[complex, float]:
    """Algebraic least-squares circle |z - c|² = R² through the points."""
    p = np.asarray(points, dtype=complex).ravel()
    m = p.mean()
    q = p - m
    A = np.column_stack([q.real, q.imag, np.ones(q.size)])
    sol, *_ = np.linalg.lstsq(A, np.abs(q) ** 2, rcond=None)
    c = complex(sol[0] / 2, sol[1] / 2)
    R = float(np.sqrt(sol[2] + abs(c) ** 2))
    return m + c, R


@dataclass(frozen=True, eq=False)
class AnalyticLoop:
    """The curve t ↦ center + r(t)·e^{it} with
    r(t) = cos_coeffs[0] + Σ_k cos_coeffs[k]·cos(kt) + sin_coeffs[k]·sin(kt)."""

    center: complex
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.cos_coeffs, dtype=float))
        b = np.atleast_1d(np.asarray(self.sin_coeffs, dtype=float))
        if a.size != b.size:
            raise LoopError("cosine and sine coefficient arrays must have equal length")
        b = b.copy()
        b[0] = 0.0
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)
        if self.min_radius() <= 0:
            raise LoopError("radius function must stay positive (loop not star-like)")

    # construction ------------------------------------------------------------------

    @classmethod
    def circle(cls, center, radius: float) -> "AnalyticLoop":
        return cls(center, np.array([float(radius)]), np.zeros(1))

    @classmethod
    def from_radius_function(cls, center, r, modes: int = 64, nodes: int | None = None
                             ) -> "AnalyticLoop":
        """Truncated Fourier interpolant of a positive 2π-periodic function r(t)."""
        n = nodes or 4 * modes
        t = 2 * np.pi * np.arange(n) / n
        c = np.fft.rfft(np.asarray(r(t), dtype=float)) / n
        m = min(modes, c.size - 1)
        a = np.r_[c[0].real, 2 * c[1:m + 1].real]
        b = np.r_[0.0, -2 * c[1:m + 1].imag]
        return cls(center, a, b)

    @classmethod
    def ellipse(cls, center, semi_x: float, semi_y: float, modes: int = 96) -> "AnalyticLoop":
        """Axis-aligned ellipse in polar form about its center."""
        return cls.from_radius_function(
            center, lambda t: semi_x * semi_y / np.hypot(semi_y * np.cos(t), semi_x * np.sin(t)),
            modes)

    @classmethod
    def perturbed_circle(cls, center, radius: float, amplitude: float, modes: int,
                         rng: np.random.Generator) -> "AnalyticLoop":
        """Circle with random Fourier noise: modes 2..modes+1 with total relative size
        ``amplitude`` (so circularity ≈ 2·amplitude at most)."""
        ca, cb = rng.normal(size=modes), rng.normal(size=modes)
        norm = np.sum(np.hypot(ca, cb))
        a = np.r_[radius, 0.0, amplitude * radius * ca / norm]
        b = np.r_[0.0, 0.0, amplitude * radius * cb / norm]
        return cls(center, a, b)

    @classmethod
    def fit(cls, points, modes: int | None = None, center=None,
            method: str = "lsq") -> tuple["AnalyticLoop", float]:
        """Fourier fit of a star-like sample cloud.

        ``method`` "lsq" is a least-squares fit in the polar angle; "spline" interpolates
        r(θ) by a periodic cubic spline, resamples it uniformly and truncates its FFT, which
        stays cheap for many modes.  The star center defaults to the least-squares circle
        center.  Returns the loop and the fit residual max |r_fit - r_sample| / mean radius.
        Raises LoopError if the polar angle of the ordered samples is not monotone."""
        p = np.asarray(points, dtype=complex).ravel()
        if p.size < 8:
            raise LoopError("need at least 8 samples to fit a loop")
        c = lsq_circle(p)[0] if center is None else complex(center)
        q = p - c
        rad = np.abs(q)
        if np.min(rad) <= 0:
            raise LoopError("star center lies on the sampled curve")
        ang = np.unwrap(np.angle(q))
        steps = np.diff(np.r_[ang, ang[0] + np.sign(ang[-1] - ang[0]) * 2 * np.pi])
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise LoopError("sample cloud is not star-like about its center")
        if abs(abs(ang[-1] - ang[0] + steps[-1]) - 2 * np.pi) > 1e-6:
            raise LoopError("sample cloud does not wind once around its center")
        m = modes if modes is not None else max(1, min(64, p.size // 6))
        if method == "spline":
            return cls._spline_fit(c, ang, rad, m)
        if method != "lsq":
            raise ValueError("method must be 'lsq' or 'spline'")
        k = np.arange(1, m + 1)
        A = np.column_stack([np.ones(p.size), np.cos(np.outer(ang, k)), np.sin(np.outer(ang, k))])
        sol, *_ = np.linalg.lstsq(A, rad, rcond=None)
        loop = cls(c, np.r_[sol[0], sol[1:m + 1]], np.r_[0.0, sol[m + 1:]])
        res = float(np.max(np.abs(A @ sol - rad)) / np.mean(rad))
        return loop, res

    @classmethod
    def _spline_fit(cls, c, ang, rad, m):
        if ang[-1] < ang[0]:
            ang, rad = ang[::-1], rad[::-1]
        start = ang[0]
        x = np.r_[ang - start, 2 * np.pi]
        y = np.r_[rad, rad[0]]
        spl = CubicSpline(x, y, bc_type="periodic")
        n = 4 * m
        t = 2 * np.pi * np.arange(n) / n
        cf = np.fft.rfft(spl(t)) / n
        # shift the series back by the start angle
        cf = cf * np.exp(-1j * np.arange(cf.size) * start)
        loop = cls(c, np.r_[cf[0].real, 2 * cf[1:m + 1].real], np.r_[0.0, -2 * cf[1:m + 1].imag])
        res = float(np.max(np.abs(loop.radius(ang) - rad)) / np.mean(rad))
        return loop, res

    # evaluation ---------------------------------------------------------------------

    @property
    def modes(self) -> int:
        return self.cos_coeffs.size - 1

    def _series(self, t, a, b, chunk: int = 2048) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        out = np.empty(flat.size)
        coef = a - 1j * b  # Re(Σ (a_k - i b_k) e^{ikt}) = Σ a_k cos kt + b_k sin kt
        for s in range(0, flat.size, chunk):
            e = np.exp(1j * flat[s:s + chunk])
            out[s:s + chunk] = P.polyval(e, coef).real
        return out.reshape(t.shape)

    def radius(self, t) -> np.ndarray:
        return self._series(t, self.cos_coeffs, self.sin_coeffs)

    def radius_derivative(self, t) -> np.ndarray:
        k = np.arange(self.cos_coeffs.size)
        return self._series(t, k * self.sin_coeffs, -k * self.cos_coeffs)

    def points(self, n: int = 512, t=None) -> np.ndarray:
        t = 2 * np.pi * np.arange(n) / n if t is None else np.asarray(t, dtype=float)
        return self.center + self.radius(t) * np.exp(1j * t)

    def min_radius(self, n: int = 2048) -> float:
        return float(np.min(self.radius(2 * np.pi * np.arange(n) / n)))

    def circularity(self, n: int = 2048) -> float:
        """(max r - min r) / mean r about the star center; zero iff a round circle."""
        n = max(n, 8 * self.modes + 8)
        r = self.radius(2 * np.pi * np.arange(n) / n)
        return float((r.max() - r.min()) / self.cos_coeffs[0])

    def contains(self, z) -> np.ndarray:
        """Strict interior of the loop."""
        q = np.asarray(z, dtype=complex) - self.center
        with np.errstate(invalid="ignore"):
            inside = np.abs(q) < self.radius(np.angle(q))
        return np.where(np.isfinite(q), inside, False)

    def distance_to(self, other: "AnalyticLoop", n: int = 1024) -> float:
        a, b = self.points(n), other.points(n)
        return float(np.min(np.abs(a[:, None] - b[None, :])))


def circle_loop_samples(center: complex, radius: float, n: int = 512) -> np.ndarray:
    return center + radius * np.exp(2j * np.pi * np.arange(n) / n)


__all__ = ["AnalyticLoop", "LoopError", "circle_loop_samples", "lsq_circle"]
