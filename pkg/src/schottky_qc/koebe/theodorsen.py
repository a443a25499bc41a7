"""Conformal maps of near-circular star-like regions by Theodorsen's conjugate-function
iteration.

For a curve ρ(θ)e^{iθ} about 0, the map f from the unit disk onto its interior with
f(0) = 0, f'(0) > 0 satisfies f(e^{iφ}) = ρ(θ(φ)) e^{iθ(φ)}, where the boundary
correspondence solves θ(φ) = φ + K[log ρ(θ(φ))] and K is the periodic conjugate-function
(Hilbert) operator.  The same data give log(f(w)/w) as a power series, and the inverse
map by a barycentric Cauchy integral over the boundary nodes, polished by Newton steps.

Exterior regions are handled through ζ = 1/(z - center), which turns the outside of a
star-like loop into the inside of the star-like curve ρ(θ) = 1/r(-θ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .loops import AnalyticLoop, LoopError

CIRCULARITY_LIMIT = 0.3


class DivergenceError(LoopError):
    """The conjugate-function iteration stopped contracting."""


def conjugate(u: np.ndarray) -> np.ndarray:
    """Periodic conjugate function of samples on a uniform grid (Nyquist term dropped)."""
    n = u.size
    c = np.fft.fft(u)
    k = np.fft.fftfreq(n, 1.0 / n)
    c = -1j * np.sign(k) * c
    if n % 2 == 0:
        c[n // 2] = 0.0
    return np.fft.ifft(c).real


def _radius_fn(loop: AnalyticLoop, side: str):
    if side == "interior":
        return loop.radius, loop.radius_derivative
    if side == "exterior":
        return (lambda th: 1.0 / loop.radius(-th),
                lambda th: loop.radius_derivative(-th) / loop.radius(-th) ** 2)
    raise ValueError("side must be 'interior' or 'exterior'")


def _iterate(rho, n: int, max_iter: int, tol: float):
    phi = 2 * np.pi * np.arange(n) / n
    theta = phi.copy()
    trace = []
    for it in range(1, max_iter + 1):
        new = phi + conjugate(np.log(rho(theta)))
        step = float(np.max(np.abs(new - theta)))
        theta = new
        trace.append(step)
        if step <= tol:
            break
        if it > 50 and step > trace[it - 51]:
            raise DivergenceError(
                f"conjugate-function iteration diverging: step {step:.3e} after {it} iterations "
                f"vs {trace[it - 51]:.3e} fifty iterations earlier")
        if it > 5 and step >= trace[-2] and step < 1e-13:
            break  # stalled at roundoff
    residual = float(np.max(np.abs(theta - phi - conjugate(np.log(rho(theta))))))
    return phi, theta, residual, len(trace)


@dataclass(frozen=True, eq=False)
class RiemannMap:
    """Conformal map of the interior (or exterior) of ``loop`` onto the unit disk (or the
    exterior of the unit circle), fixing center ↦ 0 (or ∞ ↦ ∞) with positive derivative."""

    loop: AnalyticLoop
    side: str
    phi: np.ndarray
    theta: np.ndarray
    series: np.ndarray  # power series of log(f(w)/w)
    residual: float
    iterations: int

    @property
    def nodes(self) -> int:
        return self.phi.size

    # the disk map f and its derivative --------------------------------------------

    def disk_to_curve(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        return w * np.exp(P.polyval(w, self.series))

    def _disk_derivative(self, w) -> np.ndarray:
        F = P.polyval(w, self.series)
        dF = P.polyval(w, P.polyder(self.series))
        return np.exp(F) * (1 + w * dF)

    def _curve_to_disk(self, zeta: np.ndarray, newton: int = 3, chunk: int = 256) -> np.ndarray:
        nodes = self.disk_to_curve(np.exp(1j * self.phi))
        eph = np.exp(1j * self.phi)
        dnodes = 1j * eph * self._disk_derivative(eph)
        out = np.empty(zeta.shape, dtype=complex)
        flat, res = zeta.ravel(), out.reshape(-1)
        for s in range(0, flat.size, chunk):
            z = flat[s:s + chunk]
            d = nodes[None, :] - z[:, None]
            hit = np.abs(d) == 0
            with np.errstate(divide="ignore", invalid="ignore"):
                q = dnodes[None, :] / d
                w = (q @ eph) / q.sum(axis=1)
            if hit.any():
                r, c = np.nonzero(hit)
                w[r] = eph[c]
            res[s:s + chunk] = w
        for _ in range(newton):
            step = (self.disk_to_curve(out) - zeta) / self._disk_derivative(out)
            cand = out - step
            ok = np.isfinite(cand) & (np.abs(cand) <= 1 + 1e-12)
            out = np.where(ok, cand, out)
        return out

    # region coordinates ----------------------------------------------------------

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        c = self.loop.center
        if self.side == "interior":
            return self._curve_to_disk(z - c)
        inf = ~np.isfinite(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            zeta = np.where(inf, 0, 1 / np.where(inf, 1, z - c))
        w = self._curve_to_disk(zeta)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1 / w
        return np.where(inf | (w == 0), complex(np.inf, 0), out)

    def inverse(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        c = self.loop.center
        if self.side == "interior":
            return c + self.disk_to_curve(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            return c + 1 / self.disk_to_curve(1 / w)

    # boundary correspondence -----------------------------------------------------

    def disk_angle(self, theta) -> np.ndarray:
        """φ with θ(φ) = theta (inverse boundary correspondence), by Newton on the
        trigonometric interpolant of θ(φ) - φ."""
        theta = np.asarray(theta, dtype=float)
        n = self.nodes
        g_hat = np.fft.fft(self.theta - self.phi) / n
        k = np.fft.fftfreq(n, 1.0 / n)
        if n % 2 == 0:
            g_hat[n // 2] = 0.0
        base = np.floor(theta / (2 * np.pi)) * 2 * np.pi
        t0 = theta - base
        ext_th = np.r_[self.theta - 2 * np.pi, self.theta, self.theta + 2 * np.pi]
        ext_ph = np.r_[self.phi - 2 * np.pi, self.phi, self.phi + 2 * np.pi]
        phi = np.interp(t0, ext_th, ext_ph)
        for _ in range(4):
            e = np.exp(1j * np.multiply.outer(phi, k))
            g = (e @ g_hat).real
            dg = (e @ (1j * k * g_hat)).real
            phi = phi - (phi + g - t0) / (1 + dg)
        return phi + base

    def boundary_image(self, t) -> np.ndarray:
        """Image of the loop point at parameter t (on the unit circle)."""
        t = np.asarray(t, dtype=float)
        if self.side == "interior":
            return np.exp(1j * self.disk_angle(t))
        return np.exp(-1j * self.disk_angle(-t))


def riemann_step(loop: AnalyticLoop, side: str = "exterior", k: int | None = None,
                 tol: float = 1e-15, max_iter: int = 1000) -> RiemannMap:
    """Map the interior or exterior of a near-circular loop onto the unit disk or its
    exterior.  ``k`` fixes 2^k nodes; by default k grows from 8 until the spectrum of
    log ρ(θ(φ)) has decayed to roundoff (k <= 15)."""
    circ = loop.circularity()
    if circ >= CIRCULARITY_LIMIT:
        raise LoopError(f"loop circularity {circ:.3f} exceeds the conjugate-function "
                        f"threshold {CIRCULARITY_LIMIT}")
    rho, _ = _radius_fn(loop, side)
    ks = [k] if k is not None else range(8, 16)
    for kk in ks:
        n = 2 ** kk
        phi, theta, residual, its = _iterate(rho, n, max_iter, tol)
        u = np.log(rho(theta))
        c = np.fft.rfft(u) / n
        tail = float(np.max(np.abs(c[n // 4:])))
        if k is not None or tail <= 1e-15 * max(1.0, abs(c[0])):
            break
    series = np.r_[c[0].real, 2 * c[1:n // 2]]
    return RiemannMap(loop, side, phi, theta, series, residual, its)


def self_convergence(loop: AnalyticLoop, side: str = "exterior", k: int = 9) -> float:
    """Max change of the boundary correspondence θ(φ) at shared nodes when the node
    count doubles from 2^k to 2^(k+1)."""
    a = riemann_step(loop, side, k)
    b = riemann_step(loop, side, k + 1)
    return float(np.max(np.abs(b.theta[::2] - a.theta)))


__all__ = ["CIRCULARITY_LIMIT", "DivergenceError", "RiemannMap", "conjugate", "riemann_step",
           "self_convergence"]
