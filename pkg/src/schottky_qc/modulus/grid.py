"""Tensor-product chart grids with Euclidean or spherical cell measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import cell_spherical_area


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Cells [xedges[i], xedges[i+1]] × [yedges[j], yedges[j+1]]; cell id = j·nx + i."""

    xedges: np.ndarray
    yedges: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        xe = np.asarray(self.xedges, dtype=float)
        ye = np.asarray(self.yedges, dtype=float)
        if xe.size < 3 or ye.size < 3:
            raise ValueError("grid needs at least 2x2 cells")
        if np.any(np.diff(xe) <= 0) or np.any(np.diff(ye) <= 0):
            raise ValueError("grid edges must be strictly increasing")
        if self.metric not in ("euclidean", "spherical"):
            raise ValueError(f"unknown metric {self.metric!r}")
        object.__setattr__(self, "xedges", xe)
        object.__setattr__(self, "yedges", ye)

    @classmethod
    def uniform(cls, rect, n, metric: str = "euclidean") -> "GridSpec":
        x0, x1, y0, y1 = rect
        nx, ny = (n, n) if np.isscalar(n) else n
        return cls(np.linspace(x0, x1, int(nx) + 1), np.linspace(y0, y1, int(ny) + 1), metric)

    @classmethod
    def square_cells(cls, rect, h: float, metric: str = "euclidean") -> "GridSpec":
        """Uniform grid with (nearly) square cells of side about h covering rect."""
        x0, x1, y0, y1 = rect
        nx = max(2, int(round((x1 - x0) / h)))
        ny = max(2, int(round((y1 - y0) / h)))
        return cls.uniform(rect, (nx, ny), metric)

    @classmethod
    def graded(cls, rect, n, focus=None, hmin=None, metric: str = "euclidean") -> "GridSpec":
        """Edges refined geometrically toward focus = (fx, fy) (either may be None) down to
        spacing hmin near the focus, with n cells per axis in total."""
        x0, x1, y0, y1 = rect
        nx, ny = (n, n) if np.isscalar(n) else n
        fx, fy = (None, None) if focus is None else focus
        return cls(_graded_axis(x0, x1, int(nx), fx, hmin), _graded_axis(y0, y1, int(ny), fy, hmin),
                   metric)

    @classmethod
    def sphere_chart(cls, n, excluded_cap: float = 0.1) -> "GridSpec":
        """Spherical grid over the square |x|, |y| <= cot(c/2): it covers the sphere minus
        (at most) the cap of angular radius c about ∞."""
        L = 1.0 / np.tan(excluded_cap / 2)
        return cls.uniform((-L, L, -L, L), n, "spherical")

    @property
    def nx(self) -> int:
        return self.xedges.size - 1

    @property
    def ny(self) -> int:
        return self.yedges.size - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.ny, self.nx

    @property
    def window(self) -> tuple[float, float, float, float]:
        return self.xedges[0], self.xedges[-1], self.yedges[0], self.yedges[-1]

    @property
    def hx(self) -> np.ndarray:
        return np.diff(self.xedges)

    @property
    def hy(self) -> np.ndarray:
        return np.diff(self.yedges)

    @property
    def xc(self) -> np.ndarray:
        return (self.xedges[1:] + self.xedges[:-1]) / 2

    @property
    def yc(self) -> np.ndarray:
        return (self.yedges[1:] + self.yedges[:-1]) / 2

    @property
    def centers(self) -> np.ndarray:
        return self.xc[None, :] + 1j * self.yc[:, None]

    def cell_bounds(self):
        """(x0, x1, y0, y1) arrays of shape (ny, nx)."""
        X0, Y0 = np.meshgrid(self.xedges[:-1], self.yedges[:-1])
        X1, Y1 = np.meshgrid(self.xedges[1:], self.yedges[1:])
        return X0, X1, Y0, Y1

    def cell_area(self) -> np.ndarray:
        X0, X1, Y0, Y1 = self.cell_bounds()
        if self.metric == "euclidean":
            return (X1 - X0) * (Y1 - Y0)
        return cell_spherical_area(X0, X1, Y0, Y1)

    def total_area(self) -> float:
        return float(self.cell_area().sum())

    def refined(self, factor: int = 2) -> "GridSpec":
        def sub(e):
            t = np.linspace(0, 1, factor + 1)[:-1]
            return np.concatenate([(e[:-1, None] + np.diff(e)[:, None] * t).ravel(), e[-1:]])

        return GridSpec(sub(self.xedges), sub(self.yedges), self.metric)


def _graded_axis(a: float, b: float, n: int, focus, hmin) -> np.ndarray:
    if focus is None or hmin is None or hmin >= (b - a) / n:
        return np.linspace(a, b, n + 1)
    if not (a < focus < b):
        raise ValueError("focus must lie strictly inside the axis range")
    L1, L2 = focus - a, b - focus
    n1 = min(max(1, int(round(n * L1 / (L1 + L2)))), n - 1)
    left = _stretched(L1, n1, hmin)
    right = _stretched(L2, n - n1, hmin)
    return np.concatenate([focus - left[::-1], focus + right[1:]])


def _stretched(L: float, m: int, h0: float) -> np.ndarray:
    """m cells on [0, L], first one about h0 wide, sizes growing like sinh."""
    from scipy.optimize import brentq

    s = np.linspace(0, 1, m + 1)
    if h0 >= L / m:
        return L * s
    first = lambda beta: L * np.sinh(beta / m) / np.sinh(beta) - h0
    beta = brentq(first, 1e-9, 700.0)
    return L * np.sinh(beta * s) / np.sinh(beta)


__all__ = ["GridSpec"]
