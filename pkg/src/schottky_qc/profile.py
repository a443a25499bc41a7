"""Monotone empirical profiles for distortion functions that have no closed form."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import isotonic_regression


@dataclass(frozen=True)
class EmpiricalProfile:
    """Sampled (argument, bound) pairs with a monotone isotonic fit.

    ``direction`` is "increasing" or "decreasing".  ``fitted`` holds the isotonic
    least-squares fit evaluated at the sorted arguments; ``envelope`` is the tightest
    monotone curve lying on the requested side of every sample ("upper" for bounds from
    above, "lower" for bounds from below)."""

    arguments: np.ndarray
    values: np.ndarray
    direction: str = "increasing"
    side: str = "upper"
    fitted: np.ndarray = field(init=False)
    envelope: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError("direction must be 'increasing' or 'decreasing'")
        if self.side not in ("upper", "lower"):
            raise ValueError("side must be 'upper' or 'lower'")
        x = np.asarray(self.arguments, dtype=float).ravel()
        y = np.asarray(self.values, dtype=float).ravel()
        if x.size != y.size or x.size == 0:
            raise ValueError("need matching, nonempty argument and value arrays")
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
        inc = self.direction == "increasing"
        fit = isotonic_regression(y, increasing=inc).x
        # upper envelope of an increasing profile is a running max from the left, etc.
        acc = np.maximum.accumulate if self.side == "upper" else np.minimum.accumulate
        from_left = (self.side == "upper") == inc
        env = acc(y) if from_left else acc(y[::-1])[::-1]
        object.__setattr__(self, "arguments", x)
        object.__setattr__(self, "values", y)
        object.__setattr__(self, "fitted", fit)
        object.__setattr__(self, "envelope", env)

    def is_monotone(self, curve: np.ndarray | None = None) -> bool:
        c = self.fitted if curve is None else np.asarray(curve)
        d = np.diff(c)
        return bool(np.all(d >= -1e-12) if self.direction == "increasing" else np.all(d <= 1e-12))

    def __call__(self, t, which: str = "fitted") -> np.ndarray:
        """Piecewise-linear interpolation of the fit (or envelope), clamped at the ends."""
        curve = self.fitted if which == "fitted" else self.envelope
        return np.interp(t, self.arguments, curve)

    def as_rows(self) -> list[tuple[float, float, float, float]]:
        return [(float(a), float(v), float(f), float(e)) for a, v, f, e in
                zip(self.arguments, self.values, self.fitted, self.envelope)]


__all__ = ["EmpiricalProfile"]
