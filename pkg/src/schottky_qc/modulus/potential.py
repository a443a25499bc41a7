"""Potential (dual) formulation of the discrete transboundary modulus.

Free nodes carry a potential π with π = 0 on E and π = 1 on F.  Obstacle i carries an
interval [a_i, b_i] of potentials that it may bridge at price (b_i - a_i)².  The modulus
is the minimum of the convex piecewise quadratic

    Σ g_e Δ_e² + Σ (b_i - a_i)²,

where Δ_e is the distance between the potential sets at the two ends of edge e: a point,
an obstacle interval, or the fixed value 0 or 1 at a terminal.  Without obstacles this is
the classical Dirichlet energy.  Optimal intervals satisfy a ≤ b automatically, so no
ordering constraint is imposed.  Obstacles touching E (or F) are held to a ≤ 0 (b ≥ 1)
by a stiff one-sided penalty.

The minimizer is found by a semismooth Newton method with an exact line search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .network import SINK, SOURCE, Network

CONTACT_STIFFNESS = 1e8


@dataclass
class _Terms:
    """Residuals r_t = c1 x[i1] + c2 x[i2] + d, penalized by g r² (all t) or g r₊²
    (hinge terms).  ``edge`` maps a term to its network edge, -1 for per-obstacle terms."""

    i1: np.ndarray
    c1: np.ndarray
    i2: np.ndarray
    c2: np.ndarray
    d: np.ndarray
    g: np.ndarray
    hinge: np.ndarray
    edge: np.ndarray

    def residual(self, x):
        return self.c1 * x[self.i1] + self.c2 * x[self.i2] + self.d

    def direction(self, dx):
        return self.c1 * dx[self.i1] + self.c2 * dx[self.i2]


def _terms(net: Network, stiffness: float) -> tuple[_Terms, int]:
    nf, k = net.n_free, net.k
    A = lambda i: nf + i
    B = lambda i: nf + k + i
    cols = {key: [] for key in ("i1", "c1", "i2", "c2", "d", "g", "hinge", "edge")}

    def add(i1, c1, i2, c2, d, g, hinge, edge):
        n = np.broadcast(i1, i2, d, g, edge).shape
        for key, val in (("i1", i1), ("c1", c1), ("i2", i2), ("c2", c2), ("d", d), ("g", g),
                         ("hinge", hinge), ("edge", edge)):
            cols[key].append(np.broadcast_to(np.asarray(val), n).astype(
                bool if key == "hinge" else (np.int64 if key in ("i1", "i2", "edge") else float)))

    u, v, g = net.u.copy(), net.v.copy(), net.g
    eid = np.arange(u.size)
    # put obstacles before terminals so every pair below is (free|obstacle, anything)
    sw = (u < 0) & (v >= 0)
    u, v = np.where(sw, v, u), np.where(sw, u, v)
    fu, fv = (u >= 0) & (u < nf), (v >= 0) & (v < nf)
    ku, kv = u >= nf, v >= nf
    zero = np.zeros(u.size, np.int64)

    m = fu & fv
    add(u[m], 1.0, v[m], -1.0, 0.0, g[m], False, eid[m])
    for term, val in ((SOURCE, 0.0), (SINK, 1.0)):
        m = fu & (v == term)
        add(u[m], 1.0, zero[m], 0.0, -val, g[m], False, eid[m])
    # free - obstacle: (a - π)₊² + (π - b)₊²
    m = fu & kv
    i = v[m] - nf
    add(A(i), 1.0, u[m], -1.0, 0.0, g[m], True, eid[m])
    add(u[m], 1.0, B(i), -1.0, 0.0, g[m], True, eid[m])
    # obstacle - terminal: dist(val, [a, b])²
    for term, val in ((SOURCE, 0.0), (SINK, 1.0)):
        m = ku & (v == term)
        i = u[m] - nf
        add(A(i), 1.0, zero[m], 0.0, -val, g[m], True, eid[m])
        add(B(i), -1.0, zero[m], 0.0, val, g[m], True, eid[m])
    # obstacle - obstacle: interval gap
    m = ku & kv
    i, j = u[m] - nf, v[m] - nf
    add(A(j), 1.0, B(i), -1.0, 0.0, g[m], True, eid[m])
    add(A(i), 1.0, B(j), -1.0, 0.0, g[m], True, eid[m])
    if k:
        ii = np.arange(k)
        add(B(ii), 1.0, A(ii), -1.0, 0.0, 1.0, False, -1)
        big = stiffness * max(1.0, float(g.max()) if g.size else 1.0)
        te, tf = np.flatnonzero(net.touch_E), np.flatnonzero(net.touch_F)
        add(A(te), 1.0, np.zeros(te.size, np.int64), 0.0, 0.0, big, True, -1)
        add(B(tf), -1.0, np.zeros(tf.size, np.int64), 0.0, 1.0, big, True, -1)
    T = _Terms(**{key: np.concatenate(val) if val else np.zeros(0) for key, val in cols.items()})
    return T, nf + 2 * k


@dataclass
class PotentialSolution:
    x: np.ndarray
    pi: np.ndarray
    a: np.ndarray
    b: np.ndarray
    value: float  # the minimum (discrete modulus)
    drop: np.ndarray  # Δ_e per network edge
    iterations: int
    grad_norm: float
    contact_violation: float


def _objective(T: _Terms, r):
    act = ~T.hinge | (r > 0)
    return float(np.sum(T.g[act] * r[act] ** 2)), act


def solve_potential(net: Network, tol: float = 1e-11, max_iter: int = 200,
                    stiffness: float = CONTACT_STIFFNESS) -> PotentialSolution:
    T, n = _terms(net, stiffness)
    x = np.full(n, 0.5)
    nterm = T.g.size
    prev = None
    it = 0
    gscale = float(np.max(T.g)) if nterm else 1.0
    for it in range(1, max_iter + 1):
        r = T.residual(x)
        J, act = _objective(T, r)
        w = 2 * T.g * act
        grad = (np.bincount(T.i1, w * r * T.c1, n) + np.bincount(T.i2, w * r * T.c2, n))
        gnorm = float(np.max(np.abs(grad))) if n else 0.0
        key = np.packbits(act).tobytes()
        if prev is not None and key == prev and gnorm <= tol * gscale:
            break
        prev = key
        rows = np.concatenate([T.i1, T.i1, T.i2, T.i2])
        colz = np.concatenate([T.i1, T.i2, T.i1, T.i2])
        vals = np.concatenate([w * T.c1 * T.c1, w * T.c1 * T.c2, w * T.c2 * T.c1, w * T.c2 * T.c2])
        H = sp.csc_matrix((vals, (rows, colz)), shape=(n, n))
        diag = H.diagonal()
        reg = 1e-13 * (float(diag.max()) if n else 1.0)
        H = H + sp.diags(np.where(diag > 0, reg, 1.0))
        dx = spsolve(H, -grad)
        s = _line_search(T, r, T.direction(dx))
        x = x + s * dx
        if s == 1.0 and gnorm <= tol * gscale:
            prev = None  # require one confirming pass with a stable active set
    r = T.residual(x)
    J, act = _objective(T, r)
    w = 2 * T.g * act
    grad = np.bincount(T.i1, w * r * T.c1, n) + np.bincount(T.i2, w * r * T.c2, n)
    nf, k = net.n_free, net.k
    e = T.edge >= 0
    drop2 = np.bincount(T.edge[e], np.where(act[e], r[e] ** 2, 0.0), net.n_edges)
    a, b = x[nf:nf + k], x[nf + k:]
    viol = 0.0
    if k:
        viol = max(float(np.max(np.where(net.touch_E, a, -np.inf), initial=0.0)),
                   float(np.max(np.where(net.touch_F, 1 - b, -np.inf), initial=0.0)))
    return PotentialSolution(x, x[:nf], a, b, J + net.direct, np.sqrt(drop2), it,
                             float(np.max(np.abs(grad))) if n else 0.0, viol)


def _line_search(T: _Terms, r, dr) -> float:
    """Minimizer over s ∈ (0, 1] of the objective along the step (exact up to bisection
    precision; the derivative is monotone and piecewise linear in s)."""

    def dphi(s):
        rs = r + s * dr
        act = ~T.hinge | (rs > 0)
        return float(np.sum(T.g[act] * rs[act] * dr[act]))

    if dphi(1.0) <= 0:
        return 1.0
    lo, hi = 0.0, 1.0
    flo, fhi = dphi(lo), dphi(hi)
    if flo >= 0:
        return 1e-3  # not a descent direction numerically; take a tiny safe step
    for _ in range(60):
        mid = lo + (hi - lo) * min(max(-flo / (fhi - flo), 0.05), 0.95)
        fm = dphi(mid)
        if abs(fm) <= 1e-15 * (abs(flo) + abs(fhi)):
            return mid
        if fm < 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo < 1e-14:
            break
    return hi


__all__ = ["PotentialSolution", "solve_potential"]
