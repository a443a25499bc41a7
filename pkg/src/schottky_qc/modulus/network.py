"""Curve families on a chart grid and the weighted graph that discretizes them.

Free cells become graph nodes.  Each obstacle collapses to one node, so paths pay its
weight when they touch it.  Terminal cells (E and F) act as the source and the sink.
Edge conductances come from the isotropic nine-point stencil: every rectangle spanned by
four neighbouring cell centers spreads its Dirichlet energy over its two axis pairs and
its two diagonals.  An edge ending on a set cut across its segment gets its length
shortened to the free part, found by an exact crossing test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..annulus import Annulus
from ..geometry import Cap, DiskRegion, GeneralizedCircle, lift, spherical_dist
from .grid import GridSpec
from .shapes import Shape, as_shape, shape_distance

SOURCE = -2
SINK = -3

FREE, TERM_E, TERM_F, OBST, BLOCKED = 0, 1, 2, 3, -1

_MIN_FRAC = 1e-9


class InfiniteModulusError(ValueError):
    """E and F meet, so arbitrarily short connecting curves exist."""


class DiscretizationError(ValueError):
    """The grid is too coarse to keep the sets of the family apart."""


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """Curves in the closure of ``domain`` joining E to F.

    ``domain`` None means the complement of E ∪ F.  Obstacles are pairwise disjoint
    closed sets; ``count_mode`` decides whether a curve pays an obstacle's weight on every
    visit ("visit") or once however often it returns ("once")."""

    E: Shape
    F: Shape
    domain: Shape | None = None
    obstacles: tuple = ()
    count_mode: str = "visit"
    label: str = ""

    def __post_init__(self):
        if self.count_mode not in ("visit", "once"):
            raise ValueError("count_mode must be 'visit' or 'once'")

    @classmethod
    def connecting(cls, E, F, domain=None, obstacles=(), count_mode: str = "visit",
                   label: str = "") -> "FamilySpec":
        return cls(as_shape(E), as_shape(F), None if domain is None else as_shape(domain),
                   tuple(as_shape(K) for K in obstacles), count_mode, label)

    @classmethod
    def annulus(cls, A: Annulus, obstacles=(), count_mode: str = "visit") -> "FamilySpec":
        """Curves crossing A: from the inner closed disk to the outer complement."""
        if A.metric == "euclidean":
            E = DiskRegion(GeneralizedCircle.circle(A.center, A.r), True)
            F = DiskRegion(GeneralizedCircle.circle(A.center, A.R), False)
        else:
            u = lift(A.center)
            E = Cap(tuple(u), A.r)
            F = Cap(tuple(-u), np.pi - A.R)
        return cls.connecting(E, F, None, obstacles, count_mode, label="annulus")

    def without_obstacles(self) -> "FamilySpec":
        return FamilySpec(self.E, self.F, self.domain, (), self.count_mode, self.label)

    def with_obstacles(self, obstacles) -> "FamilySpec":
        return FamilySpec(self.E, self.F, self.domain, tuple(as_shape(K) for K in obstacles),
                          self.count_mode, self.label)


@dataclass(eq=False)
class Network:
    """Graph of a family on a grid.

    Node ids: 0..n_free-1 free cells, n_free+i obstacle i; SOURCE and SINK stand for E
    and F.  Per edge: endpoints (u, v), base conductance ``cond``, metric length
    ``length`` of the full center-to-center segment, and the free fraction ``frac`` of it
    that a path actually travels.  The effective conductance is cond/frac."""

    grid: GridSpec
    family: FamilySpec
    mode: str
    node_of_cell: np.ndarray  # (ny, nx) node id, SOURCE, SINK or -1 (blocked)
    kind: np.ndarray  # (ny, nx) FREE/TERM_E/TERM_F/OBST/BLOCKED
    n_free: int
    k: int
    u: np.ndarray
    v: np.ndarray
    cell_u: np.ndarray
    cell_v: np.ndarray
    cond: np.ndarray
    length: np.ndarray
    frac: np.ndarray
    touch_E: np.ndarray
    touch_F: np.ndarray
    direct: float = 0.0  # conductance of E-F edges (paths that never enter a free cell)
    extras: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.n_free + self.k

    @property
    def n_edges(self) -> int:
        return self.u.size

    @property
    def g(self) -> np.ndarray:
        return self.cond / self.frac

    @property
    def path_length(self) -> np.ndarray:
        return self.length * self.frac

    @property
    def mass_weight(self) -> np.ndarray:
        """Area carried by an edge: ρ_e² times this is its share of ∫ρ²."""
        return self.cond * self.length ** 2 * self.frac

    def free_cell_index(self) -> np.ndarray:
        """Flat cell index of each free node."""
        flat = self.node_of_cell.ravel()
        out = np.empty(self.n_free, dtype=np.int64)
        sel = (self.kind.ravel() == FREE)
        out[flat[sel]] = np.flatnonzero(sel)
        return out


def _stencil(grid: GridSpec):
    """Nine-point conductances: horizontal (ny, nx-1), vertical (ny-1, nx), and the two
    diagonal families (ny-1, nx-1): 'up' joins (i, j)-(i+1, j+1), 'down' (i+1, j)-(i, j+1)."""
    Hx = np.diff(grid.xc)[None, :]
    Hy = np.diff(grid.yc)[:, None]
    cd = np.minimum(Hx / Hy, Hy / Hx) / 6
    ch_el = (Hy / Hx - 2 * cd) / 2
    cv_el = (Hx / Hy - 2 * cd) / 2
    ny, nx = grid.shape
    ch = np.zeros((ny, nx - 1))
    cv = np.zeros((ny - 1, nx))
    ch[:-1] += ch_el
    ch[1:] += ch_el
    cv[:, :-1] += cv_el
    cv[:, 1:] += cv_el
    # half-cell strips along the grid boundary that no dual rectangle covers
    hx, hy = grid.hx, grid.hy
    ch[0] += (hy[0] / 2) / Hx[0]
    ch[-1] += (hy[-1] / 2) / Hx[0]
    cv[:, 0] += (hx[0] / 2) / Hy[:, 0]
    cv[:, -1] += (hx[-1] / 2) / Hy[:, 0]
    return ch, cv, cd.copy(), cd.copy()


def _edge_list(grid: GridSpec):
    ny, nx = grid.shape
    idx = np.arange(ny * nx).reshape(ny, nx)
    ch, cv, cdu, cdd = _stencil(grid)
    a = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel(), idx[:-1, :-1].ravel(),
                        idx[:-1, 1:].ravel()])
    b = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel(), idx[1:, 1:].ravel(),
                        idx[1:, :-1].ravel()])
    c = np.concatenate([ch.ravel(), cv.ravel(), cdu.ravel(), cdd.ravel()])
    return a, b, c


def _label_cells(grid: GridSpec, fam: FamilySpec, mode: str):
    X0, X1, Y0, Y1 = grid.cell_bounds()
    Z = grid.centers
    E, F = fam.E, fam.F
    meetE = E.meets_cells(X0, X1, Y0, Y1)
    meetF = F.meets_cells(X0, X1, Y0, Y1)
    inE, inF = E.contains(Z), F.contains(Z)
    omega = np.ones(Z.shape, bool) if fam.domain is None else fam.domain.contains(Z)
    omega &= ~inE & ~inF
    kind = np.full(Z.shape, BLOCKED)
    obst = np.full(Z.shape, -1)
    holes = np.zeros(Z.shape, bool)
    if mode == "transboundary":
        for i, K in enumerate(fam.obstacles):
            m = K.meets_cells(X0, X1, Y0, Y1)
            clash = m & (obst >= 0)
            if np.any(clash):
                j = int(obst[clash][0])
                raise DiscretizationError(f"grid too coarse: a cell meets obstacles {j} and {i}")
            obst[m] = i
    else:
        for K in fam.obstacles:
            holes |= K.meets_cells(X0, X1, Y0, Y1) if K.thin else K.contains(Z)
        omega &= ~holes
    isK = obst >= 0
    termE = meetE & (~omega | E.thin) & ~isK & ~holes
    termF = meetF & (~omega | F.thin) & ~isK & ~holes
    if np.any(termE & termF):
        raise DiscretizationError("grid too coarse: a cell meets both E and F")
    kind[omega] = FREE
    kind[termE] = TERM_E
    kind[termF] = TERM_F
    kind[isK] = OBST
    return kind, obst


def _fractions(shapes, sid_a, sid_b, za, zb):
    """Free fraction of segments za→zb, where sid_a / sid_b index into ``shapes`` (-1 for a
    free endpoint).  A free start leaves at 0; a free end is reached at 1."""
    s_exit = np.zeros(za.shape)
    s_enter = np.ones(za.shape)
    L = np.abs(zb - za)
    for k, S in enumerate(shapes):
        m = sid_a == k
        if np.any(m):
            t = S.crossing(zb[m], za[m])
            s_exit[m] = np.where(np.isnan(t), 0.0, 1.0 - t)
        m = sid_b == k
        if np.any(m):
            t = S.crossing(za[m], zb[m])
            fb = sid_a[m] < 0
            if np.any(np.isnan(t) & fb):
                # the cell meets the set but this segment misses it: use the distance
                d = S.distance(za[m]) / L[m]
                t = np.where(np.isnan(t) & fb, np.clip(d, _MIN_FRAC, 1.0), t)
            s_enter[m] = np.where(np.isnan(t), 1.0, t)
    return np.maximum(s_enter - s_exit, _MIN_FRAC)


def build_network(grid: GridSpec, fam: FamilySpec, mode: str = "transboundary",
                  contact_tol: float = 1e-12) -> Network:
    if mode not in ("classical", "transboundary"):
        raise ValueError("mode must be 'classical' or 'transboundary'")
    win = grid.window
    if shape_distance(fam.E, fam.F, win) <= contact_tol:
        raise InfiniteModulusError("E and F intersect: the family contains constant curves")
    obstacles = fam.obstacles if mode == "transboundary" else ()
    k = len(obstacles)
    for i in range(k):
        for j in range(i + 1, k):
            if shape_distance(obstacles[i], obstacles[j], win) <= contact_tol:
                raise ValueError(f"obstacles {i} and {j} are not disjoint")
    touch_E = np.array([shape_distance(K, fam.E, win) <= contact_tol for K in obstacles], bool)
    touch_F = np.array([shape_distance(K, fam.F, win) <= contact_tol for K in obstacles], bool)

    kind, obst = _label_cells(grid, fam, mode)
    ny, nx = grid.shape
    node = np.full((ny, nx), -1, dtype=np.int64)
    free = kind == FREE
    n_free = int(free.sum())
    node[free] = np.arange(n_free)
    node[kind == OBST] = n_free + obst[kind == OBST]
    node[kind == TERM_E] = SOURCE
    node[kind == TERM_F] = SINK

    a, b, c = _edge_list(grid)
    fk = kind.ravel()
    fn = node.ravel()
    keep = (fk[a] != BLOCKED) & (fk[b] != BLOCKED) & (fn[a] != fn[b])
    a, b, c = a[keep], b[keep], c[keep]
    # orient so a free endpoint comes first
    swap = (fk[b] == FREE) & (fk[a] != FREE)
    a, b = np.where(swap, b, a), np.where(swap, a, b)
    u, v = fn[a], fn[b]
    # obstacles in contact with a terminal are joined by constraints, not edges
    if k:
        ku = np.where(u >= n_free, u - n_free, -1)
        kv = np.where(v >= n_free, v - n_free, -1)
        drop = ((ku >= 0) & (((v == SOURCE) & touch_E[np.maximum(ku, 0)])
                             | ((v == SINK) & touch_F[np.maximum(ku, 0)])))
        drop |= ((kv >= 0) & (((u == SOURCE) & touch_E[np.maximum(kv, 0)])
                              | ((u == SINK) & touch_F[np.maximum(kv, 0)])))
        a, b, c, u, v = a[~drop], b[~drop], c[~drop], u[~drop], v[~drop]

    Zf = grid.centers.ravel()
    za, zb = Zf[a], Zf[b]
    shapes = (fam.E, fam.F) + tuple(obstacles)

    def sid(nodes):
        out = np.full(nodes.shape, -1)
        out[nodes == SOURCE] = 0
        out[nodes == SINK] = 1
        ob = nodes >= n_free
        out[ob] = 2 + nodes[ob] - n_free
        return out

    frac = _fractions(shapes, sid(u), sid(v), za, zb)
    if grid.metric == "euclidean":
        length = np.abs(zb - za)
    else:
        length = np.asarray(spherical_dist(za, zb), dtype=float)

    # direct E-F edges carry no unknowns: fold them into a constant
    ef = ((u == SOURCE) & (v == SINK)) | ((u == SINK) & (v == SOURCE))
    direct = float(np.sum(c[ef] / frac[ef]))
    m = ~ef
    net = Network(grid, fam, mode, node, kind, n_free, k, u[m], v[m], a[m], b[m], c[m],
                  length[m], frac[m], touch_E, touch_F, direct)
    net.extras["direct_edges"] = (a[ef], b[ef], c[ef], length[ef], frac[ef])
    return net


__all__ = ["DiscretizationError", "FamilySpec", "InfiniteModulusError", "Network", "SINK",
           "SOURCE", "build_network"]
