"""Path formulation: minimize mass subject to every E-F path having ρ-length at least 1.

Variables are z = (√W_e ρ_e, y_i), so the mass is |z|² and a path's ρ-length is linear in z.
Constraints are generated lazily by a shortest-path oracle (cutting planes).  Each
restricted problem is a least-distance program, solved through its NNLS dual.
``brute_force_modulus`` enumerates every simple path instead.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import nnls

from .network import SINK, SOURCE, Network


@dataclass
class PathGraph:
    """Network edges plus direct E-F edges and zero-cost contact links, as an undirected
    graph on nodes 0..n-1 with source n and sink n+1.  ``var`` maps an edge to its
    density variable, -1 for contact links."""

    n: int
    k: int
    n_free: int
    eu: np.ndarray
    ev: np.ndarray
    var: np.ndarray
    inv_sqrt_g: np.ndarray  # per variable: ρ-length of the edge per unit z
    indptr: np.ndarray
    nbr: np.ndarray
    eid: np.ndarray
    n_var: int
    extras: dict = field(default_factory=dict)

    @property
    def source(self) -> int:
        return self.n

    @property
    def sink(self) -> int:
        return self.n + 1


def path_graph(net: Network) -> PathGraph:
    n = net.n_nodes
    src, snk = n, n + 1
    da, db, dc, dl, dfr = net.extras.get("direct_edges", (np.zeros(0, int),) * 2 + (np.zeros(0),) * 3)
    remap = lambda x: np.where(x == SOURCE, src, np.where(x == SINK, snk, x))
    eu = np.concatenate([remap(net.u), np.full(dc.size, src)])
    ev = np.concatenate([remap(net.v), np.full(dc.size, snk)])
    g = np.concatenate([net.g, dc / dfr]) if dc.size else net.g.copy()
    nvar = g.size
    var = np.arange(nvar)
    te = np.flatnonzero(net.touch_E) + net.n_free
    tf = np.flatnonzero(net.touch_F) + net.n_free
    eu = np.concatenate([eu, np.full(te.size, src), tf]).astype(np.int64)
    ev = np.concatenate([ev, te, np.full(tf.size, snk)]).astype(np.int64)
    var = np.concatenate([var, np.full(te.size + tf.size, -1)]).astype(np.int64)
    N = n + 2
    ends = np.concatenate([eu, ev])
    other = np.concatenate([ev, eu])
    ids = np.concatenate([np.arange(eu.size), np.arange(eu.size)])
    order = np.argsort(ends, kind="stable")
    indptr = np.zeros(N + 1, np.int64)
    np.add.at(indptr, ends + 1, 1)
    indptr = np.cumsum(indptr)
    return PathGraph(n, net.k, net.n_free, eu, ev, var, 1 / np.sqrt(g), indptr,
                     other[order].astype(np.int64), ids[order].astype(np.int64), nvar)


@numba.njit(cache=True)
def _dijkstra(indptr, nbr, eid, wedge, wnode, src, snk):
    N = indptr.size - 1
    dist = np.full(N, np.inf)
    pred = np.full(N, -1, np.int64)
    done = np.zeros(N, np.bool_)
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        if x == snk and snk >= 0:
            break
        for p in range(indptr[x], indptr[x + 1]):
            y = nbr[p]
            if done[y]:
                continue
            nd = d + wedge[eid[p]] + wnode[y]
            if nd < dist[y]:
                dist[y] = nd
                pred[y] = eid[p]
                heapq.heappush(heap, (nd, y))
    return dist, pred


@numba.njit(cache=True)
def _dijkstra_once(indptr, nbr, eid, wedge, wobst, n_free, k, src, snk):
    """Shortest path over states (node, set of obstacles already paid for)."""
    N = indptr.size - 1
    S = 1 << k
    dist = np.full(N * S, np.inf)
    pred = np.full(N * S, -1, np.int64)
    pedge = np.full(N * S, -1, np.int64)
    done = np.zeros(N * S, np.bool_)
    start = src * S
    dist[start] = 0.0
    heap = [(0.0, start)]
    best = -1
    while heap:
        d, st = heapq.heappop(heap)
        if done[st]:
            continue
        done[st] = True
        x = st // S
        mask = st % S
        if x == snk:
            best = st
            break
        for p in range(indptr[x], indptr[x + 1]):
            y = nbr[p]
            nm = mask
            add = 0.0
            if y >= n_free and y < n_free + k:
                bit = 1 << (y - n_free)
                if (mask & bit) == 0:
                    add = wobst[y - n_free]
                    nm = mask | bit
            ns = y * S + nm
            if done[ns]:
                continue
            nd = d + wedge[eid[p]] + add
            if nd < dist[ns]:
                dist[ns] = nd
                pred[ns] = st
                pedge[ns] = eid[p]
                heapq.heappush(heap, (nd, ns))
    return dist, pred, pedge, best


def shortest_path(pg: PathGraph, edge_cost: np.ndarray, obst_cost: np.ndarray,
                  mode: str = "visit"):
    """(length, edge ids along the path, obstacle counts) of the cheapest E-F path."""
    wnode = np.zeros(pg.n + 2)
    if mode == "visit" or pg.k == 0:
        wnode[pg.n_free:pg.n_free + pg.k] = obst_cost
        dist, pred = _dijkstra(pg.indptr, pg.nbr, pg.eid, edge_cost, wnode, pg.source, pg.sink)
        L = dist[pg.sink]
        if not np.isfinite(L):
            return np.inf, None, None
        edges = []
        x = pg.sink
        while x != pg.source:
            e = pred[x]
            edges.append(e)
            x = pg.eu[e] if pg.ev[e] == x else pg.ev[e]
        edges = np.array(edges[::-1], np.int64)
        return float(L), edges, _visit_counts(pg, edges)
    if pg.k > 12:
        raise ValueError("'once' counting supports at most 12 obstacles")
    dist, pred, pedge, best = _dijkstra_once(pg.indptr, pg.nbr, pg.eid, edge_cost, obst_cost,
                                             pg.n_free, pg.k, pg.source, pg.sink)
    if best < 0:
        return np.inf, None, None
    S = 1 << pg.k
    edges = []
    st = best
    while pred[st] >= 0:
        edges.append(pedge[st])
        st = pred[st]
    counts = np.array([(best % S >> i) & 1 for i in range(pg.k)], float)
    return float(dist[best]), np.array(edges[::-1], np.int64), counts


def _row(pg: PathGraph, edges: np.ndarray, counts: np.ndarray) -> np.ndarray:
    row = np.zeros(pg.n_var + pg.k)
    v = pg.var[edges]
    v = v[v >= 0]
    np.add.at(row, v, pg.inv_sqrt_g[v])
    row[pg.n_var:] = counts
    return row


def least_distance(G: np.ndarray) -> np.ndarray | None:
    """Minimum-norm z with G z >= 1; None if infeasible.

    Small systems go through the NNLS dual, which is exact.  Larger ones use an interior
    point QP, then re-solve exactly on the rows it finds active."""
    m, n = G.shape
    if m * n <= 40_000:
        return _ldp_nnls(G)
    z = _ldp_clarabel(G)
    if z is None:
        return _ldp_nnls(G)
    return _polish(G, z)


def _ldp_nnls(G: np.ndarray) -> np.ndarray | None:
    m, n = G.shape
    Emat = np.vstack([G.T, np.ones((1, m))])
    f = np.zeros(n + 1)
    f[n] = 1.0
    w, _ = nnls(Emat, f, maxiter=50 * (n + m + 10))
    r = Emat @ w - f
    if abs(r[n]) < 1e-14:
        return None
    return -r[:n] / r[n]


def _ldp_clarabel(G: np.ndarray) -> np.ndarray | None:
    import clarabel
    import scipy.sparse as sp

    m, n = G.shape
    P = sp.identity(n, format="csc")
    q = np.zeros(n)
    A = sp.csc_matrix(-G)
    b = -np.ones(m)
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = settings.tol_gap_rel = 1e-12
    settings.tol_feas = 1e-12
    sol = clarabel.DefaultSolver(P, q, A, b, [clarabel.NonnegativeConeT(m)], settings).solve()
    if str(sol.status) not in ("Solved", "AlmostSolved"):
        return None
    return np.asarray(sol.x)


def _polish(G: np.ndarray, z: np.ndarray) -> np.ndarray:
    slack = G @ z - 1
    act = np.flatnonzero(slack <= 1e-7 * max(1.0, float(np.abs(z).max())))
    if act.size == 0:
        return z
    Ga = G[act]
    lam, *_ = np.linalg.lstsq(Ga @ Ga.T, np.ones(act.size), rcond=None)
    if np.all(lam >= -1e-12):
        zp = Ga.T @ lam
        if np.all(G @ zp >= 1 - 1e-12):
            return zp
    return z


@dataclass
class PathSolution:
    z: np.ndarray
    value: float
    rows: np.ndarray
    shortest: float
    iterations: int
    edge_cost: np.ndarray  # ρ-length per graph edge
    obst_cost: np.ndarray


def _costs(pg: PathGraph, z: np.ndarray):
    ec = np.zeros(pg.eu.size)
    has = pg.var >= 0
    ec[has] = z[pg.var[has]] * pg.inv_sqrt_g[pg.var[has]]
    return np.maximum(ec, 0.0), np.maximum(z[pg.n_var:], 0.0)


def _tree_path(pg: PathGraph, pred, start: int, stop: int) -> list[int]:
    out = []
    x = start
    while x != stop:
        e = pred[x]
        out.append(e)
        x = pg.eu[e] if pg.ev[e] == x else pg.ev[e]
    return out


def _violated_paths(pg: PathGraph, ec, oc, tol: float, batch: int):
    """Up to ``batch`` short E-F walks through distinct edges, each of ρ-length < 1 - tol,
    built from shortest-path trees rooted at the source and at the sink."""
    wnode = np.zeros(pg.n + 2)
    wnode[pg.n_free:pg.n_free + pg.k] = oc
    dS, pS = _dijkstra(pg.indptr, pg.nbr, pg.eid, ec, wnode, pg.source, -1)
    dT, pT = _dijkstra(pg.indptr, pg.nbr, pg.eid, ec, wnode, pg.sink, -1)
    L = dS[pg.sink]
    if not np.isfinite(L):
        return np.inf, []
    # dT counts the node cost of its start; the source side counts its own end node
    through = np.minimum(dS[pg.eu] + ec + dT[pg.ev], dS[pg.ev] + ec + dT[pg.eu])
    cand = np.flatnonzero(through < 1 - tol)
    cand = cand[np.argsort(through[cand], kind="stable")]
    out, seen = [], set()
    for e in cand:
        x, y = int(pg.eu[e]), int(pg.ev[e])
        if dS[x] + dT[y] > dS[y] + dT[x]:
            x, y = y, x
        edges = _tree_path(pg, pS, x, pg.source)[::-1] + [int(e)] + _tree_path(pg, pT, y, pg.sink)
        key = tuple(edges)
        if key in seen:
            continue
        seen.add(key)
        out.append(np.array(edges, np.int64))
        if len(out) >= batch:
            break
    return float(L), out


def _visit_counts(pg: PathGraph, edges: np.ndarray) -> np.ndarray:
    nodes = np.concatenate([pg.eu[edges], pg.ev[edges]])
    counts = np.zeros(pg.k)
    # every obstacle node entered is an endpoint of two consecutive path edges
    ob = nodes[(nodes >= pg.n_free) & (nodes < pg.n_free + pg.k)] - pg.n_free
    np.add.at(counts, ob, 0.5)
    return counts


def solve_paths(net: Network, tol: float = 1e-10, max_iter: int = 2000,
                batch: int = 25) -> PathSolution:
    pg = path_graph(net)
    mode = net.family.count_mode
    nz = pg.n_var + pg.k
    z = np.zeros(nz)
    rows: list[np.ndarray] = []
    seen = set()
    L = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        ec, oc = _costs(pg, z)
        if mode == "visit" or pg.k == 0:
            L, walks = _violated_paths(pg, ec, oc, tol, batch)
            new = [_row(pg, w, _visit_counts(pg, w)) for w in walks]
        else:
            L, edges, counts = shortest_path(pg, ec, oc, mode)
            new = [] if edges is None or L >= 1 - tol else [_row(pg, edges, counts)]
        if not np.isfinite(L):
            return PathSolution(z * 0, 0.0, np.zeros((0, nz)), np.inf, it, ec, oc)
        if L >= 1 - tol:
            break
        fresh = [r for r in new if r.tobytes() not in seen]
        if not fresh:
            break  # numerically stuck on rows the restricted optimum already sees
        for r in fresh:
            seen.add(r.tobytes())
            rows.append(r)
        z = least_distance(np.array(rows))
        if z is None:
            raise RuntimeError("restricted path problem infeasible")
    ec, oc = _costs(pg, z)
    return PathSolution(z, float(z @ z), np.array(rows), float(L), it, ec, oc)


def count_simple_paths(pg: PathGraph, limit: int) -> int:
    """Number of simple source-sink edge paths, stopping once ``limit`` is exceeded."""
    return _count(pg, limit, collect=False)[0]


def _count(pg: PathGraph, limit: int, collect: bool):
    N = pg.n + 2
    on = np.zeros(N, bool)
    found = 0
    paths = []
    stack_e: list[int] = []
    src, snk = pg.source, pg.sink
    indptr, nbr, eid = pg.indptr, pg.nbr, pg.eid

    # iterative DFS over (node, next adjacency slot)
    on[src] = True
    frames = [[src, indptr[src]]]
    while frames:
        fr = frames[-1]
        x, p = fr
        if p >= indptr[x + 1]:
            frames.pop()
            on[x] = False
            if stack_e:
                stack_e.pop()
            continue
        fr[1] = p + 1
        y = nbr[p]
        if on[y]:
            continue
        if y == snk:
            found += 1
            if collect:
                paths.append(np.array(stack_e + [eid[p]], np.int64))
            if found > limit:
                return found, paths
            continue
        if y == src:
            continue
        on[y] = True
        stack_e.append(eid[p])
        frames.append([y, indptr[y]])
    return found, paths


def brute_force_modulus(net: Network, limit: int = 200_000):
    """Exact discrete modulus from all simple E-F paths, or None when there are more than
    ``limit`` of them.  Returns (value, z, number of paths)."""
    pg = path_graph(net)
    found, paths = _count(pg, limit, collect=True)
    if found > limit:
        return None
    if found == 0:
        return 0.0, np.zeros(pg.n_var + pg.k), 0
    G = np.empty((found, pg.n_var + pg.k))
    for r, edges in enumerate(paths):
        counts = _visit_counts(pg, edges)
        if net.family.count_mode == "once":
            counts = np.minimum(counts, 1.0)
        G[r] = _row(pg, edges, counts)
    G = np.unique(G, axis=0)
    z = least_distance(G)
    return float(z @ z), z, found


__all__ = ["PathGraph", "PathSolution", "brute_force_modulus", "count_simple_paths",
           "least_distance", "path_graph", "shortest_path", "solve_paths"]
