"""Public entry points: classical and transboundary modulus, certificates and checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec
from .network import FamilySpec, Network, build_network
from .paths import (_dijkstra, brute_force_modulus, path_graph, solve_paths)
from .potential import solve_potential
from .shapes import finite_extent, transform_shape

# graphs up to this many nodes go to the cutting-plane solver under method="auto"
CUTTING_PLANE_NODES = 64


@dataclass
class ModulusResult:
    """Discrete modulus with its extremal density.

    ``edge_density`` is ρ along each network edge and ``obstacle_weights`` the ρ(K_i).
    ``cell_density`` spreads the edge masses over grid cells so that
    Σ cell_density² · area + Σ weights² = ``mass``.  ``admissibility`` is the smallest
    ρ-length of any E-F path in the graph, so mass / admissibility² bounds the discrete
    modulus from above while ``estimate`` is the solver's value."""

    estimate: float
    mass: float
    mode: str
    method: str
    network: Network
    edge_density: np.ndarray
    obstacle_weights: np.ndarray
    cell_density: np.ndarray
    admissibility: float
    iterations: int
    seconds: float
    info: dict = field(default_factory=dict)

    @property
    def upper_bound(self) -> float:
        if self.admissibility <= 0:
            return np.inf
        return self.mass / self.admissibility ** 2

    def report(self) -> dict:
        return {
            "estimate": self.estimate, "mass": self.mass, "mode": self.mode,
            "method": self.method, "admissibility": self.admissibility,
            "upper_bound": self.upper_bound, "iterations": self.iterations,
            "seconds": self.seconds, "nodes": self.network.n_nodes,
            "edges": self.network.n_edges, "obstacle_weights": self.obstacle_weights.tolist(),
            **self.info,
        }


def _edge_costs(net: Network, rho: np.ndarray) -> np.ndarray:
    return rho * net.path_length


def shortest_rho_length(net: Network, rho: np.ndarray, weights: np.ndarray) -> float:
    """Minimum over discrete E-F paths of the ρ-length (obstacle weights per visit)."""
    pg = path_graph(net)
    cost = np.zeros(pg.eu.size)
    nE = net.n_edges
    cost[:nE] = _edge_costs(net, rho)
    # direct E-F edges, if any, carry density from the solver through ``info``
    d = net.extras.get("direct_rho")
    if d is not None and d.size:
        cost[nE:nE + d.size] = d * net.extras["direct_edges"][3] * net.extras["direct_edges"][4]
    wnode = np.zeros(pg.n + 2)
    wnode[pg.n_free:pg.n_free + pg.k] = weights
    if net.family.count_mode == "once" and net.k:
        from .paths import shortest_path

        L, _, _ = shortest_path(pg, cost, weights, "once")
        return float(L)
    dist, _ = _dijkstra(pg.indptr, pg.nbr, pg.eid, cost, wnode, pg.source, pg.sink)
    return float(dist[pg.sink])


def _cell_density(net: Network, rho: np.ndarray) -> np.ndarray:
    ny, nx = net.grid.shape
    m = net.mass_weight * rho ** 2
    acc = np.bincount(net.cell_u, m / 2, ny * nx) + np.bincount(net.cell_v, m / 2, ny * nx)
    de = net.extras.get("direct_edges")
    dr = net.extras.get("direct_rho")
    if de is not None and dr is not None and dr.size:
        a, b, c, ell, fr = de
        md = c * ell ** 2 * fr * dr ** 2
        acc += np.bincount(a, md / 2, ny * nx) + np.bincount(b, md / 2, ny * nx)
    area = net.grid.cell_area().ravel()
    return np.sqrt(acc / area).reshape(ny, nx)


def _pick_method(net: Network, method: str) -> str:
    if method != "auto":
        return method
    if net.family.count_mode == "once" and net.k:
        return "cutting-plane"
    return "cutting-plane" if net.n_nodes <= CUTTING_PLANE_NODES else "potential"


def _solve(net: Network, method: str, tol: float) -> ModulusResult:
    t0 = time.perf_counter()
    method = _pick_method(net, method)
    info: dict = {}
    if net.n_edges == 0 and net.direct == 0:
        rho = np.zeros(0)
        y = np.zeros(net.k)
        est, it, L = 0.0, 0, np.inf
    elif method == "potential":
        if net.family.count_mode == "once" and net.k:
            raise ValueError("the potential solver handles per-visit counting only")
        sol = solve_potential(net, tol=tol)
        with np.errstate(invalid="ignore", divide="ignore"):
            rho = np.where(net.path_length > 0, sol.drop / net.path_length, 0.0)
        y = np.maximum(sol.b - sol.a, 0.0)
        de = net.extras.get("direct_edges")
        if de is not None and de[2].size:
            net.extras["direct_rho"] = 1.0 / (de[3] * de[4])
        est, it = sol.value, sol.iterations
        info.update(grad_norm=sol.grad_norm, contact_violation=sol.contact_violation)
        L = shortest_rho_length(net, rho, y)
    elif method == "cutting-plane":
        sol = solve_paths(net, tol=tol)
        pg = path_graph(net)
        nE = net.n_edges
        # ρ_e = z_e / sqrt(W_e)
        W = net.mass_weight
        rho = sol.z[:nE] / np.sqrt(W)
        nd = pg.n_var - nE
        if nd:
            a, b, c, ell, fr = net.extras["direct_edges"]
            net.extras["direct_rho"] = sol.z[nE:pg.n_var] / np.sqrt(c * ell ** 2 * fr)
        y = sol.z[pg.n_var:]
        est, it, L = sol.value, sol.iterations, sol.shortest
        info.update(paths=int(sol.rows.shape[0]))
    elif method == "enumeration":
        out = brute_force_modulus(net)
        if out is None:
            raise ValueError("too many simple paths to enumerate")
        est, z, npaths = out
        pg = path_graph(net)
        nE = net.n_edges
        rho = z[:nE] / np.sqrt(net.mass_weight)
        y = z[pg.n_var:]
        if pg.n_var > nE:
            a, b, c, ell, fr = net.extras["direct_edges"]
            net.extras["direct_rho"] = z[nE:pg.n_var] / np.sqrt(c * ell ** 2 * fr)
        it = 1
        info.update(paths=npaths)
        L = shortest_rho_length(net, rho, y)
    else:
        raise ValueError(f"unknown method {method!r}")
    cell = _cell_density(net, rho) if rho.size else np.zeros(net.grid.shape)
    area = net.grid.cell_area()
    mass = float(np.sum(cell ** 2 * area) + np.sum(y ** 2))
    return ModulusResult(float(est), mass, net.mode, method, net, rho, y, cell, float(L), it,
                         time.perf_counter() - t0, info)


def classical_modulus(grid: GridSpec, fam: FamilySpec, method: str = "auto",
                      tol: float = 1e-10) -> ModulusResult:
    """Modulus of curves joining E to F in the domain with every obstacle removed."""
    return _solve(build_network(grid, fam, "classical"), method, tol)


def transboundary_modulus(grid: GridSpec, fam: FamilySpec, method: str = "auto",
                          tol: float = 1e-10) -> ModulusResult:
    """Modulus where curves may run through obstacles, paying ρ(K_i) each time."""
    return _solve(build_network(grid, fam, "transboundary"), method, tol)


def random_path_check(res: ModulusResult, n_paths: int = 1000, seed: int = 0,
                      greed: float = 0.75) -> dict:
    """ρ-lengths of random E-F walks drawn independently of the solver.

    Each walk starts at a random neighbour of E and steps to a random neighbour, with
    probability ``greed`` restricted to neighbours strictly closer (in hops) to F; loops
    are erased.  Returns min, median and the fraction of walks of length >= 1 - 1e-3."""
    net = res.network
    pg = path_graph(net)
    nE = net.n_edges
    cost = np.zeros(pg.eu.size)
    cost[:nE] = _edge_costs(net, res.edge_density)
    d = net.extras.get("direct_rho")
    if d is not None and d.size:
        cost[nE:nE + d.size] = d * net.extras["direct_edges"][3] * net.extras["direct_edges"][4]
    hop, _ = _dijkstra(pg.indptr, pg.nbr, pg.eid, np.ones(pg.eu.size), np.zeros(pg.n + 2),
                       pg.sink, -1)
    rng = np.random.default_rng(seed)
    starts = [int(pg.nbr[p]) for p in range(pg.indptr[pg.source], pg.indptr[pg.source + 1])]
    start_e = [int(pg.eid[p]) for p in range(pg.indptr[pg.source], pg.indptr[pg.source + 1])]
    if not starts:
        return {"min": np.inf, "median": np.inf, "fraction_ok": 1.0, "paths": 0}
    lengths = []
    w = res.obstacle_weights
    once = net.family.count_mode == "once"
    for _ in range(n_paths):
        j = rng.integers(len(starts))
        x, edges, nodes = starts[j], [start_e[j]], [pg.source, starts[j]]
        for _step in range(50 * (pg.n + 2)):
            if x == pg.sink:
                break
            lo, hi = pg.indptr[x], pg.indptr[x + 1]
            nb, eids = pg.nbr[lo:hi], pg.eid[lo:hi]
            ok = nb != pg.source
            closer = ok & (hop[nb] < hop[x])
            pool = np.flatnonzero(closer if (closer.any() and rng.random() < greed) else ok)
            p = int(rng.choice(pool))
            y = int(nb[p])
            if y in nodes:  # erase the loop
                cut = nodes.index(y)
                nodes, edges = nodes[:cut + 1], edges[:cut]
            else:
                nodes.append(y)
                edges.append(int(eids[p]))
            x = y
        if x != pg.sink:
            continue
        L = float(cost[np.array(edges)].sum())
        ob = [v - pg.n_free for v in nodes if pg.n_free <= v < pg.n_free + pg.k]
        L += float(w[sorted(set(ob))].sum() if once else w[ob].sum()) if ob else 0.0
        lengths.append(L)
    arr = np.array(lengths)
    return {"min": float(arr.min()), "median": float(np.median(arr)),
            "fraction_ok": float(np.mean(arr >= 1 - 1e-3)), "paths": int(arr.size)}


def auto_grid(fam: FamilySpec, n: int, metric: str = "euclidean", pad: float = 0.08) -> GridSpec:
    """Square-celled grid over the bounding box of the finite boundaries of the family."""
    boxes = [finite_extent(S) for S in (fam.E, fam.F, fam.domain, *fam.obstacles) if S is not None]
    boxes = [b for b in boxes if b is not None]
    if not boxes:
        raise ValueError("the family has no bounded part to frame")
    x0 = min(b[0] for b in boxes)
    x1 = max(b[1] for b in boxes)
    y0 = min(b[2] for b in boxes)
    y1 = max(b[3] for b in boxes)
    side = max(x1 - x0, y1 - y0) * (1 + 2 * pad)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    return GridSpec.uniform((cx - side / 2, cx + side / 2, cy - side / 2, cy + side / 2), n, metric)


def transform_family(fam: FamilySpec, m) -> FamilySpec:
    dom = None if fam.domain is None else transform_shape(fam.domain, m)
    return FamilySpec(transform_shape(fam.E, m), transform_shape(fam.F, m), dom,
                      tuple(transform_shape(K, m) for K in fam.obstacles), fam.count_mode,
                      fam.label)


def invariance_check(grid: GridSpec, fam: FamilySpec, m, grid_after: GridSpec | None = None,
                     mode: str = "transboundary") -> dict:
    """Relative change |Mod' - Mod| / Mod of the modulus under a (anti-)Möbius map m.

    ``grid_after`` defaults to a grid of the same resolution framing the image."""
    solve = transboundary_modulus if mode == "transboundary" else classical_modulus
    before = solve(grid, fam)
    fam2 = transform_family(fam, m)
    g2 = grid_after or auto_grid(fam2, max(grid.shape), grid.metric)
    after = solve(g2, fam2)
    dev = abs(after.estimate - before.estimate) / before.estimate if before.estimate else 0.0
    return {"before": before.estimate, "after": after.estimate, "deviation": dev}


def _rotation_to(u: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Rotation taking unit vector u to unit vector t (about their common normal)."""
    from scipy.spatial.transform import Rotation

    axis = np.cross(u, t)
    s = np.linalg.norm(axis)
    if s < 1e-15:
        if np.dot(u, t) > 0:
            return np.eye(3)
        perp = np.cross(u, [1.0, 0, 0] if abs(u[0]) < 0.9 else [0, 1.0, 0])
        return Rotation.from_rotvec(np.pi * perp / np.linalg.norm(perp)).as_matrix()
    ang = np.arctan2(s, np.dot(u, t))
    return Rotation.from_rotvec(axis / s * ang).as_matrix()


def rotation_invariance(E, F, obstacles, rotations: int = 20, n: int = 256, seed: int = 0,
                        spread: float = 0.6, mode: str = "transboundary") -> dict:
    """Transboundary modulus of a cap configuration under random sphere rotations.

    E, F and obstacles are Caps.  After each random rotation the configuration is turned
    again so that the axis of E lands at a random point within ``spread`` radians of the
    chart origin, which keeps the region between E and F inside a bounded chart window
    (the grid never has to reach the excluded neighbourhood of ∞).  Returns the base value
    (E centered at the origin), all rotated values and the largest relative deviation."""
    from ..geometry import random_rotation

    rng = np.random.default_rng(seed)
    south = np.array([0.0, 0.0, -1.0])
    solve = transboundary_modulus if mode == "transboundary" else classical_modulus

    def value(R):
        caps = [c.rotated(R) for c in (E, F, *obstacles)]
        fam = FamilySpec.connecting(caps[0], caps[1], None, caps[2:])
        return solve(auto_grid(fam, n, "spherical"), fam).estimate

    base = value(_rotation_to(np.asarray(E.axis), south))
    vals = []
    for _ in range(rotations):
        Q = random_rotation(rng)
        u = Q @ np.asarray(E.axis)
        # target: random direction within `spread` of the south pole
        phi = rng.uniform(0, 2 * np.pi)
        th = spread * np.sqrt(rng.uniform())
        t = np.array([np.sin(th) * np.cos(phi), np.sin(th) * np.sin(phi), -np.cos(th)])
        vals.append(value(_rotation_to(u, t) @ Q))
    vals = np.array(vals)
    return {"base": base, "values": vals.tolist(),
            "max_deviation": float(np.max(np.abs(vals - base)) / base)}


def compare_report(grid: GridSpec, fam: FamilySpec, tau: float | None = None) -> dict:
    """min{1, classical} / transboundary on one grid.  With ``tau`` every disk or sampled
    continuum obstacle must pass the τ-fatness test; polygons are not tested."""
    if tau is not None:
        from ..geometry import fatness_test
        from .shapes import DiskShape, PolylineShape

        for i, K in enumerate(fam.obstacles):
            target = (K.region if isinstance(K, DiskShape)
                      else K.sample if isinstance(K, PolylineShape) else None)
            if target is not None:
                r = fatness_test(target, tau)
                if not r.passed:
                    raise ValueError(f"obstacle {i} fails the fatness test at tau={tau}")
    cl = classical_modulus(grid, fam)
    tb = transboundary_modulus(grid, fam)
    ratio = min(1.0, cl.estimate) / tb.estimate if tb.estimate > 0 else np.inf
    return {"classical": cl.estimate, "transboundary": tb.estimate, "ratio": ratio}


def compare_suite(configs: int = 100, tau: float = 1 / np.pi, seed: int = 0,
                  n: int = 64) -> dict:
    """compare_report over random disk-obstacle scenes; the maximum ratio is the empirical
    comparison constant for τ-fat obstacles."""
    from .scenes import random_disk_obstacles, random_family

    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(configs):
        grid, fam = random_family(rng)
        k = int(rng.integers(1, 5))
        obs = random_disk_obstacles(rng, (-1.0, 1.0, -1.0, 1.0), (fam.E, fam.F), k, 0.06, 0.25, 0.05)
        ratios.append(compare_report(grid, fam.with_obstacles(obs), tau)["ratio"])
    r = np.array(ratios)
    return {"configs": configs, "tau": tau, "seed": seed, "max_ratio": float(r.max()),
            "ratios": r.tolist()}


def loewner_sweep(deltas=(0.5, 1.0, 2.0, 4.0), configs: int = 8, seed: int = 0,
                  n: int = 96) -> dict:
    """Transboundary modulus of two unit segments at relative distance Δ with random disk
    obstacles.  The per-Δ minima are fitted by a decreasing EmpiricalProfile φ̂ (lower
    envelope); ``above`` says every sample lies on or above φ̂ and φ̂ is positive."""
    from ..profile import EmpiricalProfile
    from .scenes import loewner_scene

    rng = np.random.default_rng(seed)
    args, vals = [], []
    for d in deltas:
        for _ in range(configs):
            grid, fam = loewner_scene(float(d), rng, n)
            args.append(float(d))
            vals.append(transboundary_modulus(grid, fam).estimate)
    prof = EmpiricalProfile(np.array(args), np.array(vals), "decreasing", "lower")
    above = bool(np.all(prof.values >= prof.envelope - 1e-12) and np.all(prof.envelope > 0))
    return {"profile": prof, "above": above, "deltas": list(map(float, deltas)),
            "minima": [float(min(v for a, v in zip(args, vals) if a == d)) for d in deltas]}


def brute_force_check(grid: GridSpec, fam: FamilySpec, mode: str = "transboundary",
                      limit: int = 200_000) -> dict:
    """Cutting-plane against exhaustive enumeration of all simple E-F paths."""
    net = build_network(grid, fam, mode)
    out = brute_force_modulus(net, limit)
    if out is None:
        return {"enumerated": False}
    exact, _, npaths = out
    cp = _solve(build_network(grid, fam, mode), "cutting-plane", 1e-12)
    rel = abs(cp.estimate - exact) / max(exact, 1e-300)
    return {"enumerated": True, "paths": npaths, "exact": exact, "cutting_plane": cp.estimate,
            "relative_error": rel if exact else abs(cp.estimate)}


__all__ = ["ModulusResult", "auto_grid", "brute_force_check", "classical_modulus",
           "compare_report", "compare_suite", "loewner_sweep", "invariance_check", "random_path_check", "rotation_invariance", "shortest_rho_length",
           "transboundary_modulus", "transform_family"]
