"""Ready-made families: the narrow passage between two blobs, small toy grids for
exhaustive cross-checks, and seeded random scenes for the comparison suites."""

from __future__ import annotations

import numpy as np
import shapely

from ..geometry import ContinuumSample, DiskRegion, GeneralizedCircle
from .grid import GridSpec
from .network import FamilySpec
from .shapes import PolygonShape, PolylineShape


def narrow_passage(gap: float, half_height: float = 0.3) -> FamilySpec:
    """Box [-1, 1]², E the top side region, F the bottom one, and two blobs
    [-1, -gap/2] × [-h, h] and [gap/2, 1] × [-h, h] leaving a passage of width ``gap``."""
    if not 0 < gap < 1:
        raise ValueError("gap must lie in (0, 1)")
    h = half_height
    E = PolygonShape.rect(-1.0, 1.0, 1.0, 2.0)
    F = PolygonShape.rect(-1.0, 1.0, -2.0, -1.0)
    dom = PolygonShape.rect(-1.0, 1.0, -1.0, 1.0)
    left = PolygonShape.rect(-1.0, -gap / 2, -h, h)
    right = PolygonShape.rect(gap / 2, 1.0, -h, h)
    return FamilySpec(E, F, dom, (left, right), label=f"narrow passage gap={gap:g}")


def narrow_passage_grid(gap: float, n: int = 160, half_height: float = 0.3) -> GridSpec:
    """Graded tensor grid: x refined toward the passage so cells there are <= gap/4, y
    refined toward the blob edges.  One ghost row beyond each terminal side."""
    from .grid import _graded_axis

    hmin = gap / 4
    xe = _graded_axis(-1.0, 1.0, n, 0.0, hmin)
    # place the focus between edges so no grid line coincides with the passage walls
    yl = _graded_axis(-1.0, 0.0, n // 2, -half_height, min(hmin * 4, 2.0 / n))
    yu = _graded_axis(0.0, 1.0, n // 2, half_height, min(hmin * 4, 2.0 / n))
    ye = np.concatenate([yl, yu[1:]])
    hy0, hy1 = ye[1] - ye[0], ye[-1] - ye[-2]
    ye = np.concatenate([[ye[0] - hy0], ye, [ye[-1] + hy1]])
    return GridSpec(xe, ye)


def toy_case(nx: int, ny: int, blocked=(), obstacle_cells=(), radius: float = 0.3,
             count_mode: str = "visit"):
    """Unit-cell grid nx × ny: column 0 is E, column nx-1 is F, ``blocked`` cells (i, j)
    are outside the domain, and each obstacle is a disk of ``radius`` cell widths inside
    the named cell, so it collapses exactly that cell."""
    grid = GridSpec.uniform((0.0, float(nx), 0.0, float(ny)), (nx, ny))
    E = PolygonShape.rect(-1.0, 1.0, 0.0, float(ny))
    F = PolygonShape.rect(nx - 1.0, nx + 1.0, 0.0, float(ny))
    free = [shapely.box(i, j, i + 1, j + 1) for i in range(1, nx - 1) for j in range(ny)
            if (i, j) not in set(map(tuple, blocked))]
    dom = PolygonShape.from_geometry(shapely.unary_union(free)) if free else None
    obs = [DiskRegion(GeneralizedCircle.circle(complex(i + 0.5, j + 0.5), radius), True)
           for i, j in obstacle_cells]
    if dom is None:
        raise ValueError("toy case has no free cells")
    return grid, FamilySpec.connecting(E, F, dom, obs, count_mode, label=f"toy {nx}x{ny}")


def toy_suite(n_cases: int = 50, seed: int = 2024, path_limit: int = 200_000):
    """Fixed enumeration set of toy cases on grids up to 6×6 with at most two one-cell
    obstacles, keeping only those whose simple E-F paths number at most ``path_limit``."""
    from .network import build_network
    from .paths import count_simple_paths, path_graph

    rng = np.random.default_rng(seed)
    cases = []
    tries = 0
    while len(cases) < n_cases:
        tries += 1
        if tries > 100 * n_cases:
            raise RuntimeError("could not assemble the toy suite")
        nx = int(rng.integers(3, 7))
        ny = int(rng.integers(2, 7))
        inner = [(i, j) for i in range(1, nx - 1) for j in range(ny)]
        nb = int(rng.integers(0, len(inner) // 2 + 1))
        perm = rng.permutation(len(inner))
        blocked = [inner[t] for t in perm[:nb]]
        rest = [inner[t] for t in perm[nb:]]
        k = int(rng.integers(0, min(2, len(rest)) + 1))
        obst = rest[:k]
        try:
            grid, fam = toy_case(nx, ny, blocked, obst)
            net = build_network(grid, fam)
        except ValueError:
            continue
        n_paths = count_simple_paths(path_graph(net), path_limit)
        if n_paths == 0 or n_paths > path_limit:
            continue
        cases.append({"nx": nx, "ny": ny, "blocked": blocked, "obstacles": obst,
                      "paths": n_paths, "grid": grid, "family": fam})
    return cases


def _disk(c, r) -> DiskRegion:
    return DiskRegion(GeneralizedCircle.circle(complex(c), float(r)), True)


def random_family(rng: np.random.Generator) -> tuple[GridSpec, FamilySpec]:
    """Two disjoint random disks (or a disk and a segment) in [-1, 1]², optionally inside
    a random box domain, on a 64×64 grid.  No obstacles."""
    while True:
        c1, c2 = rng.uniform(-0.6, 0.6, 2) + 1j * rng.uniform(-0.6, 0.6, 2)
        r1, r2 = rng.uniform(0.08, 0.3, 2)
        if abs(c1 - c2) > r1 + r2 + 0.15:
            break
    E = _disk(c1, r1)
    if rng.random() < 0.5:
        F = _disk(c2, r2)
    else:
        d = np.exp(1j * rng.uniform(0, np.pi))
        F = PolylineShape(ContinuumSample.segment(c2 - r2 * d, c2 + r2 * d, 32))
    dom = None
    if rng.random() < 0.5:
        dom = PolygonShape.rect(-1.0, 1.0, -1.0, 1.0)
    grid = GridSpec.uniform((-1.05, 1.05, -1.05, 1.05), 64)
    return grid, FamilySpec.connecting(E, F, dom, (), label="random family")


def random_disk_obstacles(rng: np.random.Generator, box, avoid, count: int,
                          rmin: float, rmax: float, margin: float, attempts: int = 500):
    """Up to ``count`` disjoint disks in ``box`` = (x0, x1, y0, y1), each at distance
    >= margin from the others and from every shape in ``avoid``."""
    x0, x1, y0, y1 = box
    out: list[tuple[complex, float]] = []
    for _ in range(attempts):
        if len(out) >= count:
            break
        r = float(rng.uniform(rmin, rmax))
        c = complex(rng.uniform(x0 + r, x1 - r), rng.uniform(y0 + r, y1 - r))
        if any(abs(c - c2) < r + r2 + margin for c2, r2 in out):
            continue
        if any(float(np.min(S.distance(np.array([c])))) < r + margin for S in avoid):
            continue
        out.append((c, r))
    return [_disk(c, r) for c, r in out]


def separated_segments(delta: float) -> tuple[PolylineShape, PolylineShape]:
    """Horizontal unit segments at heights ±delta/2: relative distance exactly delta."""
    E = PolylineShape(ContinuumSample.segment(complex(-0.5, delta / 2), complex(0.5, delta / 2), 64))
    F = PolylineShape(ContinuumSample.segment(complex(-0.5, -delta / 2), complex(0.5, -delta / 2), 64))
    return E, F


def loewner_scene(delta: float, rng: np.random.Generator, n: int = 96,
                  max_obstacles: int = 6) -> tuple[GridSpec, FamilySpec]:
    """Two segments at relative distance delta with random disk obstacles between and
    around them, on a square grid framing the segments with a margin of one unit."""
    E, F = separated_segments(delta)
    half = 0.5 + delta / 2 + 1.0
    box = (-half + 0.2, half - 0.2, -half + 0.2, half - 0.2)
    k = int(rng.integers(1, max_obstacles + 1))
    obs = random_disk_obstacles(rng, box, (E, F), k, 0.05, max(0.1, 0.3 * min(1.0, delta)), 0.03)
    grid = GridSpec.uniform((-half, half, -half, half), n)
    return grid, FamilySpec.connecting(E, F, None, obs, label=f"loewner delta={delta:g}")


__all__ = ["loewner_scene", "narrow_passage", "narrow_passage_grid", "random_disk_obstacles",
           "random_family", "separated_segments", "toy_case", "toy_suite"]
