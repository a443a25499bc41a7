"""``schottky-qc`` command line: orbit, modulus, uniformize, exhaust and verify."""

from __future__ import annotations

import functools
import sys

import click
import numpy as np

from .. import __version__
from .output import Artifacts, Canvas, depth_color, fit_window, matrix_text
from .scene import Scene, WorkbenchError, empty_scene, load_scene

EXIT_VIOLATION = 1  # a checked invariant failed
EXIT_INPUT = 2  # the scene or a precondition was rejected


def _invariant_of(exc: Exception) -> str:
    from ..annulus import PreconditionError
    from ..geometry import GeometryError
    from ..koebe import DivergenceError, LoopError, StagnationError
    from ..modulus import DiscretizationError, InfiniteModulusError
    from ..schottky import SchottkyError

    for cls, name in ((WorkbenchError, None), (StagnationError, "Koebe convergence"),
                      (DivergenceError, "Theodorsen convergence"),
                      (LoopError, "star-like loops"), (SchottkyError, "Schottky configuration"),
                      (InfiniteModulusError, "finite modulus"),
                      (DiscretizationError, "grid resolution"),
                      (PreconditionError, "precondition"), (GeometryError, "geometry")):
        if isinstance(exc, cls):
            return exc.invariant if name is None else name
    return "input"


def _guard(fn):
    """Turn rejected inputs into a nonzero exit that names the invariant."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        from ..annulus import PreconditionError
        from ..geometry import GeometryError
        from ..koebe import StagnationError

        try:
            return fn(*args, **kwargs)
        except WorkbenchError as e:
            click.echo(f"invariant violated: {e.invariant}: {e.message}", err=True)
            sys.exit(EXIT_INPUT)
        except (GeometryError, PreconditionError, StagnationError, ValueError) as e:
            click.echo(f"invariant violated: {_invariant_of(e)}: {e}", err=True)
            sys.exit(EXIT_INPUT)
    return wrapper


def _scene(path) -> Scene:
    return load_scene(path) if path else empty_scene()


def _pick(flag, scene: Scene, key, default):
    return flag if flag is not None else scene.get(key, default)


def _finish(art: Artifacts, command: str, options: dict, scene, summary: dict, checks: dict):
    art.manifest(command, options, scene, summary, checks)
    for name, ok in checks.items():
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}")
    bad = [k for k, ok in checks.items() if not ok]
    if bad:
        click.echo(f"invariant violated: {', '.join(bad)}", err=True)
        sys.exit(EXIT_VIOLATION)


def common(fn):
    for opt in reversed([
        click.option("--scene", "scene_path", type=click.Path(exists=True, dir_okay=False),
                     help="Scene JSON file."),
        click.option("--seed", type=int, default=None, help="RNG seed (overrides the scene)."),
        click.option("--out-dir", type=click.Path(file_okay=False), default="out",
                     show_default=True, help="Directory for SVG, CSV and manifest outputs."),
        click.option("--metric", type=click.Choice(["euclidean", "spherical"]), default=None,
                     help="Metric flavor (overrides the scene)."),
    ]):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="schottky-qc")
def cli():
    """Schottky sets, annulus widths, transboundary modulus and Koebe uniformization."""


# ---------------------------------------------------------------------------------------
# orbit


@cli.command()
@common
@click.option("--depth", type=int, default=None, help="Largest reduced word length (default 4).")
@_guard
def orbit(scene_path, seed, out_dir, metric, depth):
    """Render the reflection-group orbit of the scene's disks and its limit points."""
    from ..schottky import SchottkyConfig, check_nesting, limit_set_two, orbit_disks

    sc = _scene(scene_path)
    depth = _pick(depth, sc, "depth", 4)
    disks = sc.disks()
    gens = sc.get("schottky", {}).get("generators", list(range(len(disks))))
    if len(gens) < 2:
        raise WorkbenchError("scene disks", "orbit needs at least two disks")
    cfg = SchottkyConfig(tuple(disks[i] for i in gens))
    orb = orbit_disks(cfg, depth)
    nested = check_nesting(orb)
    rows = []
    for k, od in enumerate(orb):
        b = od.disk.boundary
        if b.kind != "circle":
            raise WorkbenchError("bounded disks", "orbit rendering needs circles, not lines")
        rows.append({"index": k, "word": "".join(map(str, od.word.letters)) or "e",
                     "generator": od.generator, "depth": od.depth,
                     "parent": "" if od.parent is None else od.parent,
                     "center_x": b.center.real, "center_y": b.center.imag, "radius": b.radius,
                     "inside": od.disk.inside})
    if cfg.k == 2:
        lim = limit_set_two(cfg)
        limits = [{"chain": i, "x": z.real, "y": z.imag, "diameter": d}
                  for i, (z, d) in enumerate(zip(lim.points, lim.diameters))]
    else:  # centers of the deepest disks approximate the limit set
        deep = [od for od in orb if od.depth == depth]
        limits = [{"chain": k, "x": od.cap.center_point.real, "y": od.cap.center_point.imag,
                   "diameter": od.cap.diameter()} for k, od in enumerate(deep)]
    art = Artifacts(out_dir)
    art.csv("orbit.csv", rows)
    art.csv("limit_points.csv", limits)
    window = sc.get("view") or fit_window(np.concatenate(
        [d.boundary.sample(64) for d in cfg.disks if d.boundary.kind == "circle"]))
    cv = Canvas(window, f"orbit depth {depth}")
    for r in rows:
        cv.circle(complex(r["center_x"], r["center_y"]), r["radius"],
                  stroke=depth_color(r["depth"], depth), width=1.5 if r["depth"] == 0 else 0.8)
    for p in limits:
        cv.dot(complex(p["x"], p["y"]), 2.5)
    art.write("orbit.svg", cv.svg())
    click.echo(f"{len(orb)} orbit disks (depth {depth}), {len(limits)} limit points")
    _finish(art, "orbit", {"depth": depth, "seed": seed, "metric": metric}, sc,
            {"disks": len(orb), "limit_points": len(limits)}, {"orbit nesting": nested})


# ---------------------------------------------------------------------------------------
# modulus


def _draw_shape(cv: Canvas, S, window, stroke, fill="none"):
    import shapely

    g = S.geometry(window)
    parts = getattr(g.boundary, "geoms", [g.boundary]) if g.geom_type != "LineString" else [g]
    for part in parts:
        if isinstance(part, shapely.LineString):
            xy = np.asarray(part.coords)
            cv.polyline(xy[:, 0] + 1j * xy[:, 1], stroke=stroke, fill=fill)


@cli.command()
@common
@click.option("--grid", type=int, default=None, help="Grid size N (N×N cells, default 128).")
@click.option("--tol", type=float, default=None, help="Solver tolerance (default 1e-10).")
@_guard
def modulus(scene_path, seed, out_dir, metric, grid, tol):
    """Classical and transboundary modulus of the scene's curve family (or preset sweep)."""
    from ..modulus import (GridSpec, auto_grid, classical_modulus, narrow_passage_grid,
                           transboundary_modulus)

    sc = _scene(scene_path)
    if scene_path is None:
        raise WorkbenchError("scene file", "modulus needs --scene")
    n = _pick(grid, sc, "grid", 128)
    tol = _pick(tol, sc, "tol", 1e-10)
    metric = _pick(metric, sc, "metric", "euclidean")
    art = Artifacts(out_dir)
    rows, first = [], None
    for label, fam, gap in sc.families(metric):
        if gap is not None:
            g = narrow_passage_grid(gap, n)
        elif metric == "spherical":
            g = GridSpec.sphere_chart(n)
        else:
            g = auto_grid(fam, n)
        res = {}
        for mode, solve in (("classical", classical_modulus), ("transboundary", transboundary_modulus)):
            r = solve(g, fam, tol=tol)
            res[mode] = r
            rows.append({"label": label, "gap": "" if gap is None else gap, "mode": mode,
                         "estimate": r.estimate, "mass": r.mass, "admissibility": r.admissibility,
                         "upper_bound": r.upper_bound, "method": r.method, "nodes": r.network.n_nodes,
                         "obstacle_weights": " ".join(repr(float(w)) for w in r.obstacle_weights)})
            safe = label.replace("=", "_")
            art.write(f"density_{safe}_{mode}.csv", matrix_text(r.cell_density))
        if first is None:
            first = (g, fam)
        ratio = res["transboundary"].estimate / max(res["classical"].estimate, 1e-300)
        click.echo(f"{label}: classical {res['classical'].estimate:.6g}  "
                   f"transboundary {res['transboundary'].estimate:.6g}  ratio {ratio:.3g}")
    art.csv("modulus.csv", rows)
    g, fam = first
    cv = Canvas(g.window, fam.label or "family")
    for S, color in ((fam.domain, "#888"), (fam.E, "#06c"), (fam.F, "#c60")):
        if S is not None:
            _draw_shape(cv, S, g.window, color)
    for K in fam.obstacles:
        _draw_shape(cv, K, g.window, "#000", "#ddd")
    art.write("family.svg", cv.svg())
    summary = {"rows": rows}
    _finish(art, "modulus", {"grid": n, "tol": tol, "metric": metric, "seed": seed}, sc,
            summary, {})


# ---------------------------------------------------------------------------------------
# uniformize


@cli.command()
@common
@click.option("--depth", type=int, default=None,
              help="Exhaustion stage for tangent disks (default: the scene's uniformize.stage).")
@click.option("--tol", type=float, default=None, help="Circularity tolerance (default 1e-6).")
@_guard
def uniformize(scene_path, seed, out_dir, metric, depth, tol):
    """Koebe iteration: map the complement of the scene's loops onto a circle domain."""
    from ..koebe import uniformize_configuration

    sc = _scene(scene_path)
    if scene_path is None:
        raise WorkbenchError("scene file", "uniformize needs --scene")
    comps = sc.components()
    if not comps:
        raise WorkbenchError("scene components", "no loops or disks to uniformize")
    stage = _pick(depth, sc.get("uniformize", {}), "stage", None)
    tol = _pick(tol, sc, "tol", 1e-6)
    seed = _pick(seed, sc, "seed", 0)
    out = uniformize_configuration(comps, stage, tol=tol, seed=seed)
    res = out.result
    art = Artifacts(out_dir)
    art.csv("circles.csv", [{"index": i, "center_x": c.center.real, "center_y": c.center.imag,
                             "radius": c.radius, "fit_residual": out.fit_residuals[i]}
                            for i, c in enumerate(res.circles)])
    comp_of = [None] + [st.component for st in res.steps]
    art.csv("trace.csv", [{"step": s, "component": "" if comp_of[s] is None else comp_of[s],
                           "circularity": v} for s, v in enumerate(res.trace)])
    corr = []
    for i, (src, img) in enumerate(res.correspondence):
        for k, (a, b) in enumerate(zip(src, img)):
            corr.append({"loop": i, "sample": k, "x": a.real, "y": a.imag,
                         "image_x": b.real, "image_y": b.imag})
    art.csv("correspondence.csv", corr)
    if out.qs is not None and out.qs.profile is not None:
        art.csv("qs_profile.csv", [{"relative_distance": a, "separating_width": v, "fitted": f,
                                    "envelope": e} for a, v, f, e in out.qs.profile.as_rows()])
    pts = np.concatenate([L.points(256) for L in out.loops])
    cv = Canvas(sc.get("view") or fit_window(pts), "domain")
    for L in out.loops:
        cv.polyline(L.points(512), closed=True, stroke="#06c")
    art.write("domain.svg", cv.svg())
    cpts = np.concatenate([c.sample(128) for c in res.circles])
    cv = Canvas(fit_window(cpts), "circle domain")
    for c in res.circles:
        cv.circle(c.center, c.radius, stroke="#c60")
    art.write("circles.svg", cv.svg())
    summary = {"status": res.status, "steps": res.iterations, "residual": res.residual,
               "triple": list(res.triple), "triple_error": res.triple_error(),
               "min_gap": res.min_gap(), "H": None if out.qs is None else out.qs.H,
               "stage": stage, "exhaustion": out.exhaustion}
    click.echo(f"{res.status} after {res.iterations} steps, residual {res.residual:.3e}, "
               f"H {summary['H']}")
    _finish(art, "uniformize", {"depth": stage, "tol": tol, "seed": seed, "metric": metric},
            sc, summary, {"Koebe convergence": res.residual < tol})


# ---------------------------------------------------------------------------------------
# exhaust


@cli.command()
@common
@click.option("--depth", type=int, default=None, help="Last stage n (stages 1..n, default 10).")
@_guard
def exhaust(scene_path, seed, out_dir, metric, depth):
    """Chord exhaustion of tangent disks: per-stage regions, gaps and inclusion checks."""
    from ..bilipschitz import exhaust_tangent_disks
    from ..suites import exhaustion_suite

    sc = _scene(scene_path)
    sel = sc.get("exhaust", {})
    disks = sc.disk_pairs(sel.get("disks")) if sc.get("disks") else [(-1 + 0j, 1.0), (1 + 0j, 1.0)]
    stages = sel.get("stages") or list(range(1, (depth or 10) + 1))
    if depth is not None:
        stages = list(range(1, depth + 1))
    rep = exhaustion_suite(disks, stages)
    art = Artifacts(out_dir)
    art.csv("exhaust.csv", rep.rows)
    pts = np.concatenate([c + r * np.exp(1j * np.linspace(0, 2 * np.pi, 64)) for c, r in disks])
    cv = Canvas(sc.get("view") or fit_window(pts), "exhaustion")
    for c, r in disks:
        cv.circle(c, r, stroke="#bbb")
    for n in stages:
        st = exhaust_tangent_disks(disks, n)
        for R in st.regions:
            b = R.boundary(1024)
            b = b[np.argsort(np.angle(b - R.center), kind="stable")]
            cv.polyline(b, closed=True, stroke=depth_color(n, max(stages)), width=0.6)
    art.write("exhaust.svg", cv.svg())
    _finish(art, "exhaust", {"stages": list(stages), "seed": seed, "metric": metric}, sc,
            rep.summary, rep.checks)


# ---------------------------------------------------------------------------------------
# verify

SUITE_NAMES = ["subannulus", "bigdisk", "reflect-orbit", "compare", "loewner", "upper-density",
               "bilip", "qs", "dcross"]


@cli.command()
@click.argument("suite", type=click.Choice(SUITE_NAMES))
@common
@click.option("--trials", type=int, default=None, help="Trials (per stratum where stratified).")
@click.option("--depth", type=int, default=None, help="Word length for reflect-orbit (default 4).")
@click.option("--grid", type=int, default=None, help="Grid size for compare / loewner.")
@click.option("--tol", type=float, default=None, help="Koebe tolerance for qs (default 1e-6).")
@_guard
def verify(suite, scene_path, seed, out_dir, metric, trials, depth, grid, tol):
    """Run a named randomized verification suite and report its invariants."""
    from .. import suites as S

    sc = _scene(scene_path)
    seed = _pick(seed, sc, "seed", None)
    if seed is None:
        raise WorkbenchError("seed required", "randomized suites need --seed or a scene seed")
    metric = _pick(metric, sc, "metric", None)
    kw: dict = {"seed": seed}
    if trials is not None:
        kw["trials"] = trials
    if suite in ("subannulus", "reflect-orbit") and metric:
        kw["metric"] = metric
    if suite == "dcross":
        kw["metric"] = metric or "spherical"
    if suite == "reflect-orbit" and depth is not None:
        kw["depth"] = depth
    if suite in ("compare", "loewner"):
        n = _pick(grid, sc, "grid", None)
        if n is not None:
            kw["n"] = n
    if suite == "qs":
        if sc.get("loops") or sc.get("disks"):
            from ..koebe import AnalyticLoop

            comps = sc.components()
            kw["loops"] = [c if isinstance(c, AnalyticLoop) else AnalyticLoop.circle(*c) for c in comps]
        kw["tol"] = _pick(tol, sc, "tol", 1e-6)
    rep = S.SUITES[suite](**kw)
    art = Artifacts(out_dir)
    art.csv(f"{suite}.csv", rep.rows)
    if suite == "subannulus":
        click.echo(f"{rep.summary['passes']}/{rep.summary['trials']} postcondition passes")
    options = {k: v for k, v in kw.items() if k != "loops"}
    options["suite"] = suite
    _finish(art, "verify", options, sc if scene_path else None,
            {**rep.summary, "seconds": rep.seconds}, rep.checks)


def main():  # console-script entry point
    cli()


__all__ = ["cli", "main"]
