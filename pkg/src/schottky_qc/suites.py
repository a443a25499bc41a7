"""Randomized verification suites shared by the command line and the test suite.

Every suite returns a SuiteReport: a flat table (one dict per trial or stratum), a summary,
and the list of named invariants with their outcome.  Trial t of a suite seeded with s
draws from ``numpy.random.default_rng([s, t])``, so any single row can be replayed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .annulus import (Annulus, big_disk_bound_search, orbit_bound_search,
                      reflected_pair_bound_search, subannulus_select, verify_subannulus)
from .geometry import ContinuumSample, DiskRegion, dcross_estimate, relative_distance

DEFAULT_STRATA = (2.0, 5.0, 10.0)
SLOPE_LIMIT = 0.05


@dataclass
class SuiteReport:
    name: str
    rows: list
    summary: dict
    checks: dict = field(default_factory=dict)  # invariant name -> bool
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def violated(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial)])


# ---------------------------------------------------------------------------------------
# random inputs


def _chart_radius(rho, metric: str):
    """Chart distance from 0 of points at metric distance rho from 0."""
    return rho if metric == "euclidean" else np.tan(np.asarray(rho) / 2)


def random_subannulus_input(rng: np.random.Generator, metric: str = "euclidean"):
    """A random annulus (width log-uniform in [0.3, 40]) and one to six sets among disks,
    radial segments, random-walk polylines and round loops, placed at log-uniform
    distances from the center so that many of them cross the annulus."""
    w = float(np.exp(rng.uniform(np.log(0.3), np.log(40.0))))
    if metric == "euclidean":
        R = float(np.exp(rng.uniform(-1.0, 2.0)))
        center = complex(rng.normal(), rng.normal())
    else:
        R = float(rng.uniform(0.3, 3.0))
        center = 0j
    A = Annulus(center, R * np.exp(-w), R, metric)
    lo, hi = np.log(A.r) - 1.0, np.log(A.R) + 0.5
    if metric == "spherical":
        hi = min(hi, np.log(3.1))
    Ks = []
    for _ in range(int(rng.integers(1, 7))):
        kind = rng.choice(["disk", "radial", "walk", "loop"])
        phi = rng.uniform(0, 2 * np.pi)
        u = np.exp(1j * phi)
        if kind == "radial":
            a, b = np.sort(rng.uniform(lo, hi, 2))
            rho = np.exp(np.linspace(a, b, 48))
            Ks.append(ContinuumSample(center + u * _chart_radius(rho, metric)))
            continue
        d = float(np.exp(rng.uniform(lo, hi)))
        p = center + u * float(_chart_radius(d, metric))
        size = abs(p - center) * float(np.exp(rng.uniform(np.log(0.02), np.log(0.95))))
        if kind == "disk":
            Ks.append(DiskRegion.disk(p, size))
        elif kind == "loop":
            Ks.append(ContinuumSample.circle(p, size, 64))
        else:
            steps = size / 6 * np.exp(1j * rng.uniform(0, 2 * np.pi, 24))
            Ks.append(ContinuumSample(p + np.r_[0, np.cumsum(steps)]))
    return A, Ks


def random_continuum(rng: np.random.Generator, center: complex, size: float) -> ContinuumSample:
    kind = rng.integers(3)
    if kind == 0:
        u = np.exp(1j * rng.uniform(0, 2 * np.pi))
        return ContinuumSample.segment(center - u * size / 2, center + u * size / 2,
                                       int(rng.integers(8, 64)))
    if kind == 1:
        return ContinuumSample.circle(center, size / 2, int(rng.integers(8, 96)))
    steps = size / 5 * np.exp(1j * rng.uniform(0, 2 * np.pi, int(rng.integers(4, 40))))
    return ContinuumSample(center + np.r_[0, np.cumsum(steps)])


def random_continuum_pair(rng: np.random.Generator):
    """Two disjoint sampled continua (segments, loops or random walks) with sizes and
    separation spread over three decades."""
    for _ in range(1000):
        E = random_continuum(rng, complex(rng.normal(), rng.normal()),
                             float(np.exp(rng.uniform(-3, 1))))
        F = random_continuum(rng, complex(rng.normal(), rng.normal()) * np.exp(rng.uniform(-2, 1)),
                             float(np.exp(rng.uniform(-3, 1))))
        if np.min(np.abs(E.points[:, None] - F.points[None, :])) > 1e-9:
            return E, F
    raise RuntimeError("could not draw disjoint continua")


# ---------------------------------------------------------------------------------------
# suites


def subannulus_suite(trials: int = 1000, seed: int = 0, metric: str | None = None) -> SuiteReport:
    """Select a subannulus for random inputs and re-verify its postconditions
    independently.  ``metric`` None alternates Euclidean and spherical trials."""
    t0 = time.perf_counter()
    rows, fails = [], 0
    for t in range(trials):
        m = metric or ("euclidean" if t % 2 == 0 else "spherical")
        A, Ks = random_subannulus_input(_rng(seed, t), m)
        res = subannulus_select(A, Ks)
        ok, msg = verify_subannulus(A, Ks, res)
        fails += not ok
        rows.append({"trial": t, "metric": m, "r": A.r, "R": A.R, "width": A.width,
                     "sets": len(Ks), "alternative": res.alternative,
                     "indices": " ".join(map(str, res.indices)), "selected_r": res.annulus.r,
                     "selected_R": res.annulus.R, "selected_width": res.annulus.width,
                     "bound": min(A.width, A.width ** (1 / 9)), "passed": ok, "message": msg})
    summary = {"trials": trials, "passes": trials - fails,
               "alternatives": {a: sum(r["alternative"] == a for r in rows)
                                for a in ("one-small", "two-spanning")}}
    return SuiteReport("subannulus", rows, summary,
                       {"subannulus postconditions": fails == 0}, time.perf_counter() - t0)


def dcross_suite(trials: int = 1000, seed: int = 0, metric: str = "spherical",
                 rel_tol: float = 1e-12) -> SuiteReport:
    """Δ(E, F) <= D(E, F) <= 2Δ(E, F) on random continuum pairs.  Over a fixed sample both
    inequalities hold exactly, so the tolerance only absorbs roundoff."""
    t0 = time.perf_counter()
    rows, fails = [], 0
    for t in range(trials):
        E, F = random_continuum_pair(_rng(seed, t))
        delta = relative_distance(E, F, metric)
        D = dcross_estimate(E, F, metric)
        ok = delta * (1 - rel_tol) <= D <= 2 * delta * (1 + rel_tol)
        fails += not ok
        rows.append({"trial": t, "relative_distance": delta, "dcross": D,
                     "ratio": D / delta if delta > 0 else np.nan, "passed": ok})
    ratios = [r["ratio"] for r in rows]
    return SuiteReport("dcross", rows, {"trials": trials, "violations": fails,
                                        "min_ratio": float(np.nanmin(ratios)),
                                        "max_ratio": float(np.nanmax(ratios))},
                       {"relative distance chain": fails == 0}, time.perf_counter() - t0)


def _strata_rows(*constants):
    rows = []
    for w in sorted(constants[0].strata):
        row = {"width": w}
        for c in constants:
            row[c.name] = c.strata[w]
        rows.append(row)
    return rows


def bigdisk_suite(trials: int = 10_000, seed: int = 0, alpha: float = 1.0,
                  strata=DEFAULT_STRATA) -> SuiteReport:
    """Per-stratum maxima of w_A(D) with two big disks (flat in w_A) and with one big disk
    only (the control, which grows with w_A)."""
    t0 = time.perf_counter()
    main = big_disk_bound_search(alpha, trials, seed, strata=strata)
    ctrl = big_disk_bound_search(alpha, trials, seed, strata=strata, drop_second=True)
    slope = main.slope_vs_log_width()
    cm = [ctrl.strata[w] for w in sorted(ctrl.strata)]
    grows = bool(np.all(np.diff(cm) > 0))
    return SuiteReport("bigdisk", _strata_rows(main, ctrl),
                       {"alpha": alpha, "trials_per_stratum": trials, "seed": seed,
                        "value": main.value, "slope": slope,
                        "control_slope": ctrl.slope_vs_log_width()},
                       {"bounded width slope": slope <= SLOPE_LIMIT,
                        "single-disk control grows": grows}, time.perf_counter() - t0)


def reflect_orbit_suite(trials: int = 10_000, seed: int = 0, metric: str | None = None,
                        strata=DEFAULT_STRATA, orbit_trials: int | None = None,
                        depth: int = 4) -> SuiteReport:
    """Reflected-pair searches (Euclidean and/or spherical) plus the orbit search over
    reduced words of length <= depth; each must show a flat stratum profile."""
    t0 = time.perf_counter()
    metrics = (metric,) if metric else ("euclidean", "spherical")
    consts = [reflected_pair_bound_search(trials, seed, m, strata=strata) for m in metrics]
    consts.append(orbit_bound_search(orbit_trials or trials, seed, strata=strata, depth=depth))
    slopes = {c.name: c.slope_vs_log_width() for c in consts}
    return SuiteReport("reflect-orbit", _strata_rows(*consts),
                       {"trials_per_stratum": trials, "seed": seed, "slopes": slopes,
                        "values": {c.name: c.value for c in consts}},
                       {f"bounded width slope ({k})": v <= SLOPE_LIMIT for k, v in slopes.items()},
                       time.perf_counter() - t0)


def compare_suite_report(trials: int = 100, seed: int = 0, tau: float = 1 / np.pi,
                         n: int = 64) -> SuiteReport:
    from .modulus import compare_suite

    t0 = time.perf_counter()
    out = compare_suite(trials, tau, seed, n)
    rows = [{"config": i, "ratio": r} for i, r in enumerate(out["ratios"])]
    return SuiteReport("compare", rows, {k: v for k, v in out.items() if k != "ratios"},
                       {"finite comparison constant": bool(np.isfinite(out["max_ratio"]))},
                       time.perf_counter() - t0)


def loewner_suite(trials: int = 8, seed: int = 0, deltas=(0.5, 1.0, 2.0, 4.0),
                  n: int = 96) -> SuiteReport:
    from .modulus import loewner_sweep

    t0 = time.perf_counter()
    out = loewner_sweep(deltas, trials, seed, n)
    prof = out["profile"]
    rows = [{"relative_distance": a, "transboundary": v, "fitted": f, "envelope": e}
            for a, v, f, e in prof.as_rows()]
    return SuiteReport("loewner", rows, {"deltas": out["deltas"], "minima": out["minima"],
                                         "configs_per_delta": trials},
                       {"above positive decreasing profile": out["above"]},
                       time.perf_counter() - t0)


def upper_density_suite(trials: int = 1000, seed: int = 0, widths=(3.0, 10.0, 30.0),
                        configs: int = 40, R: float = 2.0, spread_limit: float = 0.25
                        ) -> SuiteReport:
    """Explicit density on spherical annuli with width-capped cap obstacles: admissibility
    over ``trials`` random crossing paths, the obstacle-free bound 2π/w, and the stability
    of ĉ_w = max mass / (w⁻¹ + w^(-1/3)) across widths."""
    from .modulus import (explicit_admissibility, explicit_annulus_density, mass_profile,
                          random_width_capped_caps)

    t0 = time.perf_counter()
    rows, adm_ok, free_ok = [], True, True
    prof = mass_profile(widths, configs, seed, R)
    for wi, w in enumerate(widths):
        A = Annulus(0j, R * np.exp(-w), R, "spherical")
        caps = random_width_capped_caps(_rng(seed, 1_000 + wi), A)
        ed = explicit_annulus_density(A, caps)
        adm = explicit_admissibility(ed, trials, seed)
        free = explicit_annulus_density(A, ())
        adm_ok &= adm["min"] >= 1 - 1e-3
        free_ok &= free.mass <= free.free_bound
        rows.append({"width": w, "obstacles": len(caps), "admissibility_min": adm["min"],
                     "paths": adm["paths"], "free_mass": free.mass, "free_bound": free.free_bound,
                     "max_mass": prof[float(w)]["max_mass"], "c_hat": prof[float(w)]["c_hat"]})
    c = np.array([r["c_hat"] for r in rows])
    spread = float(c.max() / c.min() - 1)
    return SuiteReport("upper-density", rows, {"c_hat_spread": spread, "configs": configs},
                       {"admissibility": bool(adm_ok), "obstacle-free mass bound": bool(free_ok),
                        "c_hat stability": spread < spread_limit}, time.perf_counter() - t0)


def bilip_suite(trials: int = 10_000, seed: int = 0, deltas=None,
                spread_limit: float = 0.10) -> SuiteReport:
    """Push and pull maps: seam agreement, identity off the pieces, derivative bounds at
    ``trials`` interior points per map and δ, and δ-stability of the bi-Lipschitz
    estimate."""
    from .bilipschitz import (delta_sweep, derivative_check, identity_outside_residual,
                              pull_map, push_map, seam_residual)

    t0 = time.perf_counter()
    if deltas is None:
        deltas = np.linspace(np.pi / 12, np.pi / 3 - 0.05, 6)
    rows = []
    seam, ident, deriv = 0.0, 0.0, 0
    for kind, make in (("push", push_map), ("pull", pull_map)):
        sweep = delta_sweep(kind, deltas)
        for d, est in zip(sweep["deltas"], sweep["estimates"]):
            m = make(d)
            s = seam_residual(m)
            i = identity_outside_residual(m, trials, seed)
            dc = derivative_check(m, trials, seed)
            seam, ident, deriv = max(seam, s), max(ident, i), deriv + dc["violations"]
            rows.append({"map": kind, "delta": d, "bilip_estimate": est, "seam_residual": s,
                         "identity_residual": i, "derivative_points": dc["points"],
                         "derivative_violations": dc["violations"],
                         "min_jacobian": min(p["min_jacobian"] for p in dc["pieces"].values()),
                         "max_partial": max(p["max_partial"] for p in dc["pieces"].values()),
                         "variation": sweep["variation"]})
    var = {k: max(r["variation"] for r in rows if r["map"] == k) for k in ("push", "pull")}
    checks = {"seam continuity": seam < 1e-9, "identity outside": ident == 0.0,
              "derivative bounds": deriv == 0}
    for k, v in var.items():
        checks[f"delta stability ({k})"] = v < spread_limit
    return SuiteReport("bilip", rows, {"seam": seam, "identity": ident,
                                       "derivative_violations": deriv, "variation": var},
                       checks, time.perf_counter() - t0)


def perturbed_loops(seed: int = 7, amplitude: float = 0.05, modes: int = 4):
    """Three disjoint star-like loops: circles with random Fourier noise of relative size
    ``amplitude``."""
    from .koebe import AnalyticLoop

    rng = np.random.default_rng(seed)
    placements = ((-2 + 0.5j, 1.0), (2 + 0.3j, 0.8), (0.2 + 2.5j, 0.7))
    return [AnalyticLoop.perturbed_circle(c, r, amplitude, modes, rng) for c, r in placements]


def qs_suite(trials: int = 600, seed: int = 0, loops=None, tol: float = 1e-6,
             spread_limit: float = 0.10) -> SuiteReport:
    """Uniformize ``loops`` (default: three perturbed circles) and compare the weak
    quasisymmetry constant Ĥ over ``trials`` and 2·``trials`` domain samples."""
    from .koebe import domain_samples, koebe_iterate, weak_qs_check

    t0 = time.perf_counter()
    loops = perturbed_loops(7) if loops is None else list(loops)
    res = koebe_iterate(loops, tol=tol)
    rows, Hs = [], []
    for count in (trials, 2 * trials):
        src, _ = domain_samples(loops, np.random.default_rng(seed), count, max(16, count // 8))
        rep = weak_qs_check(src, res.map(src), max_points=4 * trials, seed=seed)
        Hs.append(rep.H)
        rows.append({"samples": int(src.size), "H": rep.H, "triples": rep.triples})
    spread = abs(Hs[1] / Hs[0] - 1)
    return SuiteReport("qs", rows, {"H": Hs, "spread": spread, "koebe_steps": res.iterations,
                                    "koebe_residual": res.residual},
                       {"finite H": bool(np.all(np.isfinite(Hs))),
                        "H stable under sample doubling": spread < spread_limit},
                       time.perf_counter() - t0)


def exhaustion_suite(disks=((-1 + 0j, 1.0), (1 + 0j, 1.0)), stages=range(1, 11),
                     samples: int = 2048) -> SuiteReport:
    """Chord exhaustion of tangent disks at each stage: positive gaps at every tangency,
    Hausdorff distance to the full disks at most the sagitta s_n, and U_i(n) ⊂ U_i(n+1)
    (boundary samples of stage n lie in the closure of stage n+1)."""
    from .bilipschitz import exhaust_tangent_disks

    t0 = time.perf_counter()
    disks = [(complex(c), float(r)) for c, r in disks]
    scale = min(r for _, r in disks) / 4
    rows, prev = [], None
    gaps_ok = haus_ok = incl_ok = True
    for n in stages:
        st = exhaust_tangent_disks(disks, n)
        s_n = scale * 2.0 ** (-n)
        gaps = {(t.i, t.j): st.gap(t.i, t.j, samples) for t in st.tangencies}
        for i, R in enumerate(st.regions):
            inside = True
            if prev is not None:
                b = prev.regions[i].boundary(samples)
                inside = bool(np.all(R.contains(b, closed=True)
                                     | (np.abs(np.abs(b - R.center) - R.radius) <= 1e-12 * R.radius)))
            h = R.hausdorff_to_disk()
            mine = [g for (a, c), g in gaps.items() if i in (a, c)]
            gaps_ok &= all(g > 0 for g in mine)
            haus_ok &= h <= s_n * (1 + 1e-12)
            incl_ok &= inside
            rows.append({"stage": n, "region": i, "sagitta": s_n, "hausdorff": h,
                         "min_gap": min(mine) if mine else np.inf, "cuts": len(R.cuts),
                         "inside_next": inside if prev is not None else ""})
        prev = st
    if prev is not None and not prev.tangencies:
        gaps_ok = True
    return SuiteReport("exhaust", rows, {"stages": list(stages), "disks": len(disks),
                                         "tangencies": len(prev.tangencies) if prev else 0},
                       {"positive gaps": bool(gaps_ok), "Hausdorff within sagitta": bool(haus_ok),
                        "monotone inclusion": bool(incl_ok)}, time.perf_counter() - t0)


SUITES = {
    "subannulus": subannulus_suite,
    "bigdisk": bigdisk_suite,
    "reflect-orbit": reflect_orbit_suite,
    "compare": compare_suite_report,
    "loewner": loewner_suite,
    "upper-density": upper_density_suite,
    "bilip": bilip_suite,
    "qs": qs_suite,
    "dcross": dcross_suite,
}

__all__ = ["DEFAULT_STRATA", "SLOPE_LIMIT", "SUITES", "SuiteReport", "bigdisk_suite",
           "bilip_suite", "compare_suite_report", "dcross_suite", "exhaustion_suite",
           "loewner_suite",
           "perturbed_loops", "qs_suite", "random_continuum_pair", "random_subannulus_input",
           "reflect_orbit_suite", "subannulus_suite", "upper_density_suite"]
