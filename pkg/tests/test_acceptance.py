"""Acceptance criteria 1-13 at their stated tolerances.  Each test prints one PASS/FAIL line
(collected again in the pytest terminal summary).  Runtime is about 12 minutes, dominated by
the 10⁴-trial width searches, the brute-force path enumeration and the explicit-density
mass profile."""

import time

import numpy as np
import pytest

from conftest import record
from schottky_qc import suites
from schottky_qc.annulus import Annulus
from schottky_qc.geometry import Cap, DiskRegion
from schottky_qc.koebe import AnalyticLoop, annulus_modulus_check, koebe_iterate
from schottky_qc.modulus import (FamilySpec, GridSpec, brute_force_check, classical_modulus,
                                 narrow_passage, narrow_passage_grid, random_family,
                                 rotation_invariance, toy_suite, transboundary_modulus)
from schottky_qc.schottky import (SchottkyConfig, check_nesting, enumerate_words,
                                  iterate_fixed_point, limit_set_two, orbit_disks)

pytestmark = pytest.mark.slow


def test_criterion_01_classical_values():
    details, ok = [], True
    for R in (2.0, np.e, 8.0):
        W = 1.05 * R
        t0 = time.perf_counter()
        est = classical_modulus(GridSpec.uniform((-W, W, -W, W), 256),
                                FamilySpec.annulus(Annulus(0j, 1.0, R))).estimate
        secs = time.perf_counter() - t0
        err = abs(est / (2 * np.pi / np.log(R)) - 1)
        ok &= err < 0.05 and secs < 60
        details.append(f"R={R:.4g} err={err:.2e} {secs:.1f}s")
    n, h = 128, 1 / 128
    rect = classical_modulus(GridSpec.uniform((-h, 2 + h, 0, 1), (2 * n + 2, n)),
                             FamilySpec.connecting((-1, 0, 0, 1), (2, 3, 0, 1),
                                                   domain=(0, 2, 0, 1))).estimate
    ok &= abs(rect - 0.5) / 0.5 < 0.02
    details.append(f"rectangle={rect:.6f}")
    record(1, ok, "; ".join(details))
    assert ok


def test_criterion_02_zero_obstacle_reduction():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        g, fam = random_family(rng)
        a = classical_modulus(g, fam).estimate
        b = transboundary_modulus(g, fam).estimate
        worst = max(worst, abs(b - a) / a)
    ok = worst <= 1e-3
    record(2, ok, f"20 families, max relative difference {worst:.2e}")
    assert ok


def test_criterion_03_brute_force_equivalence():
    cases = toy_suite(50)
    errs = []
    for c in cases:
        out = brute_force_check(c["grid"], c["family"])
        errs.append(out["relative_error"] if out["enumerated"] else np.inf)
    worst = max(errs)
    ok = len(cases) == 50 and worst <= 1e-6
    record(3, ok, f"{len(cases)} toy cases, max relative error {worst:.2e}")
    assert ok


def test_criterion_04_rotation_invariance():
    def axis(th, ph):
        return (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), -np.cos(th))

    E = Cap(axis(0, 0), 0.35)
    F = Cap((0, 0, 1.0), np.pi - 1.1)
    obstacles = [Cap(axis(0.72, 0.3), 0.15), Cap(axis(0.75, 2.5), 0.12)]
    out = rotation_invariance(E, F, obstacles, rotations=20, n=256, seed=0)
    ok = out["max_deviation"] < 0.05
    record(4, ok, f"20 rotations at N=256, max deviation {out['max_deviation']:.2e}")
    assert ok


def test_criterion_05_narrow_passage():
    cl, tb = [], []
    for gap in (1e-1, 1e-2, 1e-3):
        fam, g = narrow_passage(gap), narrow_passage_grid(gap, 128)
        cl.append(classical_modulus(g, fam).estimate)
        tb.append(transboundary_modulus(g, fam).estimate)
    drop = cl[0] / cl[-1]
    vary = max(tb) / min(tb)
    ok = drop >= 10 and vary < 2
    record(5, ok, f"classical drop {drop:.1f}x, transboundary variation {vary:.3f}x")
    assert ok


def test_criterion_06_relative_distance_chain():
    rep = suites.dcross_suite(1000, seed=0)
    ok = rep.passed
    record(6, ok, f"{rep.summary['violations']} violations in 1000 pairs, D/Δ in "
                  f"[{rep.summary['min_ratio']:.3f}, {rep.summary['max_ratio']:.3f}]")
    assert ok


def test_criterion_07_subannulus_postconditions():
    rep = suites.subannulus_suite(1000, seed=7)
    ok = rep.passed
    record(7, ok, f"{rep.summary['passes']}/1000 re-verified")
    assert ok


def test_criterion_08_width_bounds():
    big = suites.bigdisk_suite(10_000, seed=0)
    refl = suites.reflect_orbit_suite(10_000, seed=0)
    slopes = {"big-disk": big.summary["slope"], **refl.summary["slopes"]}
    ok = big.passed and refl.passed
    text = ", ".join(f"{k} {v:+.3f}" for k, v in slopes.items())
    record(8, ok, f"slopes {text}; control slope {big.summary['control_slope']:+.3f}, "
                  f"grows={big.checks['single-disk control grows']}")
    assert ok


def test_criterion_09_explicit_density():
    rep = suites.upper_density_suite(1000, seed=0)
    c_hat = [r["c_hat"] for r in rep.rows]
    ok = rep.passed
    record(9, ok, f"admissibility={rep.checks['admissibility']}, "
                  f"free bound={rep.checks['obstacle-free mass bound']}, c_hat "
                  f"{', '.join(f'{c:.2f}' for c in c_hat)} (spread "
                  f"{rep.summary['c_hat_spread']:.0%}, limit 25%)")
    assert ok, rep.violated


def test_criterion_10_bilipschitz():
    rep = suites.bilip_suite(10_000, seed=0)
    var = rep.summary["variation"]
    ok = rep.passed
    record(10, ok, f"seam {rep.summary['seam']:.1e}, identity {rep.summary['identity']}, "
                   f"derivative violations {rep.summary['derivative_violations']}, "
                   f"L variation push {var['push']:.1%} pull {var['pull']:.1%} (limit 10%)")
    assert ok, rep.violated


def test_criterion_11_exhaustion():
    rep = suites.exhaustion_suite()
    ok = rep.passed and rep.seconds < 10
    record(11, ok, f"stages 1-10, checks {rep.checks}, {rep.seconds:.2f}s")
    assert ok


def test_criterion_12_schottky_engine():
    counts_ok = all(len(enumerate_words(k, n)) == k * (k - 1) ** (n - 1)
                    for k in range(2, 6) for n in range(1, 9))
    cfg = SchottkyConfig((DiskRegion.disk(-2, 1), DiskRegion.disk(2, 1)))
    lim = sorted(p.real for p in limit_set_two(cfg).points)
    oracle = sorted(iterate_fixed_point(cfg, w, 0.5).real for w in ([0, 1], [1, 0]))
    lim_err = max(abs(a - b) for a, b in zip(lim, [-np.sqrt(3), np.sqrt(3)]))
    oracle_err = max(abs(a - b) for a, b in zip(lim, oracle))
    nested = check_nesting(orbit_disks(cfg, 10))
    ring = SchottkyConfig(tuple(DiskRegion.disk(np.exp(2j * np.pi * i / 3), 0.7) for i in range(3)))
    nested &= check_nesting(orbit_disks(ring, 10))
    ok = counts_ok and lim_err < 1e-8 and oracle_err < 1e-8 and nested
    record(12, ok, f"counts={counts_ok}, limit error {lim_err:.1e} (oracle {oracle_err:.1e}), "
                   f"nesting depth 10={nested}")
    assert ok


def test_criterion_13_koebe():
    circles = [AnalyticLoop.circle(-2, 1.0), AnalyticLoop.circle(2, 0.5),
               AnalyticLoop.circle(3j, 0.7)]
    fixed = koebe_iterate(circles, tol=1e-10).residual
    loops = suites.perturbed_loops(7, amplitude=0.05)
    res = koebe_iterate(loops, tol=1e-6)
    L = loops[0]
    others = np.concatenate([x.points(512) for x in loops[1:]])
    d = np.min(np.abs(others - L.center))
    rmax = L.radius(np.linspace(0, 2 * np.pi, 2048)).max()
    ann = annulus_modulus_check(res, L.center, rmax + 0.25 * (d - rmax), rmax + 0.75 * (d - rmax))
    qs = suites.qs_suite(600, seed=0)
    ok = (fixed < 1e-10 and res.residual < 1e-6 and res.iterations < 200
          and ann["deviation"] < 0.05 and qs.passed)
    record(13, ok, f"fixed point {fixed:.1e}; 3 loops {res.residual:.1e} in {res.iterations} "
                   f"steps; annulus deviation {ann['deviation']:.1e}; H {qs.summary['H'][0]:.3f}"
                   f" -> {qs.summary['H'][1]:.3f} ({qs.summary['spread']:.1%})")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
