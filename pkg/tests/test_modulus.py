import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_qc.annulus import Annulus
from schottky_qc.geometry import DiskRegion
from schottky_qc.modulus import (FamilySpec, GridSpec, brute_force_check, classical_modulus,
                                 explicit_admissibility, explicit_annulus_density,
                                 narrow_passage, narrow_passage_grid, random_family,
                                 random_path_check, toy_suite, transboundary_modulus)


def annulus_grid(R, n):
    W = 1.05 * R
    return GridSpec.uniform((-W, W, -W, W), n)


@pytest.mark.parametrize("R", [2.0, np.e, 8.0])
def test_annulus_modulus_matches_closed_form(R):
    res = classical_modulus(annulus_grid(R, 96), FamilySpec.annulus(Annulus(0j, 1.0, R)))
    assert res.estimate == pytest.approx(2 * np.pi / np.log(R), rel=0.05)


def test_rectangle_modulus():
    # curves joining the short sides of a 2 × 1 rectangle: modulus = height / length = 1/2
    n, h = 48, 1 / 48
    g = GridSpec.uniform((-h, 2 + h, 0, 1), (2 * n + 2, n))
    fam = FamilySpec.connecting((-1, 0, 0, 1), (2, 3, 0, 1), domain=(0, 2, 0, 1))
    assert classical_modulus(g, fam).estimate == pytest.approx(0.5, rel=0.02)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_obstacles_transboundary_equals_classical(seed):
    g, fam = random_family(np.random.default_rng(seed))
    a = classical_modulus(g, fam).estimate
    b = transboundary_modulus(g, fam).estimate
    assert b == pytest.approx(a, rel=1e-3)


def test_obstacles_order_the_moduli():
    A = Annulus(0j, 1.0, 3.0)
    g = annulus_grid(3.0, 64)
    obs = [DiskRegion.disk(2, 0.4), DiskRegion.disk(-1.8j, 0.5)]
    free = classical_modulus(g, FamilySpec.annulus(A)).estimate
    cl = classical_modulus(g, FamilySpec.annulus(A, obs)).estimate
    tb = transboundary_modulus(g, FamilySpec.annulus(A, obs))
    # removing obstacles shrinks the family; letting curves cross them restores part of it
    assert cl < tb.estimate <= free * (1 + 1e-9)
    assert np.all(tb.obstacle_weights >= 0)
    assert tb.admissibility >= 1 - 1e-6


def test_extremal_density_is_admissible_on_random_walks():
    fam = narrow_passage(0.1)
    res = transboundary_modulus(narrow_passage_grid(0.1, 48), fam)
    chk = random_path_check(res, 300, seed=1)
    assert chk["min"] >= 1 - 1e-6


def test_cutting_plane_matches_exhaustive_paths():
    for case in toy_suite(6, seed=11):
        out = brute_force_check(case["grid"], case["family"])
        assert out["enumerated"]
        assert out["relative_error"] < 1e-6


def test_toy_suite_is_a_fixed_enumeration_set():
    a = [(c["nx"], c["ny"], c["blocked"], c["obstacles"], c["paths"]) for c in toy_suite(8)]
    b = [(c["nx"], c["ny"], c["blocked"], c["obstacles"], c["paths"]) for c in toy_suite(8)]
    assert a == b
    assert all(c[0] <= 6 and c[1] <= 6 and len(c[3]) <= 2 for c in a)


def test_explicit_density_free_bound_and_admissibility():
    for w in (3.0, 10.0):
        A = Annulus(0j, 2 * np.exp(-w), 2.0, "spherical")
        free = explicit_annulus_density(A, ())
        assert free.mass <= free.free_bound
        adm = explicit_admissibility(free, 200, 0)
        assert adm["min"] >= 1 - 1e-3
