import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_qc.annulus import (Annulus, big_disk_bound_search, meets_both_boundaries,
                                 relative_width, subannulus_select, verify_subannulus)
from schottky_qc.geometry import ContinuumSample, DiskRegion
from schottky_qc.suites import random_subannulus_input

seeds = st.integers(0, 2**32 - 1)


def test_width_is_log_ratio():
    assert Annulus(0j, 0.5, 4.0).width == pytest.approx(np.log(8.0))


def test_invalid_annulus_rejected():
    with pytest.raises(ValueError):
        Annulus(0j, 2.0, 1.0)
    with pytest.raises(ValueError):
        Annulus(0j, 1.0, 4.0, "spherical")


@given(st.floats(0.1, 10), st.floats(0.01, 0.99))
def test_relative_width_of_a_disk_on_the_axis(d, frac):
    # a disk of radius ρ centered at distance d from 0 spans distances [d - ρ, d + ρ]
    rho = frac * d
    A = Annulus(0j, 1e-3, 1e3)
    rep = relative_width(A, DiskRegion.disk(d * np.exp(0.3j), rho))
    assert rep.meets
    assert rep.w == pytest.approx(np.log((d + rho) / (d - rho)), rel=1e-9)


def test_relative_width_of_a_set_missing_the_annulus():
    A = Annulus(0j, 1.0, 2.0)
    assert relative_width(A, DiskRegion.disk(10, 1)).w == 0.0
    assert not relative_width(A, DiskRegion.disk(10, 1)).meets


def test_segment_crossing_annulus_meets_both_boundaries():
    A = Annulus(0j, 1.0, 2.0)
    assert meets_both_boundaries(A, ContinuumSample.segment(0.5, 3.0, 8))
    assert not meets_both_boundaries(A, ContinuumSample.segment(1.2, 1.5, 8))


@given(st.floats(0.2, 5), st.floats(0.2, 5))
def test_relative_width_never_exceeds_annulus_width(a, b):
    A = Annulus(0j, 0.3, 7.0)
    K = ContinuumSample.segment(complex(a, 0), complex(0, b), 16)
    assert 0 <= relative_width(A, K).w <= A.width + 1e-12


@settings(max_examples=200, deadline=None)
@given(seeds, st.sampled_from(["euclidean", "spherical"]))
def test_subannulus_postconditions(seed, metric):
    A, Ks = random_subannulus_input(np.random.default_rng(seed), metric)
    res = subannulus_select(A, Ks)
    ok, msg = verify_subannulus(A, Ks, res)
    assert ok, msg
    # independent restatement of the width guarantee and containment
    assert res.annulus.width >= min(A.width, A.width ** (1 / 9)) - 1e-12
    assert A.r - 1e-12 <= res.annulus.r < res.annulus.R <= A.R + 1e-12
    if res.alternative == "two-spanning":
        for i in res.indices:
            assert meets_both_boundaries(res.annulus, Ks[i])


def test_subannulus_with_thin_sets_keeps_the_annulus():
    A = Annulus(0j, 0.01, 1.0)
    Ks = [DiskRegion.disk(0.5, 0.01), DiskRegion.disk(-0.1j, 0.001)]
    res = subannulus_select(A, Ks)
    assert res.alternative == "one-small" and res.annulus == A


def test_big_disk_control_grows():
    ctrl = big_disk_bound_search(1.0, 200, 0, strata=(2.0, 5.0, 10.0), drop_second=True)
    vals = [ctrl.strata[w] for w in sorted(ctrl.strata)]
    assert np.all(np.diff(vals) > 0)


def test_orbit_search_handles_tiny_disks():
    # trial whose disk D has angular radius ~7e-9; its orbit images are tinier still
    from schottky_qc.annulus import _orbit_max_fast, _trial_rng, orbit_width_check, random_orbit_config
    from schottky_qc.schottky import enumerate_words

    A, K1, K2, D = random_orbit_config(_trial_rng(0, 2 * 1_000_003 + 7177), 10.0)
    words = [w for n in range(5) for w in enumerate_words(2, n)]
    fast = _orbit_max_fast(A, K1, K2, D, words)
    assert fast == pytest.approx(orbit_width_check(A, K1, K2, D, 4, check=False)["max"], rel=1e-9)
    assert fast < 1e-4
