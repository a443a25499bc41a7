import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_qc.bilipschitz import (derivative_check, exhaust_tangent_disks, find_tangencies,
                                     identity_outside_residual, orientation_preserved, pull_map,
                                     push_map, seam_residual)
from schottky_qc.geometry import GeometryError
from schottky_qc.suites import exhaustion_suite

deltas = st.floats(np.pi / 12, np.pi / 3 - 0.05)


@given(deltas)
def test_push_sends_chord_onto_the_circle_arc(delta):
    a, b = 1 - np.cos(delta), np.sin(delta)
    m = push_map(delta)
    chord = -a + 1j * np.linspace(-b, b, 101)
    img = m(chord)
    assert np.max(np.abs(np.abs(img + 1) - 1)) < 1e-12
    # endpoints and midpoint: (-a, ±b) fixed, (-a, 0) goes to the tangency point 0
    assert abs(img[0] - chord[0]) < 1e-12 and abs(img[-1] - chord[-1]) < 1e-12
    assert abs(img[50]) < 1e-12


@given(deltas)
def test_maps_fix_the_rectangle_boundary(delta):
    a, b = 1 - np.cos(delta), np.sin(delta)
    t = np.linspace(0, 1, 50)
    rim = np.concatenate([-2 * a + 1j * b * (2 * t - 1), a + 1j * b * (2 * t - 1),
                          (-2 * a + 3 * a * t) + 1j * b, (-2 * a + 3 * a * t) - 1j * b])
    assert np.max(np.abs(push_map(delta)(rim) - rim)) < 1e-12


@settings(max_examples=10, deadline=None)
@given(deltas, st.sampled_from(["push", "pull"]))
def test_local_properties(delta, kind):
    m = push_map(delta) if kind == "push" else pull_map(delta)
    assert seam_residual(m) < 1e-9
    assert identity_outside_residual(m, 2000, 0) == 0.0
    dc = derivative_check(m, 2000, 0)
    assert dc["violations"] == 0
    for piece in dc["pieces"].values():
        assert piece["fd_mismatch"] < 1e-5
    assert orientation_preserved(m)


def test_placed_map_conjugates_by_the_similarity():
    m = push_map(0.5)
    p = m.placed(3 + 1j, 2j)
    z = np.array([-0.1 + 0.05j, -0.2 - 0.1j])
    assert np.allclose(p(3 + 1j + 2j * z), 3 + 1j + 2j * m(z))


def test_delta_outside_range_rejected():
    with pytest.raises(ValueError):
        push_map(np.pi / 3)


def test_tangency_detection():
    t = find_tangencies([(-1, 1), (1, 1), (5, 1)])
    assert len(t) == 1 and abs(t[0].point) < 1e-15
    with pytest.raises(GeometryError):
        find_tangencies([(-1, 1.2), (1, 1.2)])


def test_exhaustion_two_unit_disks():
    rep = exhaustion_suite()
    assert rep.passed, rep.violated
    assert rep.seconds < 10


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 10), st.floats(0.3, 3.0))
def test_exhaustion_regions_are_separated(n, r2):
    disks = [(-1 + 0j, 1.0), (r2 + 0j, r2)]
    st_ = exhaust_tangent_disks(disks, n)
    assert st_.gap(0, 1) > 0
    s_n = min(1.0, r2) / 4 * 2.0 ** (-n)
    assert all(R.hausdorff_to_disk() <= s_n * (1 + 1e-12) for R in st_.regions)
