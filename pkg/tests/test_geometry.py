import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_qc.geometry import (INF, Cap, ContinuumSample, DiskRegion, GeneralizedCircle,
                                  GeometryError, MoebiusMap, chordal_dist, cross_ratio,
                                  dcross_bruteforce, dcross_estimate, lift, map_disk, project,
                                  random_moebius, reflect_in, region_gap, relative_distance,
                                  spherical_area, spherical_dist)

finite = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
seeds = st.integers(0, 2**32 - 1)


def chordal_oracle(z, w):
    return 2 * abs(z - w) / np.sqrt((1 + abs(z) ** 2) * (1 + abs(w) ** 2))


@given(finite, finite)
def test_chordal_matches_closed_form(z, w):
    assert chordal_dist(z, w) == pytest.approx(chordal_oracle(z, w), rel=1e-9, abs=1e-12)


@given(finite)
def test_chordal_to_infinity(z):
    assert chordal_dist(z, INF) == pytest.approx(2 / np.sqrt(1 + abs(z) ** 2), rel=1e-12)


@given(finite, finite)
def test_lift_is_isometric_and_inverted_by_project(z, w):
    X, Y = lift(z), lift(w)
    assert np.linalg.norm(X) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(X - Y) == pytest.approx(chordal_oracle(z, w), rel=1e-9, abs=1e-12)
    assert abs(complex(project(X)) - z) <= 1e-9 * max(1.0, abs(z)) ** 2


def test_poles():
    assert np.allclose(lift(0), [0, 0, -1])
    assert np.allclose(lift(INF), [0, 0, 1])
    assert np.isinf(complex(project(np.array([0.0, 0.0, 1.0]))).real)


@given(finite, finite)
def test_spherical_distance_is_arc_of_chord(z, w):
    c = chordal_oracle(z, w)
    assert spherical_dist(z, w) == pytest.approx(2 * np.arcsin(min(1.0, c / 2)), abs=1e-9)


@settings(max_examples=60)
@given(seeds)
def test_moebius_preserves_cross_ratio(seed):
    rng = np.random.default_rng(seed)
    m = random_moebius(rng)
    pts = rng.normal(size=4) + 1j * rng.normal(size=4)
    before = cross_ratio(*pts)
    after = cross_ratio(*[complex(m(p)) for p in pts])
    assert after == pytest.approx(before, rel=1e-6)


@settings(max_examples=60)
@given(seeds)
def test_composition_and_inverse(seed):
    rng = np.random.default_rng(seed)
    a, b = random_moebius(rng), random_moebius(rng)
    z = rng.normal(size=5) + 1j * rng.normal(size=5)
    assert np.allclose(a.compose(b)(z), a(b(z)), rtol=1e-7, atol=1e-9)
    assert a.compose(a.inverse()).is_identity(1e-9)


def test_fixing_sends_triple_to_zero_one_infinity():
    m = MoebiusMap.fixing(2 + 1j, -1, 3j)
    out = m(np.array([2 + 1j, -1, 3j]))
    assert abs(out[0]) < 1e-12 and abs(out[1] - 1) < 1e-12 and np.isinf(out[2].real)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 5), finite)
def test_reflection_is_an_involution_fixing_the_circle(x, y, r, z):
    C = GeneralizedCircle.circle(complex(x, y), r)
    if abs(z - C.center) < 1e-3:
        return
    w = complex(reflect_in(C, z))
    assert abs(complex(reflect_in(C, w)) - z) <= 1e-8 * max(1, abs(z))
    # |w - c| · |z - c| = r²
    assert abs(w - C.center) * abs(z - C.center) == pytest.approx(r * r, rel=1e-9)
    p = C.center + r * np.exp(1j * 0.7)
    assert abs(complex(reflect_in(C, p)) - p) < 1e-12 * max(1, abs(p))


@settings(max_examples=50)
@given(seeds)
def test_map_disk_agrees_with_pointwise_images(seed):
    rng = np.random.default_rng(seed)
    D = DiskRegion.disk(complex(*rng.normal(size=2)), float(rng.uniform(0.2, 2)))
    m = random_moebius(rng, spread=0.5)
    try:
        E = map_disk(m, D)
    except GeometryError:
        return
    inside = D.center + 0.5 * D.radius * np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
    assert np.all(E.contains(m(inside), tol=1e-9))


@given(st.floats(0.05, 3.0))
def test_cap_area_closed_form(theta):
    cap = Cap((0.0, 0.0, -1.0), theta)
    assert spherical_area(cap) == pytest.approx(2 * np.pi * (1 - np.cos(theta)), rel=1e-12)


@settings(max_examples=200)
@given(st.floats(-1, 1), st.floats(0, 2 * np.pi), st.floats(-10, -1))
def test_tiny_cap_chart_disk(height, azimuth, log_theta):
    # boundary of the chart disk lifts back onto the cap's rim, to relative precision
    rho = np.sqrt(1 - height**2)
    axis = np.array([rho * np.cos(azimuth), rho * np.sin(azimuth), height])
    theta = 10.0**log_theta
    cap = Cap(tuple(axis), theta)
    pts = lift(cap.to_region().boundary.sample(16))
    angle = np.arctan2(np.linalg.norm(np.cross(pts, cap.axis), axis=-1), pts @ np.asarray(cap.axis))
    assert np.allclose(angle, theta, rtol=1e-6)


def test_cap_round_trip_through_chart():
    rng = np.random.default_rng(5)
    for _ in range(500):
        cap = Cap(tuple(rng.normal(size=3)), rng.uniform(0, np.pi))
        back = Cap.from_region(cap.to_region())
        assert back.theta == pytest.approx(cap.theta, abs=1e-10)
        assert np.allclose(back.axis, cap.axis, atol=1e-9)


def test_unit_disk_is_half_sphere():
    assert spherical_area(DiskRegion.disk(0, 1)) == pytest.approx(2 * np.pi, rel=1e-12)


def test_region_gap_of_disjoint_disks_is_positive():
    assert region_gap(DiskRegion.disk(-2, 1), DiskRegion.disk(2, 1)) > 0
    assert region_gap(DiskRegion.disk(-1, 1.5), DiskRegion.disk(1, 1.5)) < 0


@settings(max_examples=40)
@given(seeds)
def test_dcross_chain_and_bruteforce(seed):
    rng = np.random.default_rng(seed)
    E = ContinuumSample.segment(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)), 12)
    F = ContinuumSample.circle(complex(*(3 + rng.normal(size=2))), float(rng.uniform(0.1, 1)), 12)
    delta = relative_distance(E, F)
    D = dcross_estimate(E, F)
    assert delta * (1 - 1e-12) <= D <= 2 * delta * (1 + 1e-12)
    assert dcross_bruteforce(E, F) == pytest.approx(D, rel=1e-9)


def test_relative_distance_of_separated_segments():
    # distance 1, both diameters 1 (Euclidean): Δ = 1
    E = ContinuumSample.segment(0, 1, 16)
    F = ContinuumSample.segment(1j, 1 + 1j, 16)
    assert relative_distance(E, F, "euclidean") == pytest.approx(1.0, rel=1e-12)
