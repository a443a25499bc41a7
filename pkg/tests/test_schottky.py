import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_qc.geometry import DiskRegion
from schottky_qc.schottky import (ReflectionWord, SchottkyConfig, SchottkyError, apply_word,
                                  check_nesting, enumerate_words, iterate_fixed_point,
                                  limit_set_two, orbit_disks, reduce_word)


def two_disks():
    return SchottkyConfig((DiskRegion.disk(-2, 1), DiskRegion.disk(2, 1)))


def ring(k, r=0.3):
    """k disjoint disks of radius r centered on the unit circle."""
    return SchottkyConfig(tuple(DiskRegion.disk(np.exp(2j * np.pi * i / k), r) for i in range(k)))


def brute_count(k, n):
    return sum(all(a != b for a, b in zip(w, w[1:])) for w in itertools.product(range(k), repeat=n))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8])
def test_word_counts(k, n):
    words = enumerate_words(k, n)
    assert len(words) == k * (k - 1) ** (n - 1)
    assert len(set(w.letters for w in words)) == len(words)
    if k ** n <= 5 ** 5:
        assert len(words) == brute_count(k, n)


@given(st.lists(st.integers(0, 3), max_size=30))
def test_reduce_word_is_idempotent_and_reduced(letters):
    w = reduce_word(letters, 4)
    assert all(a != b for a, b in zip(w.letters, w.letters[1:]))
    assert reduce_word(w.letters, 4) == w


def test_unreduced_word_rejected():
    with pytest.raises(SchottkyError):
        ReflectionWord((0, 0))


def test_overlapping_disks_rejected():
    with pytest.raises(Exception):
        SchottkyConfig((DiskRegion.disk(-1, 1.5), DiskRegion.disk(1, 1.5)))


def test_limit_points_of_two_disks():
    # closed form: the reflections in |z ∓ 2| = 1 compose to a loxodromic map with fixed
    # points ±√3 (solve x = 2 + 1/(x - 2) composed with x = -2 + 1/(x + 2) on the real line)
    res = limit_set_two(two_disks())
    pts = sorted(p.real for p in res.points)
    assert pts == pytest.approx([-np.sqrt(3), np.sqrt(3)], abs=1e-8)
    assert max(abs(p.imag) for p in res.points) < 1e-8
    oracle = sorted(iterate_fixed_point(two_disks(), w, 0.5).real for w in ([0, 1], [1, 0]))
    assert pts == pytest.approx(oracle, abs=1e-8)


def test_reflection_word_map_is_an_involution():
    cfg = two_disks()
    z = np.array([0.3 + 0.1j, -5j, 7.0])
    assert np.allclose(apply_word(cfg, [0], apply_word(cfg, [0], z)), z)


@pytest.mark.parametrize("cfg,depth", [(two_disks(), 10), (ring(3), 8), (ring(4, 0.25), 6)])
def test_orbit_nesting(cfg, depth):
    orb = orbit_disks(cfg, depth)
    k = cfg.k
    assert len(orb) == k + sum(k * (k - 1) ** n for n in range(1, depth + 1))
    assert check_nesting(orb)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 5), st.floats(0.05, 0.45), st.integers(0, 10**6))
def test_orbit_children_shrink_and_stay_inside(k, radius_factor, seed):
    r = radius_factor * np.sin(np.pi / k)  # keeps neighbouring disks disjoint
    cfg = ring(k, r)
    orb = orbit_disks(cfg, 3)
    assert check_nesting(orb)
    for od in orb:
        if od.parent is not None:
            assert od.cap.diameter() < orb[od.parent].cap.diameter()


def test_unresolvable_orbit_depth_is_reported():
    with pytest.raises(SchottkyError, match="floating-point resolution"):
        orbit_disks(ring(3, 0.3), 10)
