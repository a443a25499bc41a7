import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_qc.geometry import random_rotation, rotation_moebius
from schottky_qc.koebe import (AnalyticLoop, LoopError, conjugate, koebe_iterate, riemann_step,
                               weak_qs_check)


@given(st.integers(1, 20), st.floats(-3, 3))
def test_conjugate_of_cosine_is_sine(k, phase):
    t = 2 * np.pi * np.arange(128) / 128
    assert np.allclose(conjugate(np.cos(k * t + phase)), np.sin(k * t + phase), atol=1e-12)


@pytest.mark.parametrize("a,b", [(1.2, 1.0), (1.0, 0.8), (2.0, 1.9)])
def test_exterior_map_of_an_ellipse(a, b):
    # Joukowski: w ↦ c + (a+b)/2 · w + (a-b)/2 / w maps |w| > 1 onto the ellipse exterior
    c = 0.3 - 0.2j
    E = AnalyticLoop.ellipse(c, a, b)
    m = riemann_step(E, "exterior")
    w = 1.7 * np.exp(1j * np.linspace(0, 2 * np.pi, 40, endpoint=False))
    z = c + (a + b) / 2 * w + (a - b) / 2 / w
    assert np.allclose(np.abs(m(z)), 1.7, rtol=1e-8)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3))
def test_circle_loop_contains_its_center(x, y, r):
    L = AnalyticLoop.circle(complex(x, y), r)
    assert L.contains(np.array([complex(x, y)]))[0]
    assert not L.contains(np.array([complex(x + 1.01 * r, y)]))[0]
    assert L.circularity() < 1e-12


def test_circle_domain_is_a_fixed_point():
    loops = [AnalyticLoop.circle(-2, 1.0), AnalyticLoop.circle(2, 0.5),
             AnalyticLoop.circle(3j, 0.7)]
    res = koebe_iterate(loops, tol=1e-10)
    assert res.residual < 1e-10
    z = np.array([0.1 + 0.2j, -5 + 1j, 4j])
    assert np.allclose(res.map(z), z, atol=1e-9)


def test_overlapping_loops_rejected():
    with pytest.raises(LoopError):
        koebe_iterate([AnalyticLoop.circle(0, 1), AnalyticLoop.circle(0.5, 1)])


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_two_perturbed_circles_converge(seed):
    rng = np.random.default_rng(seed)
    loops = [AnalyticLoop.perturbed_circle(c, r, 0.03, 3, rng) for c, r in ((-2, 1.0), (2, 0.8))]
    res = koebe_iterate(loops, tol=1e-6)
    assert res.residual < 1e-6
    assert res.triple_error() < 1e-6
    assert res.min_gap() > 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weak_qs_of_a_sphere_rotation_is_one(seed):
    # rotations are spherical isometries, so every distance ratio is preserved
    rng = np.random.default_rng(seed)
    z = rng.normal(size=40) + 1j * rng.normal(size=40)
    m = rotation_moebius(random_rotation(rng))
    assert weak_qs_check(z, m(z)).H == pytest.approx(1.0, abs=1e-9)
    assert weak_qs_check(z, 3 * z).H > 1.0
