import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmfield.core import Vec2
from swarmfield.geometry import (
    KAPPA_EPS,
    Arc,
    Pose,
    arc_end_pose,
    arc_point,
    curvature_integral,
    sample_arc,
)


def arc(kappa, length, omega=0.0, start=(0.0, 0.0)):
    return Arc(Pose(Vec2(*start), omega), omega, kappa, length)


def centre_form(a: Arc, s: float) -> np.ndarray:
    """Turning-centre parametrization, used as an independent oracle."""
    r = 1.0 / a.kappa
    ox = a.start.position.x - r * math.sin(a.omega)
    oy = a.start.position.y + r * math.cos(a.omega)
    th = a.omega + a.kappa * s
    return np.array([ox + r * math.sin(th), oy - r * math.cos(th)])


def test_straight_point():
    p = arc_point(arc(0.0, 10.0), 5.0)
    assert (p.x, p.y) == (5.0, 0.0)


@pytest.mark.parametrize("kappa,ey", [(0.1, 10.0), (-0.1, -10.0)])
def test_quarter_circle(kappa, ey):
    a = arc(kappa, math.pi * 10 / 2)
    p = arc_point(a, a.length)
    assert p.x == pytest.approx(10.0, abs=1e-9)
    assert p.y == pytest.approx(ey, abs=1e-9)
    c = a.turning_center
    assert p.dist(c) == pytest.approx(10.0, abs=1e-9)
    # 90 degree sweep about the centre
    v0, v1 = a.start.position - c, p - c
    assert v0.x * v1.x + v0.y * v1.y == pytest.approx(0.0, abs=1e-9)


def test_end_heading():
    assert arc_end_pose(arc(0.0, 3.0, omega=0.4)).heading == pytest.approx(0.4)
    a = arc(0.1, math.pi * 10 / 2, omega=0.3)
    assert arc_end_pose(a).heading == pytest.approx(0.3 + math.pi / 2)


def test_opposite_arcs_cancel_heading():
    a1 = arc(0.07, 6.0, omega=0.2)
    e1 = arc_end_pose(a1)
    a2 = Arc(e1, e1.heading, -0.07, 6.0)
    assert arc_end_pose(a2).heading == pytest.approx(0.2, abs=1e-12)


def test_sample_counts_and_spacing():
    s = sample_arc(arc(0.0, 4.0), 1)
    assert len(s.points) == 2
    s = sample_arc(arc(0.0, 4.0), 4)
    np.testing.assert_allclose(s.points, [[0, 0], [1, 0], [2, 0], [3, 0], [4, 0]], atol=1e-12)
    assert s.spacing == 1.0


def test_samples_equidistant_from_centre():
    a = arc(0.1, 12.0, omega=0.5, start=(3.0, 4.0))
    c = a.turning_center
    d = np.hypot(*(sample_arc(a, 25).points - [c.x, c.y]).T)
    np.testing.assert_allclose(d, 10.0, atol=1e-9)


@pytest.mark.parametrize("r", [0.5, 3.0, 20.0, 1e4])
def test_semicircle_curvature_integral(r):
    assert curvature_integral(arc(1.0 / r, math.pi * r)) == pytest.approx(math.pi, abs=1e-9)


def test_curvature_integral_values():
    assert curvature_integral(arc(0.0, 7.0)) == 0.0
    assert curvature_integral(arc(1 / 20, 5.0)) == pytest.approx(0.25, abs=1e-15)


@given(st.floats(-math.pi, math.pi), st.floats(0.01, 2.0).map(lambda v: v * 1.0),
       st.floats(0.1, 50.0), st.floats(0.0, 1.0))
def test_chord_form_matches_centre_form(omega, kappa, length, frac):
    a = Arc(Pose(Vec2(1.0, -2.0), omega), omega, kappa, length)
    s = frac * length
    p = arc_point(a, s)
    np.testing.assert_allclose([p.x, p.y], centre_form(a, s), atol=1e-9 * max(1, 1 / kappa))


@given(st.floats(-math.pi, math.pi), st.floats(1.0, 50.0), st.sampled_from([1, -1]))
def test_small_kappa_continuity(omega, length, sign):
    curved = Arc(Pose(Vec2(0, 0), omega), omega, sign * KAPPA_EPS, length)
    straight = Arc(Pose(Vec2(0, 0), omega), omega, 0.0, length)
    for s in np.linspace(0, length, 11):
        assert arc_point(curved, s).dist(arc_point(straight, s)) < 1e-6 * length


@given(st.floats(-0.5, 0.5), st.floats(0.5, 30.0))
def test_arc_length_isometry(kappa, length):
    pts = sample_arc(arc(kappa, length, omega=0.3), 1000).points
    poly = float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))
    assert poly == pytest.approx(length, abs=1e-4 * length)


@given(st.floats(-math.pi, math.pi), st.floats(-0.5, 0.5), st.floats(-math.pi, math.pi),
       st.floats(-50, 50), st.floats(-50, 50))
def test_rotation_equivariance(omega, kappa, theta, x, y):
    a = Arc(Pose(Vec2(x, y), omega), omega, kappa, 8.0)
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    px, py = rot @ [x, y]
    b = Arc(Pose(Vec2(px, py), omega + theta), omega + theta, kappa, 8.0)
    pa, pb = sample_arc(a, 8).points, sample_arc(b, 8).points
    np.testing.assert_allclose(pa @ rot.T, pb, atol=1e-9)


def test_arc_rejects_bad_input():
    with pytest.raises(ValueError):
        arc(0.1, 0.0)
    with pytest.raises(ValueError):
        arc_point(arc(0.1, 1.0), 2.0)
    with pytest.raises(ValueError):
        sample_arc(arc(0.1, 1.0), 0)
