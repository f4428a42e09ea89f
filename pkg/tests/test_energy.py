import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmfield.core import Vec2
from swarmfield.energy import (
    DegenerateRollError,
    EnergyParams,
    drag_force,
    fitness_energy_term,
    min_power,
    step_energy,
    thrust_magnitude,
    velocity_coefficient,
)
from swarmfield.geometry import Arc, Pose

mpmath.mp.dps = 40


def arc(kappa, length=5.0):
    return Arc(Pose(Vec2(0, 0), 0.0), 0.0, kappa, length)


def test_drag():
    p = EnergyParams(air_density=1.225, drag_coeff=1.0, ref_area=1.0)
    assert drag_force(p, 0.0) == 0.0
    assert drag_force(p, 10.0) == pytest.approx(61.25, abs=1e-12)
    assert drag_force(p, 20.0) == pytest.approx(4 * drag_force(p, 10.0), rel=1e-15)


def test_hover_thrust():
    p = EnergyParams(pitch=0.0, roll=0.0)
    assert thrust_magnitude(p, 0.0, 0.0) == pytest.approx(p.mass * p.gravity, rel=1e-15)


def test_thrust_against_rotated_body_axis():
    # oracle: project the world force vector onto the body z axis of R = Ry(alpha) Rx(beta)
    import numpy as np
    a = b = 0.1
    p = EnergyParams(mass=2.0, gravity=9.81, pitch=a, roll=b)
    ry = np.array([[math.cos(a), 0, math.sin(a)], [0, 1, 0], [-math.sin(a), 0, math.cos(a)]])
    rx = np.array([[1, 0, 0], [0, math.cos(b), -math.sin(b)], [0, math.sin(b), math.cos(b)]])
    z_body = (ry @ rx)[:, 2]
    force = np.array([5.0, -3.0, 2.0 * 9.81])  # drag along x, centripetal along -y, weight
    expected = float(force @ z_body)
    assert thrust_magnitude(p, 3.0, 5.0) == pytest.approx(expected, rel=1e-12)


def test_thrust_monotone_in_normal_force():
    p = EnergyParams()
    assert thrust_magnitude(p, 6.0) > thrust_magnitude(p, 3.0)


def test_min_power():
    p = EnergyParams(speed=10.0, pitch=0.1, induced_velocity=5.0)
    expected = 20 * (10 * mpmath.sin(mpmath.mpf("0.1")) + 5)
    assert min_power(p, 20.0) == pytest.approx(float(expected), rel=1e-14)
    assert min_power(p, 20.0) == pytest.approx(119.97, abs=0.01)
    assert min_power(p, 0.0) == 0.0
    assert min_power(EnergyParams(pitch=0.0), 7.0) == 7.0 * 5.0


def test_velocity_coefficient():
    p = EnergyParams(mass=2.0, speed=10.0, pitch=0.1, induced_velocity=5.0, roll=0.2)
    mp = mpmath.mpf
    expected = 2 * 100 * (10 * mpmath.sin(mp("0.1")) + 5) * mpmath.sin(mp("0.2"))
    assert velocity_coefficient(p) == pytest.approx(float(expected), rel=1e-14)
    # the commonly quoted rounding, 238.31, is off in the second decimal
    assert velocity_coefficient(p) == pytest.approx(238.31, abs=0.05)
    assert velocity_coefficient(EnergyParams(speed=0.0)) == 0.0
    assert velocity_coefficient(EnergyParams(mass=6.0)) == pytest.approx(
        3 * velocity_coefficient(EnergyParams(mass=2.0)), rel=1e-15)


def test_zero_roll_rejected():
    with pytest.raises(DegenerateRollError):
        velocity_coefficient(EnergyParams(roll=0.0))


def test_straight_step_has_no_turning_energy():
    e = step_energy(EnergyParams(), arc(0.0))
    assert e.e_turn == 0.0
    assert e.total == e.e_const


@pytest.mark.parametrize("r", [1.0, 7.0, 40.0])
def test_semicircle_turning_energy(r):
    p = EnergyParams()
    e = step_energy(p, arc(1 / r, math.pi * r))
    assert e.e_turn == pytest.approx(velocity_coefficient(p) * math.pi, rel=1e-12)


def test_more_curvature_costs_more():
    p = EnergyParams()
    assert step_energy(p, arc(0.1)).total < step_energy(p, arc(0.3)).total


@pytest.mark.parametrize("k,expected", [(0.0, 0.0), (0.5, 1.0), (0.25, 0.5)])
def test_fitness_energy_term(k, expected):
    assert fitness_energy_term(EnergyParams(), arc(k), 0.5) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-2, 2), st.floats(0.1, 20))
def test_decomposition_and_evenness(kappa, length):
    p = EnergyParams()
    e = step_energy(p, arc(kappa, length))
    assert e.total == e.e_turn + e.e_const
    mirror = step_energy(p, arc(-kappa, length))
    assert mirror.total == e.total
    assert step_energy(p, arc(0.0, length)).e_const == e.e_const


@given(st.floats(-0.5, 0.5), st.floats(0.1, 10), st.floats(0.1, 10))
def test_fitness_term_independent_of_mass(kappa, m1, m2):
    a = arc(kappa)
    t1 = fitness_energy_term(EnergyParams(mass=m1), a, 0.5)
    t2 = fitness_energy_term(EnergyParams(mass=m2), a, 0.5)
    assert t1 == pytest.approx(t2, rel=1e-12, abs=1e-15)
