"""Quadrotor flight energy for one constant-curvature planning step.

The energy of flying a step splits into a turning part, proportional to the
integrated absolute curvature, and a part that depends only on step length::

    E_n     = e_v * integral |kappa| ds,   e_v = m v^2 (v sin(alpha) + v_i) sin(beta)
    E_const = (F_drag sin(alpha) cos(beta) + m g cos(alpha) cos(beta)) (v sin(alpha) + v_i) L

Pitch, roll, speed and induced velocity are held constant within a step and
wind is ignored (airspeed equals ground speed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DegenerateRollError(ValueError):
    """The turning-energy model needs a strictly positive roll angle."""


@dataclass(frozen=True)
class EnergyParams:
    mass: float = 2.0
    gravity: float = 9.81
    air_density: float = 1.225
    drag_coeff: float = 1.0
    ref_area: float = 0.2
    pitch: float = 0.1
    roll: float = 0.2
    induced_velocity: float = 5.0
    speed: float = 10.0


@dataclass(frozen=True)
class StepEnergy:
    e_turn: float
    e_const: float

    @property
    def total(self) -> float:
        return self.e_turn + self.e_const


def drag_force(p: EnergyParams, v_a: float) -> float:
    return 0.5 * p.air_density * v_a * v_a * p.drag_coeff * p.ref_area


def _power_factor(p: EnergyParams) -> float:
    return p.speed * math.sin(p.pitch) + p.induced_velocity


def thrust_magnitude(p: EnergyParams, f_n: float, f_drag: float | None = None) -> float:
    """Body-frame projection sum of drag, weight and centripetal force."""
    if f_drag is None:
        f_drag = drag_force(p, p.speed)
    sa, ca = math.sin(p.pitch), math.cos(p.pitch)
    sb, cb = math.sin(p.roll), math.cos(p.roll)
    return f_drag * sa * cb + p.mass * p.gravity * ca * cb + f_n * sb


def min_power(p: EnergyParams, thrust: float) -> float:
    return thrust * _power_factor(p)


def velocity_coefficient(p: EnergyParams) -> float:
    if math.sin(p.roll) <= 0.0:
        raise DegenerateRollError(f"turning energy undefined for roll={p.roll}")
    return p.mass * p.speed**2 * _power_factor(p) * math.sin(p.roll)


def const_energy_per_meter(p: EnergyParams) -> float:
    f_drag = drag_force(p, p.speed)
    sa, ca, cb = math.sin(p.pitch), math.cos(p.pitch), math.cos(p.roll)
    return (f_drag * sa * cb + p.mass * p.gravity * ca * cb) * _power_factor(p)


def step_energy(p: EnergyParams, arc, entry_turn: float = 0.0) -> StepEnergy:
    """Energy of flying ``arc`` at ``p.speed``.

    ``entry_turn`` is the heading discontinuity (radians) between the previous
    motion direction and the arc's initial tangent; it is charged as turning,
    since the curvature integral of the joined path includes it.
    """
    e_v = velocity_coefficient(p)
    turning = abs(arc.kappa) * arc.length + abs(entry_turn)
    return StepEnergy(e_v * turning, const_energy_per_meter(p) * arc.length)


def fitness_energy_term(p: EnergyParams, arc, kappa_max: float, entry_turn: float = 0.0) -> float:
    """Turning energy of ``arc`` over the turning energy of a full-curvature arc.

    Equals ``|kappa| / kappa_max`` for an arc tangent to the previous motion;
    an entry turn adds ``|entry_turn| / (kappa_max * L)``.
    """
    if kappa_max <= 0:
        raise ValueError(f"kappa_max must be > 0, got {kappa_max}")
    e_v = velocity_coefficient(p) or 1.0
    turning = abs(arc.kappa) * arc.length + abs(entry_turn)
    return (e_v * turning) / (e_v * kappa_max * arc.length)
