import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmfield.core import Obstacle, UavState, Vec2
from swarmfield.field import (
    EnvironmentField,
    ObstacleFieldParams,
    SwarmFieldParams,
    binarize,
    build_field,
    field_at,
)
from swarmfield.geometry import ArcSamples, arc_end_pose
from swarmfield.planner import (
    DegenerateIntensityError,
    PlanRequest,
    adjust_swarm,
    contour_seeds,
    fitness_batch,
    pairwise_shift,
    plan_step,
    safety_term,
    step_fitness,
)
from swarmfield.pso import PsoConfig, grid_search_oracle

EMPTY = EnvironmentField(None, ())


def big_edge():
    """Huge disk whose level sets are straight lines near the origin (x = const)."""
    f = EnvironmentField(None, (ObstacleFieldParams(Vec2(-1e5, 0), 0.0, 1.0, 1e7, 10.0),))
    return binarize(f, field_at(f, Vec2(0, 0)))


def on_edge_points(n):
    # points on the level set through the origin
    return np.array([[-1e5 + 1e5 * math.cos(t), 1e5 * math.sin(t)]
                     for t in np.linspace(-2e-5, 2e-5, n)])


# ---- safety term -----------------------------------------------------------

def test_safety_uniform():
    view = binarize(EMPTY, 0.0)
    assert safety_term(view, ArcSamples(np.random.default_rng(0).uniform(-9, 9, (11, 2)), 1), 0.5) == 0.0


def test_safety_on_edge():
    assert safety_term(big_edge(), ArcSamples(on_edge_points(11), 0.2), 0.5) == -1.0


def test_safety_half_on_edge():
    pts = np.vstack([on_edge_points(5), [[-50, 0], [-60, 0], [-70, 0], [-80, 0], [-90, 0]]])
    assert safety_term(big_edge(), ArcSamples(pts, 1), 0.5) == -0.5


# ---- step fitness ----------------------------------------------------------

def req(field=EMPTY, heading=0.0, pos=Vec2(0, 0), **kw):
    return PlanRequest(UavState(0, pos, 10.0, heading), field, **kw)


def test_energy_only_argmin_is_straight():
    r = req(heading=0.3, lambda1=1.0, lambda2=0.0)
    best, f = grid_search_oracle(r.bounds, 51, lambda c: fitness_batch(r, c)[0], vectorized=True)
    assert best[1] == pytest.approx(0.0, abs=1e-12) and f == pytest.approx(0.0, abs=1e-12)


@given(st.floats(-0.5, 0.5))
def test_uniform_field_fitness(kappa):
    r = req()
    fit, f_e, f_s = step_fitness(r, (0.0, kappa))
    assert f_s == 0.0
    assert fit == pytest.approx(0.5 * abs(kappa) / 0.5, abs=1e-15)
    assert fit == 0.5 * f_e + 0.5 * f_s


def test_safety_only_oracle_tracks_level_set():
    obs = Obstacle(Vec2(0, 40), Vec2(0, 0), 26.0, 60.0)
    field = EnvironmentField(None, (ObstacleFieldParams.from_obstacle(obs, 10.0),))
    # a 10 m step: the tangent line drifts 1.25 m off the 40 m circle, an arc does not
    r = req(field, heading=0.0, lambda1=0.0, lambda2=1.0, step_length=10.0, n_samples=20)
    best, f = grid_search_oracle(r.bounds, 51, lambda c: fitness_batch(r, c)[0], vectorized=True)
    assert f <= -0.9
    end = arc_end_pose(r.arc(*best)).position
    assert abs(end.dist(obs.position) - 40.0) < r.grad_step
    assert best[1] > 0  # bends left, around the obstacle centre
    straight = arc_end_pose(r.arc(0.0, 0.0)).position
    assert abs(straight.dist(obs.position) - 40.0) > r.grad_step


@settings(max_examples=20)
@given(st.integers(0, 2**31))
def test_uniform_field_plan_is_nearly_straight(seed):
    step = plan_step(req(), PsoConfig(rng_seed=seed))
    assert abs(step.arc.kappa) <= 0.05 * 0.5
    assert step.fitness == 0.5 * step.f_e + 0.5 * step.f_s


def head_on_request():
    states = [UavState(0, Vec2(0, 0), 10.0, 0.0)]
    obs = Obstacle(Vec2(40, 0.5), Vec2(0, 0), 26.0, 50.0)
    field = build_field(states, [obs], Vec2(400, 0), s_adv=80.0)
    return req(field, delta_omega_max=math.pi / 2)


def test_plan_keeps_intensity_better_than_straight():
    r = head_on_request()
    phi0 = field_at(r.field, r.uav.position)
    step = plan_step(r, PsoConfig(rng_seed=3))
    planned = abs(field_at(r.field, arc_end_pose(step.arc).position) - phi0)
    straight = abs(field_at(r.field, arc_end_pose(r.arc(0.0, 0.0)).position) - phi0)
    assert planned < straight


def test_plan_determinism():
    r = head_on_request()
    assert plan_step(r, PsoConfig(rng_seed=9)) == plan_step(r, PsoConfig(rng_seed=9))


def test_contour_seeds_follow_level_set():
    r = head_on_request()
    seeds = contour_seeds(r)
    assert seeds.shape == (2, 2)
    phi0 = field_at(r.field, r.uav.position)
    for omega, kappa in seeds:
        end = arc_end_pose(r.arc(omega, kappa)).position
        assert field_at(r.field, end) == pytest.approx(phi0, rel=1e-3)
    assert contour_seeds(req()).shape == (0, 2)


# ---- pairwise shift --------------------------------------------------------

def phi2_field():
    # Phi(p) = 2 at distance 1 from the leader
    return EnvironmentField(SwarmFieldParams(Vec2(0, 0), 2.0, 1e3, 0.0, Vec2(1, 0)), ())


def test_shift_zero_at_safeguard_distance():
    i, j = UavState(0, Vec2(1, 0), 10.0), UavState(1, Vec2(-9, 0), 10.0)
    assert pairwise_shift(i, j, phi2_field(), Vec2(-100, 0), 10.0) == 0.0


def test_shift_substitution():
    i, j = UavState(0, Vec2(1, 0), 10.0), UavState(1, Vec2(-5, 0), 10.0)
    assert pairwise_shift(i, j, phi2_field(), Vec2(-100, 0), 10.0) == -2.0
    assert pairwise_shift(j, i, phi2_field(), Vec2(-100, 0), 10.0) > 0


def test_faster_uav_moves_away_on_tie():
    f = EnvironmentField(SwarmFieldParams(Vec2(0, 0), 10.0, 1e3, 0.0, Vec2(1, 0)), ())
    i, j = UavState(0, Vec2(3, 1), 12.0), UavState(1, Vec2(3, -1), 8.0)
    ref = Vec2(50, 0)
    assert pairwise_shift(i, j, f, ref, 5.0) < 0
    assert pairwise_shift(j, i, f, ref, 5.0) > 0


def test_id_breaks_full_tie():
    f = EnvironmentField(SwarmFieldParams(Vec2(0, 0), 10.0, 1e3, 0.0, Vec2(1, 0)), ())
    i, j = UavState(0, Vec2(3, 1), 10.0), UavState(1, Vec2(3, -1), 10.0)
    assert pairwise_shift(j, i, f, Vec2(50, 0), 5.0) < 0 < pairwise_shift(i, j, f, Vec2(50, 0), 5.0)


def test_degenerate_intensity():
    i, j = UavState(0, Vec2(1, 0), 10.0), UavState(1, Vec2(2, 0), 10.0)
    with pytest.raises(DegenerateIntensityError):
        pairwise_shift(i, j, EMPTY, Vec2(0, 0), 5.0)


@settings(max_examples=300)
@given(st.floats(2, 30), st.floats(-math.pi, math.pi), st.floats(0.01, 4.9), st.floats(-math.pi, math.pi))
def test_farther_uav_gets_larger_shift(r, t, sep, t2):
    obs = Obstacle(Vec2(0, 0), Vec2(0, 0), 1.0, 40.0)
    f = EnvironmentField(None, (ObstacleFieldParams.from_obstacle(obs, 10.0),))
    pa = Vec2.polar(r, t)
    pb = pa + Vec2.polar(sep, t2)
    i, j = UavState(0, pa, 10.0), UavState(1, pb, 10.0)
    if pb.norm() > 40 or pb.norm() < 1.0 or abs(pa.norm() - pb.norm()) <= 0.01:
        return
    if field_at(f, pa) < field_at(f, pb):
        assert abs(pairwise_shift(i, j, f, obs, 5.0)) > abs(pairwise_shift(j, i, f, obs, 5.0))


# ---- adjust swarm ------------------------------------------------------------

def obstacle_field(states, obs):
    return build_field(states, [obs], Vec2(400, 0), s_adv=80.0)


def test_no_conflict_is_fixed_point():
    states = [UavState(k, Vec2(0, 3 * k), 10.0) for k in range(4)]
    obs = Obstacle(Vec2(30, 0), Vec2(0, 0), 26.0, 50.0)
    out = adjust_swarm(states, obstacle_field(states, obs), [obs], 2.0, 10)
    assert out.resolved and out.rounds_used == 0
    assert all(v == 0.0 for v in out.shifts.values())


def test_close_pair_gets_opposite_shifts():
    states = [UavState(0, Vec2(10, 0.2), 10.0), UavState(1, Vec2(10.4, 0.2), 10.0)]
    obs = Obstacle(Vec2(40, 0), Vec2(0, 0), 26.0, 50.0)
    out = adjust_swarm(states, obstacle_field(states, obs), [obs], 0.5, 10)
    assert out.shifts[0] * out.shifts[1] < 0
    assert out.shifts[0] < 0  # the UAV farther from the obstacle moves to a lower contour


def test_three_way_conflict_sums_pairwise_terms():
    states = [UavState(0, Vec2(10, 0), 10.0), UavState(1, Vec2(10.3, 0.1), 10.0),
              UavState(2, Vec2(10.1, 0.35), 10.0)]
    obs = Obstacle(Vec2(40, 0), Vec2(0, 0), 26.0, 50.0)
    fld = obstacle_field(states, obs)
    out = adjust_swarm(states, fld, [obs], 1.0, 10)
    for i in states:
        terms = [pairwise_shift(i, j, fld, obs, 1.0) for j in states if j.id != i.id]
        assert len(terms) == 2
        assert out.shifts[i.id] == terms[0] + terms[1] or out.shifts[i.id] == terms[1] + terms[0]


def test_adjust_with_replanning_separates_uavs():
    states = [UavState(0, Vec2(0, 0), 10.0), UavState(1, Vec2(0, 0.3), 10.0)]
    obs = Obstacle(Vec2(30, 0), Vec2(0, 0), 26.0, 50.0)
    fld = obstacle_field(states, obs)

    def replan(shifts):
        return {u.id: plan_step(PlanRequest(u, fld, shifts[u.id], delta_omega_max=math.pi / 2),
                                PsoConfig(rng_seed=u.id)) for u in states}

    out = adjust_swarm(states, fld, [obs], 0.5, 10, replan=replan)
    assert out.rounds_used >= 1 and out.plans is not None
    assert out.shifts[0] != 0.0 and out.shifts[1] != 0.0


def test_request_validation():
    with pytest.raises(ValueError):
        req(lambda1=0.7, lambda2=0.7)
