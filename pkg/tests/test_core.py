import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmfield.core import (
    ConfigError,
    Obstacle,
    ScenarioConfig,
    SwarmSnapshot,
    UavState,
    Vec2,
    build_circle_formation,
    normalize_angle,
    validate_scenario,
)


def default_cfg(**kw):
    uavs = build_circle_formation(5, Vec2(0, 0), 20.0, speed=10.0)
    base = dict(uavs=tuple(uavs), swarm_size=5, formation_radius=20.0, detection_range=50.0,
                avoid_distance=30.0, lambda1=0.5, lambda2=0.5)
    base.update(kw)
    return ScenarioConfig(**base)


def test_single_uav_formation():
    (u,) = build_circle_formation(1, Vec2(0, 0), 20.0)
    assert (u.position.x, u.position.y) == (20.0, 0.0)
    assert u.id == 0 and u.speed == 0.0


def test_four_uav_formation_quarter_points():
    pts = [u.position for u in build_circle_formation(4, Vec2(0, 0), 20.0)]
    expected = [(20, 0), (0, 20), (-20, 0), (0, -20)]
    for p, (x, y) in zip(pts, expected):
        assert p.x == pytest.approx(x, abs=1e-12)
        assert p.y == pytest.approx(y, abs=1e-12)


def test_ten_uav_adjacent_spacing_matches_chord():
    us = build_circle_formation(10, Vec2(3, -4), 20.0)
    chord = 2 * 20 * math.sin(math.pi / 10)
    for a, b in zip(us, us[1:] + us[:1]):
        # independent distance computation from raw coordinates
        d = math.sqrt((a.position.x - b.position.x) ** 2 + (a.position.y - b.position.y) ** 2)
        assert d == pytest.approx(chord, abs=1e-9)


@given(st.integers(2, 10), st.floats(0.1, 500), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_formation_min_pair_distance(n, r, cx, cy):
    us = build_circle_formation(n, Vec2(cx, cy), r)
    dmin = min(a.position.dist(b.position) for i, a in enumerate(us) for b in us[i + 1:])
    assert dmin == pytest.approx(2 * r * math.sin(math.pi / n), abs=1e-9 * max(1.0, r))


def test_formation_rejects_empty():
    with pytest.raises(ConfigError):
        build_circle_formation(0, Vec2(0, 0), 20.0)


def test_default_config_is_valid():
    assert validate_scenario(default_cfg()) == []


def test_weight_sum_violation():
    probs = validate_scenario(default_cfg(lambda1=0.7, lambda2=0.7))
    assert len(probs) == 1 and "lambda1 + lambda2" in probs[0]


def test_avoid_beyond_detection_violation():
    probs = validate_scenario(default_cfg(avoid_distance=60.0, detection_range=50.0))
    assert len(probs) == 1 and "avoid_distance" in probs[0]


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(finite, finite, finite, finite, st.floats(-10, 10), st.integers(-5, 400),
       st.floats(-1, 2), st.floats(-1, 2))
def test_validate_is_total(dt, da, rd, h, kmax, steps, l1, l2):
    cfg = replace(default_cfg(), dt=dt, avoid_distance=da, detection_range=rd, grad_step=h,
                  kappa_max=kmax, max_steps=steps, lambda1=l1, lambda2=l2)
    assert isinstance(validate_scenario(cfg), list)


def test_validate_reports_non_finite():
    cfg = replace(default_cfg(), dt=math.nan)
    assert any("not finite" in p for p in validate_scenario(cfg))


def test_vec2_rejects_non_finite():
    with pytest.raises(ValueError):
        Vec2(math.inf, 0.0)


@given(st.floats(-100, 100))
def test_heading_normalized(theta):
    h = UavState(0, Vec2(0, 0), 1.0, theta).heading
    assert -math.pi < h <= math.pi
    assert math.cos(h) == pytest.approx(math.cos(theta), abs=1e-9)
    assert math.sin(h) == pytest.approx(math.sin(theta), abs=1e-9)


def test_normalize_angle_pi_boundary():
    assert normalize_angle(-math.pi) == math.pi
    assert normalize_angle(math.pi) == math.pi


def test_obstacle_requires_sloped_region():
    with pytest.raises(ValueError):
        Obstacle(Vec2(0, 0), forbidden_radius=30.0, influence_radius=30.0)


def test_snapshot_rejects_duplicate_ids():
    u = UavState(1, Vec2(0, 0))
    with pytest.raises(ValueError):
        SwarmSnapshot((u, u), 0.0)


def test_speed_cap_violation():
    us = (UavState(0, Vec2(0, 0), 20.0),)
    probs = validate_scenario(ScenarioConfig(uavs=us, swarm_size=1))
    assert any("v_max" in p for p in probs)
