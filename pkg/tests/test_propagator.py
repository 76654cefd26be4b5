import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtures import box, fire_site, plane
from sabpi.model.dynamics import integrate
from sabpi.model.scenario import scenario_from_json
from sabpi.propagator import (
    COLLIDED,
    FULL,
    HIT_OBSERVATION,
    HIT_REGION,
    LEFT_BOUNDS,
    DegeneratePropagation,
    exit_current_region,
    propagate,
)

EPS = 1e-6


def test_free_flow():
    res = propagate(plane(), (0.0, 0.0), 0, (1.0, 0.0), 1.0)
    assert res.outcome == FULL
    assert res.t_actual == 1.0
    assert res.x_end == pytest.approx((1.0, 0.0), abs=1e-12)


def test_region_crossing_time():
    scn = plane(regions=[{"id": "r1", "shape": box([0.4, -0.1], [0.6, 0.1]), "labels": ["goal"]}])
    res = propagate(scn, (0.0, 0.0), 0, (1.0, 0.0), 1.0, eps=EPS)
    assert res.outcome == HIT_REGION and res.region == 0
    assert abs(res.t_actual - 0.4) <= EPS
    assert scn.regions[0].shape.contains(res.x_end)
    assert res.x_end[0] - 0.4 <= EPS


def test_obstacle_crossing_time():
    scn = plane(obstacles=[box([0.2, -1], [0.3, 1])])
    res = propagate(scn, (0.0, 0.0), 0, (1.0, 0.0), 1.0, eps=EPS)
    assert res.outcome == COLLIDED
    assert abs(res.t_actual - 0.2) <= EPS


def test_leaving_the_state_space():
    res = propagate(plane(), (2.5, 0.0), 0, (1.0, 0.0), 1.0, eps=EPS)
    assert res.outcome == LEFT_BOUNDS
    assert abs(res.t_actual - 0.5) <= EPS


def test_sensor_fires_once_then_is_transparent():
    scn = fire_site()
    res = propagate(scn, (0.0, 0.0), 0, (1.0, 0.0), 1.5, eps=EPS)
    assert res.outcome == HIT_OBSERVATION and res.observation == 0 and res.region is None
    assert abs(res.t_actual - 1.0) <= EPS
    res = propagate(scn, (0.0, 0.0), 0b1, (1.0, 0.0), 2.5, eps=EPS)
    assert res.outcome == HIT_REGION and res.region == 0
    assert abs(res.t_actual - 2.0) <= EPS


def test_starting_in_a_fresh_sensor_fires_immediately():
    res = propagate(fire_site(), (1.2, 0.0), 0, (1.0, 0.0), 1.0)
    assert res.outcome == HIT_OBSERVATION and res.t_actual == 0.0


def test_region_containing_the_start_does_not_refire():
    scn = fire_site()
    res = propagate(scn, (2.1, 0.0), 0b1, (1.0, 0.0), 1.0, eps=EPS)
    assert res.outcome == LEFT_BOUNDS  # walks through the site and out of [-1, 3]
    assert abs(res.t_actual - 0.9) <= EPS


def test_collision_beats_region_in_the_same_step():
    scn = plane(
        obstacles=[box([0.5, -1], [0.6, 1])],
        regions=[{"id": "r", "shape": box([0.5, -1], [0.7, 1]), "labels": ["goal"]}],
    )
    res = propagate(scn, (0.0, 0.0), 0, (1.0, 0.0), 1.0, h=0.3)
    assert res.outcome == COLLIDED


def test_simultaneous_regions_report_the_lowest_id():
    shape = box([0.5, -1], [0.7, 1])
    scn = plane(regions=[{"id": "a", "shape": shape, "labels": ["goal"]},
                         {"id": "b", "shape": shape, "labels": ["goal"]}])
    assert propagate(scn, (0.0, 0.0), 0, (1.0, 0.0), 1.0).region == 0


def test_deterministic():
    scn = fire_site()
    a = propagate(scn, (0.0, 0.0), 0, (0.7, 0.3), 0.9)
    b = propagate(scn, (0.0, 0.0), 0, (0.7, 0.3), 0.9)
    assert a == b


def test_rejects_non_positive_duration():
    with pytest.raises(ValueError):
        propagate(plane(), (0.0, 0.0), 0, (1.0, 0.0), 0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(-0.5, 0.5))
def test_straight_line_crossings_are_analytic(speed, y0):
    scn = plane(regions=[{"id": "r", "shape": box([0.8, -1], [1.0, 1]), "labels": ["goal"]}])
    res = propagate(scn, (0.0, y0), 0, (speed, 0.0), 1.0, eps=EPS)
    t_true = 0.8 / speed
    if t_true <= 1.0:
        assert res.outcome == HIT_REGION
        assert abs(res.t_actual - t_true) <= EPS
    else:
        assert res.outcome == FULL


# ------------------------------------------------------------- convergence
def _oscillator():
    return [[0.0, 1.0], [-1.0, -0.3]], [[0.0], [1.0]]


def _exact(t):
    from scipy.linalg import expm

    A, B = _oscillator()
    A, B = np.array(A), np.array(B)
    # x' = A x + B u with constant u: x(t) = e^{At} x0 + A^{-1}(e^{At} - I) B u
    E = expm(A * t)
    return E @ [1.0, 0.0] + np.linalg.solve(A, (E - np.eye(2)) @ B @ [0.5])


def test_rk4_error_ratio_under_step_halving():
    from sabpi.model.dynamics import DynamicsModel

    A, B = _oscillator()
    f = DynamicsModel("linear", {"A": A, "B": B}).field
    exact = _exact(2.0)
    errs = [np.linalg.norm(np.array(integrate(f, [1.0, 0.0], [0.5], 2.0, h)) - exact) for h in (0.2, 0.1)]
    ratio = errs[0] / errs[1]
    assert 12.0 <= ratio <= 20.0


# -------------------------------------------------------------------- exit
def test_exit_outward():
    scn = plane(regions=[{"id": "r", "shape": box([0.0, -1], [0.5, 1]), "labels": ["goal"]}])
    out = exit_current_region(scn, (0.5, 0.0), (1.0, 0.0), h=0.01)
    assert out.t == pytest.approx(0.01)
    assert not scn.guard_R(out.x)


def test_exit_with_zero_control_exhausts_the_budget():
    scn = plane(regions=[{"id": "r", "shape": box([0.0, -1], [0.5, 1]), "labels": ["goal"]}])
    with pytest.raises(DegeneratePropagation):
        exit_current_region(scn, (0.25, 0.0), (0.0, 0.0), budget=50)


def test_car_exit_after_turnaround():
    scn = scenario_from_json({
        "ap": ["goal"],
        "task": "F(goal)",
        "workspace": {
            "state_space": box([-5, -5, -10, -3], [5, 5, 10, 3]),
            "control_space": box([-1, -0.5], [1, 0.5]),
        },
        "dynamics": {"kind": "second_order_car", "v_min": -2.0, "v_max": 2.0},
        "regions": [{"id": "r", "shape": box([-1, -1], [1, 1]), "labels": ["goal"]}],
        "initial": {"x": [-4.0, 0.0, 0.0, 0.0]},
    })
    x0 = (0.5, 0.0, 0.0, -1.0)  # driving toward the region's far side (-x) while braking
    u = (1.0, 0.0)
    h = 0.01
    out = exit_current_region(scn, x0, u, h=h)
    # first the car reverses to x = 0.5 - 0.5 = 0, then accelerates out through x = 1
    assert out.x[0] > 1.0
    fine = integrate(scn.dynamics.field, x0, u, out.t, h / 10)
    assert out.x == pytest.approx(tuple(fine), abs=1e-9)
    # the car leaves at x = 1: 0.5 - t + t^2 / 2 = 1  ->  t = 1 + sqrt(2)
    assert out.t == pytest.approx(1 + math.sqrt(2), abs=h)
