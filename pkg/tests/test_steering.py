from __future__ import annotations

import math

import numpy as np
import pytest

from soar_sim.steering import (
    ActiveObstacle,
    SteeringParams,
    attractive_potential,
    c1,
    c2,
    repulsive_potential,
    steering_direction,
)
from soar_sim.world import Vec2

SQ2 = math.sqrt(2.0) / 2.0


class TestAttractivePotential:
    def test_zero_at_goal(self):
        assert attractive_potential(Vec2(1.0, 2.0), Vec2(1.0, 2.0), 1.0) == 0.0

    def test_hand_value(self):
        assert attractive_potential(Vec2(0.0, 0.0), Vec2(3.0, 4.0), 1.0) == pytest.approx(25.0)

    def test_linear_in_scale(self):
        x, g = Vec2(1.0, -2.0), Vec2(4.0, 2.0)
        assert attractive_potential(x, g, 2.0) == pytest.approx(2.0 * attractive_potential(x, g, 1.0))

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ValueError):
            attractive_potential(Vec2(0.0, 0.0), Vec2(1.0, 0.0), 0.0)


class TestRepulsivePotential:
    def test_zero_at_boundary(self):
        assert repulsive_potential(2.0, 2.0, 1.0) == 0.0

    def test_zero_outside(self):
        assert repulsive_potential(3.0, 2.0, 1.0) == 0.0

    def test_hand_value(self):
        assert repulsive_potential(1.0, 2.0, 1.0) == 0.25

    def test_zero_d0_means_no_influence(self):
        assert repulsive_potential(0.5, 0.0, 1.0) == 0.0

    def test_domain_error(self):
        with pytest.raises(ValueError):
            repulsive_potential(0.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            repulsive_potential(-1.0, 2.0, 1.0)

    def test_locality_random(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            d0 = float(rng.uniform(0.1, 5.0))
            p = d0 + float(rng.uniform(1e-9, 10.0))
            assert repulsive_potential(p, d0, 2.0) == 0.0


class TestC1:
    def test_head_on(self):
        assert c1(Vec2(1.0, 0.0), Vec2(1.0, 0.0)) == -1.0

    def test_orthogonal(self):
        assert c1(Vec2(1.0, 0.0), Vec2(0.0, 1.0)) == 0.0

    def test_hand_value(self):
        assert c1(Vec2(1.0, 0.0), Vec2(SQ2, SQ2)) == pytest.approx(-SQ2, abs=1e-12)


class TestC2:
    def test_boundary_is_exactly_one(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            d0 = float(rng.uniform(0.01, 10.0))
            b = float(rng.uniform(1.0 + 1e-9, 10.0))
            assert c2(d0, d0, b) == 1.0

    def test_contact_is_exactly_b(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            d0 = float(rng.uniform(0.01, 10.0))
            b = float(rng.uniform(1.0 + 1e-9, 10.0))
            assert c2(0.0, d0, b) == b

    def test_midpoint_hand_value(self):
        assert c2(1.0, 2.0, 3.0) == 2.0

    def test_monotone_decreasing_within_range(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            d0 = float(rng.uniform(0.1, 5.0))
            b = float(rng.uniform(1.01, 10.0))
            dists = sorted(float(rng.uniform(0.0, d0)) for _ in range(10))
            values = [c2(d, d0, b) for d in dists]
            for lo, hi in zip(values, values[1:]):
                assert lo >= hi
            assert all(1.0 <= v <= b for v in values)

    def test_contract_violations(self):
        with pytest.raises(ValueError):
            c2(1.5, 1.0, 3.0)
        with pytest.raises(ValueError):
            c2(0.5, 0.0, 3.0)
        with pytest.raises(ValueError):
            c2(-0.1, 1.0, 3.0)


class TestSteeringParams:
    def test_b_must_exceed_one(self):
        with pytest.raises(ValueError):
            SteeringParams(b=1.0)

    def test_scales_positive(self):
        with pytest.raises(ValueError):
            SteeringParams(c=0.0)
        with pytest.raises(ValueError):
            SteeringParams(eta=-1.0)


class TestSteeringDirection:
    PARAMS = SteeringParams()

    def test_pure_attraction(self):
        decision = steering_direction(Vec2(0.0, 0.0), Vec2(0.0, 5.0), None, self.PARAMS)
        assert decision.v_hat == Vec2(0.0, 1.0)
        assert decision.r_hat is None
        assert decision.active_obstacle_id is None
        assert not decision.tie_break_applied

    def test_perpendicular_at_boundary(self):
        # a_hat=(1,0), r_hat=(sqrt2/2, sqrt2/2), dist=d0 so c2=1:
        # unnormalized sum (0.5, -0.5), v_hat (sqrt2/2, -sqrt2/2), v.r == 0
        active = ActiveObstacle(position=Vec2(SQ2, SQ2), surface_distance=1.0, d0=1.0, obstacle_id=4)
        decision = steering_direction(Vec2(0.0, 0.0), Vec2(10.0, 0.0), active, self.PARAMS)
        assert decision.c2 == 1.0
        assert decision.v_hat.x == pytest.approx(SQ2, abs=1e-12)
        assert decision.v_hat.y == pytest.approx(-SQ2, abs=1e-12)
        dot = decision.v_hat.x * decision.r_hat.x + decision.v_hat.y * decision.r_hat.y
        assert abs(dot) <= 1e-9
        assert decision.active_obstacle_id == 4

    def test_head_on_tie_break(self):
        active = ActiveObstacle(position=Vec2(2.0, 0.0), surface_distance=1.0, d0=1.0, obstacle_id=9)
        decision = steering_direction(Vec2(0.0, 0.0), Vec2(10.0, 0.0), active, self.PARAMS)
        assert decision.tie_break_applied
        assert decision.v_hat == Vec2(0.0, 1.0)  # left perpendicular of r_hat=(1,0)

    def test_c1_matches_decision_vectors(self):
        active = ActiveObstacle(position=Vec2(1.0, 2.0), surface_distance=0.4, d0=1.0, obstacle_id=1)
        decision = steering_direction(Vec2(0.0, 0.0), Vec2(5.0, -1.0), active, self.PARAMS)
        assert decision.c1 == pytest.approx(c1(decision.a_hat, decision.r_hat), abs=1e-12)
        assert 1.0 <= decision.c2 <= self.PARAMS.b

    def test_unit_outputs(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            robot = Vec2(float(rng.normal()), float(rng.normal()))
            goal = Vec2(float(rng.normal() * 5), float(rng.normal() * 5))
            if robot.dist(goal) == 0.0:
                continue
            d0 = float(rng.uniform(0.2, 3.0))
            direction = rng.uniform(0, 2 * math.pi)
            dist = float(rng.uniform(0.0, d0))
            center_range = dist + 0.1
            obstacle = Vec2(robot.x + center_range * math.cos(direction),
                            robot.y + center_range * math.sin(direction))
            active = ActiveObstacle(obstacle, dist, d0, obstacle_id=1)
            decision = steering_direction(robot, goal, active, self.PARAMS)
            assert decision.v_hat.norm() == pytest.approx(1.0, abs=1e-9)
            assert decision.a_hat.norm() == pytest.approx(1.0, abs=1e-9)
            assert decision.r_hat.norm() == pytest.approx(1.0, abs=1e-9)

    def test_v_hat_parallel_to_unnormalized_sum(self):
        # normalization property: v_hat is the unit vector of a + c1*c2*r
        rng = np.random.default_rng(6)
        for _ in range(300):
            ta, tr = rng.uniform(0, 2 * math.pi, 2)
            d0 = float(rng.uniform(0.5, 2.0))
            dist = float(rng.uniform(0.0, d0))
            robot = Vec2(0.0, 0.0)
            goal = Vec2(10.0 * math.cos(ta), 10.0 * math.sin(ta))
            obstacle = Vec2((dist + 0.2) * math.cos(tr), (dist + 0.2) * math.sin(tr))
            decision = steering_direction(robot, goal, ActiveObstacle(obstacle, dist, d0, 1), self.PARAMS)
            if decision.tie_break_applied:
                continue
            sx = decision.a_hat.x + decision.c1 * decision.c2 * decision.r_hat.x
            sy = decision.a_hat.y + decision.c1 * decision.c2 * decision.r_hat.y
            cross = sx * decision.v_hat.y - sy * decision.v_hat.x
            assert abs(cross) <= 1e-9
            assert sx * decision.v_hat.x + sy * decision.v_hat.y >= 0.0

    def test_deeper_intrusion_steers_harder(self):
        # angle between v_hat and a_hat grows monotonically as dist shrinks
        robot, goal = Vec2(0.0, 0.0), Vec2(10.0, 0.0)
        obstacle_dir = Vec2(math.cos(0.4), math.sin(0.4))
        d0 = 1.0
        angles = []
        for dist in np.linspace(d0, 0.0, 40):
            center = obstacle_dir.scaled(float(dist) + 0.3)
            decision = steering_direction(robot, goal, ActiveObstacle(center, float(dist), d0, 1), self.PARAMS)
            angles.append(math.acos(max(-1.0, min(1.0,
                decision.v_hat.x * decision.a_hat.x + decision.v_hat.y * decision.a_hat.y))))
        for earlier, later in zip(angles, angles[1:]):
            assert later >= earlier - 1e-12

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(ValueError):
            steering_direction(Vec2(1.0, 1.0), Vec2(1.0, 1.0), None, self.PARAMS)
        bad = ActiveObstacle(Vec2(1.0, 0.0), surface_distance=2.0, d0=1.0, obstacle_id=1)
        with pytest.raises(ValueError):
            steering_direction(Vec2(0.0, 0.0), Vec2(5.0, 0.0), bad, self.PARAMS)
        zero_d0 = ActiveObstacle(Vec2(1.0, 0.0), surface_distance=0.0, d0=0.0, obstacle_id=1)
        with pytest.raises(ValueError):
            steering_direction(Vec2(0.0, 0.0), Vec2(5.0, 0.0), zero_d0, self.PARAMS)

    def test_perpendicularity_identity_includes_head_on(self):
        # (a + c1 r) . r == 0 even when the sum itself is the zero vector
        a = Vec2(1.0, 0.0)
        r = Vec2(1.0, 0.0)
        k = c1(a, r)
        sx, sy = a.x + k * r.x, a.y + k * r.y
        assert abs(sx * r.x + sy * r.y) <= 1e-9
