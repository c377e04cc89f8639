from __future__ import annotations

import math

import numpy as np
import pytest

from soar_sim.perception import (
    Detection,
    PerceptionFrame,
    SensorNoiseSpec,
    StereoRig,
    depth_from_disparity,
    fuse,
    sense,
)
from soar_sim.world import MotionSpec, ObstacleInstance, Vec2

RIG = StereoRig(focal_px=400.0, baseline_m=0.12, cx=320.0, cy=240.0, width=640, height=480)
QUIET = SensorNoiseSpec(max_range_m=15.0)


def q_reprojection_oracle(u: float, v: float, d: float, rig: StereoRig) -> float:
    """Independent brute-force depth: full 4-vector reprojection by hand."""
    q = rig.Q
    vec = [u, v, d, 1.0]
    out = [sum(q[r][c] * vec[c] for c in range(4)) for r in range(4)]
    return out[2] / out[3]


def rig_for(f: float, b: float) -> StereoRig:
    return StereoRig(focal_px=f, baseline_m=b, cx=320.0, cy=240.0, width=640, height=480)


class TestDepthFromDisparity:
    def test_hand_value(self):
        assert depth_from_disparity(10.0, rig_for(100.0, 0.1)) == pytest.approx(1.0, rel=1e-12)

    def test_matches_q_oracle(self):
        rig = rig_for(100.0, 0.1)
        assert depth_from_disparity(10.0, rig) == pytest.approx(
            q_reprojection_oracle(rig.cx, rig.cy, 10.0, rig), rel=1e-12
        )

    def test_second_hand_value(self):
        assert depth_from_disparity(30.0, rig_for(500.0, 0.12)) == pytest.approx(2.0, rel=1e-12)

    def test_doubling_disparity_halves_depth(self):
        rig = rig_for(321.0, 0.2)
        assert depth_from_disparity(8.0, rig) == pytest.approx(2.0 * depth_from_disparity(16.0, rig), rel=1e-12)

    def test_strictly_decreasing(self):
        rig = rig_for(400.0, 0.12)
        disparities = np.linspace(0.5, 200.0, 300)
        depths = [depth_from_disparity(float(d), rig) for d in disparities]
        for a, b in zip(depths, depths[1:]):
            assert b < a

    def test_domain_error(self):
        with pytest.raises(ValueError):
            depth_from_disparity(0.0, RIG)
        with pytest.raises(ValueError):
            depth_from_disparity(-3.0, RIG)

    def test_depth_independent_of_pixel(self):
        # ideal-rig Q: the recovered Z never depends on (u, v)
        rig = rig_for(400.0, 0.12)
        rng = np.random.default_rng(8)
        for _ in range(100):
            u, v = rng.uniform(0, 640), rng.uniform(0, 480)
            d = float(rng.uniform(0.5, 100.0))
            assert q_reprojection_oracle(u, v, d, rig) == pytest.approx(
                q_reprojection_oracle(rig.cx, rig.cy, d, rig), rel=1e-12
            )

    def test_round_trip_noise_free(self):
        rng = np.random.default_rng(9)
        for _ in range(500):
            f = float(rng.uniform(50.0, 1200.0))
            b = float(rng.uniform(0.03, 0.5))
            z = float(rng.uniform(0.2, 15.0))
            rig = rig_for(f, b)
            disparity = f * b / z
            recovered = depth_from_disparity(disparity, rig)
            assert abs(recovered - z) / z <= 1e-9


class TestSense:
    def test_empty_world(self):
        rng = np.random.default_rng(0)
        frame = sense([], (Vec2(0.0, 0.0), 0.0), RIG, QUIET, rng)
        assert frame.detections == ()

    def test_noise_free_identity(self):
        obstacles = [
            ObstacleInstance(1, "rock", Vec2(4.0, 1.0), 0.5),
            ObstacleInstance(2, "fish", Vec2(2.0, -1.0), 0.2),
        ]
        rng = np.random.default_rng(0)
        frame = sense(obstacles, (Vec2(0.0, 0.0), 0.0), RIG, QUIET, rng)
        assert [d.instance_id for d in frame.detections] == [1, 2]
        for det, obs in zip(frame.detections, obstacles):
            assert det.reported_class == obs.class_label
            assert det.true_class == obs.class_label
            expected_range = obs.center.norm()
            for sample in det.disparity_samples:
                assert depth_from_disparity(sample, RIG) == pytest.approx(expected_range, rel=1e-12)

    def test_noise_free_consumes_no_randomness(self):
        obstacles = [ObstacleInstance(1, "rock", Vec2(4.0, 1.0), 0.5)]
        rng = np.random.default_rng(123)
        state_before = rng.bit_generator.state
        sense(obstacles, (Vec2(0.0, 0.0), 0.0), RIG, QUIET, rng)
        assert rng.bit_generator.state == state_before

    def test_max_range_filter(self):
        obstacles = [ObstacleInstance(1, "rock", Vec2(20.0, 0.0), 0.5)]
        frame = sense(obstacles, (Vec2(0.0, 0.0), 0.0), RIG, QUIET, np.random.default_rng(0))
        assert frame.detections == ()

    def test_fov_filter(self):
        noise = SensorNoiseSpec(fov_rad=math.pi, max_range_m=15.0)  # forward half-plane
        behind = [ObstacleInstance(1, "rock", Vec2(-3.0, 0.1), 0.5)]
        frame = sense(behind, (Vec2(0.0, 0.0), 0.0), RIG, noise, np.random.default_rng(0))
        assert frame.detections == ()

    def test_occlusion_drops_far_obstacle(self):
        near = ObstacleInstance(1, "rock", Vec2(3.0, 0.0), 0.5)
        far = ObstacleInstance(2, "rock", Vec2(8.0, 0.0), 0.5)
        frame = sense([near, far], (Vec2(0.0, 0.0), 0.0), RIG, QUIET, np.random.default_rng(0))
        assert [d.instance_id for d in frame.detections] == [1]

    def test_occlusion_matches_brute_force_ray_test(self):
        rng = np.random.default_rng(10)
        cam = Vec2(0.0, 0.0)
        for _ in range(200):
            target = Vec2(float(rng.uniform(2.0, 10.0)), float(rng.uniform(-3.0, 3.0)))
            blocker_center = Vec2(float(rng.uniform(0.5, 9.0)), float(rng.uniform(-2.0, 2.0)))
            radius = float(rng.uniform(0.1, 1.0))
            if blocker_center.norm() >= target.norm():
                continue
            obstacles = [
                ObstacleInstance(1, "rock", blocker_center, radius),
                ObstacleInstance(2, "rock", target, 0.2),
            ]
            frame = sense(obstacles, (cam, 0.0), RIG, QUIET, np.random.default_rng(0))
            detected_ids = {d.instance_id for d in frame.detections}
            # brute force: sample the center ray densely
            blocked = any(
                Vec2(target.x * t, target.y * t).dist(blocker_center) <= radius
                for t in np.linspace(0.0, 1.0, 2001)
            )
            if blocked:
                assert 2 not in detected_ids
            else:
                assert 2 in detected_ids

    def test_occluder_outside_fov_still_blocks(self):
        noise = SensorNoiseSpec(fov_rad=math.radians(10.0), max_range_m=15.0)
        target = ObstacleInstance(2, "rock", Vec2(6.0, 0.0), 0.3)
        # blocker center well outside the 10 deg cone, disc still crossing the ray
        blocker = ObstacleInstance(1, "rock", Vec2(2.0, 0.6), 0.7)
        frame = sense([blocker, target], (Vec2(0.0, 0.0), 0.0), RIG, noise, np.random.default_rng(0))
        assert frame.detections == ()

    def test_misclassification_uses_confusion_map(self):
        noise = SensorNoiseSpec(misclassify_prob=1.0, confusion={"rock": "fish"}, max_range_m=15.0)
        obstacles = [ObstacleInstance(1, "rock", Vec2(3.0, 0.0), 0.5)]
        frame = sense(obstacles, (Vec2(0.0, 0.0), 0.0), RIG, noise, np.random.default_rng(0))
        det = frame.detections[0]
        assert det.reported_class == "fish"
        assert det.true_class == "rock"

    def test_misclassification_without_mapping_keeps_class(self):
        noise = SensorNoiseSpec(misclassify_prob=1.0, confusion={}, max_range_m=15.0)
        obstacles = [ObstacleInstance(1, "rock", Vec2(3.0, 0.0), 0.5)]
        frame = sense(obstacles, (Vec2(0.0, 0.0), 0.0), RIG, noise, np.random.default_rng(0))
        assert frame.detections[0].reported_class == "rock"

    def test_same_seed_same_frame(self):
        obstacles = [
            ObstacleInstance(1, "rock", Vec2(4.0, 1.0), 0.5),
            ObstacleInstance(2, "fish", Vec2(2.0, -1.0), 0.2),
        ]
        noise = SensorNoiseSpec(disparity_std=0.4, misclassify_prob=0.3,
                                confusion={"rock": "fish"}, max_range_m=15.0)
        frames = [
            sense(obstacles, (Vec2(0.0, 0.0), 0.1), RIG, noise, np.random.default_rng(77))
            for _ in range(2)
        ]
        assert frames[0] == frames[1]

    def test_noisy_samples_all_positive(self):
        obstacles = [ObstacleInstance(1, "rock", Vec2(14.0, 0.0), 0.3)]
        noise = SensorNoiseSpec(disparity_std=50.0, max_range_m=15.0)
        for seed in range(20):
            frame = sense(obstacles, (Vec2(0.0, 0.0), 0.0), RIG, noise, np.random.default_rng(seed))
            for det in frame.detections:
                assert all(s > 0.0 for s in det.disparity_samples)

    def test_moving_obstacle_uses_supplied_positions(self):
        obs = ObstacleInstance(
            1, "fish", Vec2(5.0, 0.0), 0.2, MotionSpec("waypoint_loop", (Vec2(5.0, 2.0),), 1.0)
        )
        moved = obs.position_at(1.0)
        frame = sense([obs], (Vec2(0.0, 0.0), 0.0), RIG, QUIET, np.random.default_rng(0),
                      positions=[moved])
        det = frame.detections[0]
        assert depth_from_disparity(det.disparity_samples[0], RIG) == pytest.approx(moved.norm(), rel=1e-12)


class TestFuse:
    def make_detection(self, samples, bearing=0.0, radius=0.5, label="rock"):
        return Detection(
            instance_id=1, reported_class=label, true_class=label,
            pixel_count=10, disparity_samples=tuple(samples),
            bearing_rad=bearing, known_radius_m=radius,
        )

    def test_single_detection_straight_ahead(self):
        rig = rig_for(100.0, 0.1)
        frame = PerceptionFrame(
            detections=(self.make_detection([10.0, 10.0, 10.0], radius=0.0),),
            camera_pose=(Vec2(0.0, 0.0), 0.0),
        )
        estimates, dropped = fuse(frame, rig)
        assert dropped == 0
        est = estimates[0]
        assert est.position.x == pytest.approx(1.0, rel=1e-12)
        assert est.position.y == pytest.approx(0.0, abs=1e-12)
        assert est.surface_distance == pytest.approx(1.0, rel=1e-12)

    def test_median_rejects_outlier(self):
        rig = rig_for(100.0, 0.1)
        clean = PerceptionFrame(
            detections=(self.make_detection([10.0, 10.0, 10.0]),),
            camera_pose=(Vec2(0.0, 0.0), 0.0),
        )
        outlier = PerceptionFrame(
            detections=(self.make_detection([10.0, 10.0, 1000.0]),),
            camera_pose=(Vec2(0.0, 0.0), 0.0),
        )
        assert fuse(clean, rig)[0] == fuse(outlier, rig)[0]

    def test_bearing_and_pose_compose(self):
        rig = rig_for(100.0, 0.1)
        heading = 0.7
        bearing = -0.3
        frame = PerceptionFrame(
            detections=(self.make_detection([5.0], bearing=bearing, radius=0.25),),
            camera_pose=(Vec2(2.0, -1.0), heading),
        )
        estimates, _ = fuse(frame, rig)
        est = estimates[0]
        rng_m = 100.0 * 0.1 / 5.0
        assert est.position.x == pytest.approx(2.0 + rng_m * math.cos(heading + bearing), rel=1e-12)
        assert est.position.y == pytest.approx(-1.0 + rng_m * math.sin(heading + bearing), rel=1e-12)
        assert est.surface_distance == pytest.approx(rng_m - 0.25, rel=1e-12)

    def test_surface_distance_clamped(self):
        rig = rig_for(100.0, 0.1)
        frame = PerceptionFrame(
            detections=(self.make_detection([50.0], radius=1.0),),  # range 0.2, radius 1.0
            camera_pose=(Vec2(0.0, 0.0), 0.0),
        )
        estimates, _ = fuse(frame, rig)
        assert estimates[0].surface_distance == 0.0

    def test_label_passthrough(self):
        rig = rig_for(100.0, 0.1)
        det = Detection(
            instance_id=3, reported_class="robot", true_class="fish",
            pixel_count=4, disparity_samples=(10.0,), bearing_rad=0.0, known_radius_m=0.2,
        )
        estimates, _ = fuse(PerceptionFrame((det,), (Vec2(0.0, 0.0), 0.0)), rig)
        assert estimates[0].class_label == "robot"
        assert estimates[0].source_instance == 3

    def test_empty_sample_detection_dropped_with_counter(self):
        rig = rig_for(100.0, 0.1)
        empty = Detection(
            instance_id=1, reported_class="rock", true_class="rock",
            pixel_count=1, disparity_samples=(), bearing_rad=0.0, known_radius_m=0.1,
        )
        keep = self.make_detection([10.0])
        estimates, dropped = fuse(PerceptionFrame((empty, keep), (Vec2(0.0, 0.0), 0.0)), rig)
        assert dropped == 1
        assert len(estimates) == 1


class TestObstacleMemory:
    def make_estimate(self, instance: int, pos: Vec2, surface: float):
        from soar_sim.perception import LabeledObstacleEstimate

        return LabeledObstacleEstimate("rock", pos, surface, instance)

    def test_zero_ttl_is_memoryless(self):
        from soar_sim.perception import ObstacleMemory

        memory = ObstacleMemory(0.0)
        first = [self.make_estimate(1, Vec2(3.0, 0.0), 2.5)]
        assert memory.update(first, 0.0, Vec2(0.0, 0.0)) == first
        assert memory.update([], 0.1, Vec2(0.0, 0.0)) == []

    def test_remembers_until_ttl(self):
        from soar_sim.perception import ObstacleMemory

        memory = ObstacleMemory(1.0)
        seen = [self.make_estimate(1, Vec2(3.0, 0.0), 2.5)]  # inferred radius 0.5
        memory.update(seen, 0.0, Vec2(0.0, 0.0))
        remembered = memory.update([], 0.5, Vec2(1.0, 0.0))
        assert len(remembered) == 1
        est = remembered[0]
        assert est.position == Vec2(3.0, 0.0)
        # surface distance recomputed from the new robot position
        assert est.surface_distance == pytest.approx(2.0 - 0.5, rel=1e-12)
        assert memory.update([], 2.0, Vec2(1.0, 0.0)) == []

    def test_fresh_detection_replaces_memory(self):
        from soar_sim.perception import ObstacleMemory

        memory = ObstacleMemory(5.0)
        memory.update([self.make_estimate(1, Vec2(3.0, 0.0), 2.5)], 0.0, Vec2(0.0, 0.0))
        fresh = [self.make_estimate(1, Vec2(3.5, 0.0), 3.0)]
        merged = memory.update(fresh, 1.0, Vec2(0.0, 0.0))
        assert merged == fresh

    def test_rejects_negative_ttl(self):
        from soar_sim.perception import ObstacleMemory

        with pytest.raises(ValueError):
            ObstacleMemory(-1.0)


class TestSenseFuseRoundTrip:
    def test_world_positions_recovered_exactly(self):
        obstacles = [
            ObstacleInstance(1, "rock", Vec2(4.0, 1.5), 0.5),
            ObstacleInstance(2, "car", Vec2(-2.0, 3.0), 0.8),
        ]
        pose = (Vec2(0.5, -0.25), 0.35)
        noise = SensorNoiseSpec(fov_rad=2.0 * math.pi, max_range_m=20.0)
        frame = sense(obstacles, pose, RIG, noise, np.random.default_rng(0))
        estimates, dropped = fuse(frame, RIG)
        assert dropped == 0
        by_id = {e.source_instance: e for e in estimates}
        for obs in obstacles:
            est = by_id[obs.id]
            assert est.position.x == pytest.approx(obs.center.x, abs=1e-9)
            assert est.position.y == pytest.approx(obs.center.y, abs=1e-9)
            truth = pose[0].dist(obs.center) - obs.radius
            assert est.surface_distance == pytest.approx(truth, abs=1e-9)
