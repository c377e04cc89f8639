"""World-model domain types: vectors, obstacles, clearance policies, robot
and disturbance parameters, plus the nearest-effective-obstacle selection
rule used by the steering loop.

All values here are immutable after construction and safe to share between
concurrently running trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

if TYPE_CHECKING:
    from soar_sim.perception import LabeledObstacleEstimate

MOTION_STATIC = "static"
MOTION_WAYPOINT_LOOP = "waypoint_loop"


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True, slots=True)
class MotionSpec:
    """Obstacle motion: static, or a closed waypoint loop at constant speed.

    The loop path is center -> waypoints[0] -> ... -> waypoints[-1] -> center.
    """

    kind: str = MOTION_STATIC
    waypoints: tuple[Vec2, ...] = ()
    speed: float = 0.0


@dataclass(frozen=True, slots=True)
class ObstacleInstance:
    id: int
    class_label: str
    center: Vec2
    radius: float
    motion: MotionSpec = field(default_factory=MotionSpec)

    def path_points(self) -> tuple[Vec2, ...]:
        """Closed loop the obstacle travels, starting and ending at center."""
        if self.motion.kind == MOTION_STATIC or not self.motion.waypoints:
            return (self.center,)
        return (self.center, *self.motion.waypoints, self.center)

    def position_at(self, t: float) -> Vec2:
        """Obstacle center at time t; a pure function so trials stay replayable."""
        pts = self.path_points()
        if len(pts) == 1 or self.motion.speed <= 0.0:
            return self.center
        seg_lengths = [pts[i].dist(pts[i + 1]) for i in range(len(pts) - 1)]
        total = sum(seg_lengths)
        if total <= 0.0:
            return self.center
        s = math.fmod(self.motion.speed * t, total)
        for i, seg in enumerate(seg_lengths):
            if s <= seg:
                if seg == 0.0:
                    return pts[i]
                f = s / seg
                a, b = pts[i], pts[i + 1]
                return Vec2(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
            s -= seg
        return pts[-1]


@dataclass(frozen=True, slots=True)
class ClearancePolicy:
    """Per-class clearance distances; lookups fall back to default_d0."""

    entries: dict[str, float] = field(default_factory=dict)
    default_d0: float = 1.0


def effective_d0(policy: ClearancePolicy, class_label: str) -> float:
    """Clearance distance for a class label; never fails."""
    return policy.entries.get(class_label, policy.default_d0)


@dataclass(frozen=True, slots=True)
class RobotParams:
    cruise_speed: float = 1.0
    max_turn_rate: float = 2.5
    slowdown_radius: float = 1.0
    collision_radius: float = 0.25
    dt: float = 0.05


@dataclass(frozen=True, slots=True)
class DisturbanceSpec:
    drift: Vec2 = field(default_factory=lambda: Vec2(0.0, 0.0))
    gust_std: float = 0.0


def surface_distance(point: Vec2, center: Vec2, radius: float) -> float:
    """Distance from a point to a disc boundary, clamped at zero."""
    return max(0.0, point.dist(center) - radius)


def nearest_effective_obstacle(
    robot_pos: Vec2,
    estimates: Sequence["LabeledObstacleEstimate"],
    policy: ClearancePolicy,
) -> Optional[tuple["LabeledObstacleEstimate", float]]:
    """Pick the estimate the steering law should react to.

    Qualifying estimates have d0 > 0 for their class and surface distance
    within that d0; among them the one with the deepest intrusion
    (d0 - surface distance) wins. Ties break by smaller distance, then by
    smaller source obstacle id. Returns (estimate, d0) or None.
    """
    best = None
    best_key = None
    for est in estimates:
        d0 = effective_d0(policy, est.class_label)
        if d0 <= 0.0 or est.surface_distance > d0:
            continue
        key = (-(d0 - est.surface_distance), est.surface_distance, est.source_instance)
        if best_key is None or key < best_key:
            best = (est, d0)
            best_key = key
    return best
