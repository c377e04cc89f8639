"""Steering law: a unit goal direction plus a gained obstacle term.

The commanded direction is the goal unit vector while no obstacle is
within its clearance distance. Once one is, a repulsive unit vector toward
the obstacle is added, scaled by c1 (removes the goal component parallel
to the obstacle direction, leaving motion tangent at the clearance
boundary) and c2 (a linear intrusion gain in [1, b] that pushes harder the
deeper the robot sits inside the clearance ring). The classic quadratic
attractive/repulsive potentials are kept as per-tick diagnostics; they do
not drive motion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from soar_sim._kernel import steer_core
from soar_sim.world import Vec2


@dataclass(frozen=True, slots=True)
class SteeringParams:
    """b: max repulsive gain (> 1); c, eta: diagnostic potential scales."""

    b: float = 3.0
    c: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if self.b <= 1.0:
            raise ValueError(f"b must be > 1, got {self.b}")
        if self.c <= 0.0 or self.eta <= 0.0:
            raise ValueError("c and eta must be > 0")


@dataclass(frozen=True, slots=True)
class ActiveObstacle:
    """The obstacle the steering law reacts to this tick."""

    position: Vec2
    surface_distance: float
    d0: float
    obstacle_id: int


@dataclass(frozen=True, slots=True)
class SteeringDecision:
    a_hat: Vec2
    r_hat: Optional[Vec2]
    c1: float
    c2: float
    v_hat: Vec2
    active_obstacle_id: Optional[int]
    tie_break_applied: bool


def attractive_potential(x: Vec2, x_g: Vec2, c: float) -> float:
    """Quadratic pull toward the goal: c * |x - x_g|^2."""
    if c <= 0.0:
        raise ValueError(f"c must be > 0, got {c}")
    dx, dy = x.x - x_g.x, x.y - x_g.y
    return c * (dx * dx + dy * dy)


def repulsive_potential(p: float, d0: float, eta: float) -> float:
    """Inverse-distance push active only within d0 of the obstacle."""
    if p <= 0.0:
        raise ValueError(f"obstacle distance must be > 0, got {p}")
    if p > d0:
        return 0.0
    term = 1.0 / p - 1.0 / d0
    return eta * term * term


def c1(a_hat: Vec2, r_hat: Vec2) -> float:
    """Negated dot product of the goal and obstacle unit vectors."""
    return -(a_hat.x * r_hat.x + a_hat.y * r_hat.y)


def c2(dist: float, d0: float, b: float) -> float:
    """Linear intrusion gain: b at contact, 1 at the clearance boundary."""
    if d0 <= 0.0:
        raise ValueError(f"d0 must be > 0, got {d0}")
    if dist < 0.0 or dist > d0:
        raise ValueError(f"dist must be in [0, d0], got {dist} with d0={d0}")
    # same expression as the kernels; exact at both endpoints
    return b + (1.0 - b) * (dist / d0)


def steering_direction(
    robot_pos: Vec2,
    goal: Vec2,
    active: Optional[ActiveObstacle],
    params: SteeringParams,
) -> SteeringDecision:
    """Commanded unit direction for one tick.

    With no active obstacle this is the goal direction. With one, the gained
    obstacle term is added and the sum normalized; if the sum degenerates to
    zero (exact head-on at the clearance boundary) the deterministic
    tie-break picks the left perpendicular of the obstacle direction.
    """
    if robot_pos.dist(goal) == 0.0:
        raise ValueError("robot position coincides with the goal; direction undefined")
    if active is not None:
        if active.d0 <= 0.0 or active.surface_distance > active.d0:
            raise ValueError(
                f"active obstacle violates 0 < d0 and dist <= d0 "
                f"(dist={active.surface_distance}, d0={active.d0})"
            )
        if robot_pos.dist(active.position) == 0.0:
            raise ValueError("robot position coincides with the active obstacle")

    ox = oy = dist = d0 = 0.0
    if active is not None:
        ox, oy = active.position.x, active.position.y
        dist, d0 = active.surface_distance, active.d0
    vx, vy, ax, ay, rx, ry, c1_val, c2_val, tie = steer_core(
        robot_pos.x, robot_pos.y, goal.x, goal.y, ox, oy, dist, d0,
        params.b, active is not None,
    )
    return SteeringDecision(
        a_hat=Vec2(ax, ay),
        r_hat=Vec2(rx, ry) if active is not None else None,
        c1=c1_val,
        c2=c2_val,
        v_hat=Vec2(vx, vy),
        active_obstacle_id=active.obstacle_id if active is not None else None,
        tie_break_applied=bool(tie),
    )
