"""Deterministic fixed-step simulation.

One trial runs the perceive -> fuse -> steer -> move loop until a
termination condition fires. Trials are pure functions of
(scenario, mode, seed): perception noise and disturbance gusts come from
separate seeded streams, moving obstacles advance before the robot each
tick, and all per-tick state is recorded for export and plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from soar_sim._kernel import step_core
from soar_sim.perception import ObstacleMemory, fuse, sense
from soar_sim.scenario_io import ScenarioSpec
from soar_sim.steering import (
    ActiveObstacle,
    SteeringDecision,
    SteeringParams,
    attractive_potential,
    repulsive_potential,
    steering_direction,
)
from soar_sim.world import (
    ClearancePolicy,
    RobotParams,
    Vec2,
    effective_d0,
    nearest_effective_obstacle,
)

MODE_SOAR = "soar"
MODE_NON_SOAR = "non_soar"

OUTCOME_GOAL = "goal_reached"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_WRONG_DIRECTION = "wrong_direction"
OUTCOME_STUCK = "stuck"
OUTCOME_COLLISION = "collision"

# label all detections collapse to when semantic information is withheld
OPAQUE_CLASS = "obstacle"

# rng sub-stream tags, so toggling one noise source never shifts the other
_STREAM_PERCEPTION = 1
_STREAM_DISTURBANCE = 2


@dataclass(frozen=True, slots=True)
class RobotState:
    position: Vec2
    heading: float
    speed: float
    time: float


@dataclass(frozen=True, slots=True)
class TerminationTuning:
    """Thresholds for the failure conditions the trial protocol names."""

    stuck_window: float = 5.0
    stuck_epsilon: float = 0.05
    wrong_dir_factor: float = 1.5


@dataclass(frozen=True, slots=True)
class TickLog:
    """Per-tick diagnostics; one row per simulation step."""

    time: float
    decision: SteeringDecision
    speed: float
    min_clearance: float
    f_attractive: float
    f_repulsive: float


@dataclass(frozen=True, slots=True)
class TrialResult:
    outcome: str
    travel_time: float
    path_length: float
    min_clearance_by_class: dict[str, float]
    trajectory: tuple[tuple[float, Vec2, float], ...]
    tick_log: tuple[TickLog, ...]
    mode: str
    seed: int

    @property
    def succeeded(self) -> bool:
        return self.outcome == OUTCOME_GOAL


def step(
    state: RobotState,
    v_hat: Vec2,
    params: RobotParams,
    goal: Vec2,
    disturbance: Vec2,
    dt: float,
) -> RobotState:
    """Advance the robot one tick toward v_hat (turn-rate limited)."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    x, y, heading, speed = step_core(
        state.position.x, state.position.y, state.heading,
        v_hat.x, v_hat.y, goal.x, goal.y,
        params.cruise_speed, params.max_turn_rate, params.slowdown_radius,
        disturbance.x, disturbance.y, dt,
    )
    return RobotState(position=Vec2(x, y), heading=heading, speed=speed, time=state.time + dt)


def _avoidable(spec: ScenarioSpec) -> list[int]:
    """Indices of obstacles whose true class carries a positive clearance."""
    return [
        i for i, obs in enumerate(spec.obstacles)
        if effective_d0(spec.policy, obs.class_label) > 0.0
    ]


def detect_termination(
    history: Sequence[tuple[float, Vec2]],
    spec: ScenarioSpec,
    tuning: TerminationTuning = TerminationTuning(),
) -> Optional[str]:
    """Evaluate the termination conditions at the newest state in history.

    history holds (time, position) pairs, oldest first, evenly spaced by the
    robot dt. Collision is judged against true classes: only obstacles whose
    scenario-policy d0 is positive can collide, so driving through ignorable
    objects is sanctioned while misclassification-induced contact is not.
    """
    if not history:
        raise ValueError("history must be non-empty")
    t, pos = history[-1]
    if pos.dist(spec.goal) <= spec.goal_radius:
        return OUTCOME_GOAL
    for i in _avoidable(spec):
        obs = spec.obstacles[i]
        gap = pos.dist(obs.position_at(t)) - obs.radius
        if gap <= spec.robot.collision_radius:
            return OUTCOME_COLLISION
    if t >= spec.time_limit:
        return OUTCOME_TIMEOUT
    if t >= tuning.stuck_window:
        back = round(tuning.stuck_window / spec.robot.dt)
        if back < len(history):
            _, past = history[-1 - back]
            if pos.dist(past) < tuning.stuck_epsilon:
                return OUTCOME_STUCK
    initial_dist = history[0][1].dist(spec.goal)
    if pos.dist(spec.goal) > tuning.wrong_dir_factor * initial_dist:
        return OUTCOME_WRONG_DIRECTION
    return None


def run_trial(
    spec: ScenarioSpec,
    mode: str,
    seed: Optional[int] = None,
    steering_params: SteeringParams = SteeringParams(),
    tuning: TerminationTuning = TerminationTuning(),
    memory_ttl: float = 0.0,
) -> TrialResult:
    """Run one trial; bit-identical for identical (spec, mode, seed).

    In non_soar mode every fused estimate is relabeled to one opaque class
    and looked up against a uniform clearance policy, withholding the
    semantic information; soar mode uses the scenario's per-class policy.
    Perception is memoryless unless memory_ttl > 0, in which case out-of-view
    estimates persist for that many seconds at their last seen position.
    """
    if mode not in (MODE_SOAR, MODE_NON_SOAR):
        raise ValueError(f"mode must be '{MODE_SOAR}' or '{MODE_NON_SOAR}', got {mode!r}")
    if seed is None:
        seed = spec.seed

    rng_perception = np.random.default_rng(np.random.SeedSequence([seed, _STREAM_PERCEPTION]))
    rng_gust = np.random.default_rng(np.random.SeedSequence([seed, _STREAM_DISTURBANCE]))

    if mode == MODE_SOAR:
        lookup_policy = spec.policy
    else:
        lookup_policy = ClearancePolicy(entries={}, default_d0=spec.uniform_d0)

    dt = spec.robot.dt
    obstacles = spec.obstacles
    start_pos, start_heading = spec.start_pose
    state = RobotState(position=start_pos, heading=start_heading, speed=0.0, time=0.0)

    history: list[tuple[float, Vec2]] = [(0.0, state.position)]
    trajectory: list[tuple[float, Vec2, float]] = [(0.0, state.position, state.heading)]
    tick_log: list[TickLog] = []
    path_length = 0.0
    min_clearance: dict[str, float] = {}
    avoidable = _avoidable(spec)

    def update_clearance(pos: Vec2, t: float) -> None:
        for obs in obstacles:
            gap = max(0.0, pos.dist(obs.position_at(t)) - obs.radius)
            prev = min_clearance.get(obs.class_label)
            if prev is None or gap < prev:
                min_clearance[obs.class_label] = gap

    update_clearance(state.position, 0.0)
    outcome = detect_termination(history, spec, tuning)
    max_ticks = math.ceil(spec.time_limit / dt) + 1
    memory = ObstacleMemory(memory_ttl) if memory_ttl > 0.0 else None

    for tick in range(1, max_ticks + 1):
        if outcome is not None:
            break
        t_next = tick * dt
        # obstacle-first ordering: sensing and collision use positions at t_next
        positions = [obs.position_at(t_next) for obs in obstacles]

        frame = sense(
            obstacles, (state.position, state.heading), spec.rig, spec.noise,
            rng_perception, positions=positions,
        )
        estimates, _ = fuse(frame, spec.rig)
        if memory is not None:
            estimates = memory.update(estimates, t_next, state.position)
        if mode == MODE_NON_SOAR:
            estimates = [replace(est, class_label=OPAQUE_CLASS) for est in estimates]
        selected = nearest_effective_obstacle(state.position, estimates, lookup_policy)
        active = None
        if selected is not None:
            est, d0 = selected
            active = ActiveObstacle(
                position=est.position,
                surface_distance=est.surface_distance,
                d0=d0,
                obstacle_id=est.source_instance,
            )
        decision = steering_direction(state.position, spec.goal, active, steering_params)

        gust = Vec2(0.0, 0.0)
        if spec.disturbance.gust_std > 0.0:
            gx, gy = rng_gust.normal(0.0, spec.disturbance.gust_std, 2)
            gust = Vec2(float(gx), float(gy))
        disturbance = spec.disturbance.drift + gust

        prev_pos = state.position
        state = step(state, decision.v_hat, spec.robot, spec.goal, disturbance, dt)
        state = RobotState(state.position, state.heading, state.speed, t_next)

        path_length += prev_pos.dist(state.position)
        history.append((t_next, state.position))
        trajectory.append((t_next, state.position, state.heading))
        update_clearance(state.position, t_next)

        tick_min_clear = min(
            (max(0.0, state.position.dist(positions[i]) - obstacles[i].radius) for i in avoidable),
            default=math.inf,
        )
        f_att = attractive_potential(state.position, spec.goal, steering_params.c)
        f_rep = 0.0
        if active is not None and active.surface_distance > 0.0:
            f_rep = repulsive_potential(active.surface_distance, active.d0, steering_params.eta)
        tick_log.append(
            TickLog(
                time=t_next,
                decision=decision,
                speed=state.speed,
                min_clearance=tick_min_clear,
                f_attractive=f_att,
                f_repulsive=f_rep,
            )
        )
        outcome = detect_termination(history, spec, tuning)

    if outcome is None:
        outcome = OUTCOME_TIMEOUT
    return TrialResult(
        outcome=outcome,
        travel_time=state.time,
        path_length=path_length,
        min_clearance_by_class=min_clearance,
        trajectory=tuple(trajectory),
        tick_log=tuple(tick_log),
        mode=mode,
        seed=seed,
    )
