"""Pure-Python hot kernels: per-tick steering math and the kinematic step.

The compiled twin in fast.pyx mirrors these functions expression for
expression. Keep both in sync: any change here must be replicated there,
including operation order. sqrt(dx*dx + dy*dy) is used instead of
math.hypot because CPython's hypot is not the libm hypot the C side calls,
and the two backends must stay bit-identical.
"""

from math import atan2, cos, pi, sin, sqrt

TIE_EPS = 1e-9


def wrap_angle(a):
    """Wrap an angle to (-pi, pi]."""
    while a > pi:
        a -= 2.0 * pi
    while a <= -pi:
        a += 2.0 * pi
    return a


def steer_core(px, py, gx, gy, ox, oy, dist, d0, b, has_active):
    """One steering evaluation.

    Returns (vx, vy, ax, ay, rx, ry, c1, c2, tie_break) where (vx, vy) is
    the commanded unit direction, (ax, ay) the unit goal direction,
    (rx, ry) the unit obstacle direction (zeros when inactive), c1/c2 the
    gains (zeros when inactive) and tie_break whether the head-on fallback
    fired. Callers guarantee robot != goal, and robot != obstacle plus
    0 <= dist <= d0 and d0 > 0 when has_active.
    """
    dxg = gx - px
    dyg = gy - py
    an = sqrt(dxg * dxg + dyg * dyg)
    ax = dxg / an
    ay = dyg / an
    if not has_active:
        return ax, ay, ax, ay, 0.0, 0.0, 0.0, 0.0, False
    dxo = ox - px
    dyo = oy - py
    rn = sqrt(dxo * dxo + dyo * dyo)
    rx = dxo / rn
    ry = dyo / rn
    c1 = -(ax * rx + ay * ry)
    # keep in sync with steering.c2: exact at both endpoints
    c2 = b + (1.0 - b) * (dist / d0)
    sx = ax + c1 * c2 * rx
    sy = ay + c1 * c2 * ry
    sn = sqrt(sx * sx + sy * sy)
    if sn < TIE_EPS:
        # head-on singularity: deterministic left perpendicular of r_hat
        return -ry, rx, ax, ay, rx, ry, c1, c2, True
    return sx / sn, sy / sn, ax, ay, rx, ry, c1, c2, False


def step_core(x, y, heading, vx, vy, gx, gy, cruise, max_turn,
              slowdown_r, drift_x, drift_y, dt):
    """Advance the robot one tick toward the commanded direction (vx, vy).

    Heading turns toward atan2(vy, vx) rate-limited by max_turn; speed is
    cruise, ramped linearly to zero inside slowdown_r of the goal; drift is
    added as a velocity. Returns (x, y, heading, speed).
    """
    desired = atan2(vy, vx)
    err = wrap_angle(desired - heading)
    max_delta = max_turn * dt
    if err > max_delta:
        err = max_delta
    elif err < -max_delta:
        err = -max_delta
    heading = wrap_angle(heading + err)
    dxg = gx - x
    dyg = gy - y
    goal_dist = sqrt(dxg * dxg + dyg * dyg)
    if goal_dist >= slowdown_r:
        speed = cruise
    else:
        speed = cruise * (goal_dist / slowdown_r)
    x = x + speed * dt * cos(heading) + drift_x * dt
    y = y + speed * dt * sin(heading) + drift_y * dt
    return x, y, heading, speed
