# cython: language_level=3
"""Compiled hot kernels. Mirrors _kernel/pure.py expression for expression;
compiled with -ffp-contract=off so results stay bit-identical to the pure
backend. Edit pure.py first, then replicate here."""

from libc.math cimport atan2, cos, sin, sqrt

cdef double PI = 3.141592653589793
cdef double TIE_EPS = 1e-9


cpdef double wrap_angle(double a):
    """Wrap an angle to (-pi, pi]."""
    while a > PI:
        a -= 2.0 * PI
    while a <= -PI:
        a += 2.0 * PI
    return a


cpdef tuple steer_core(double px, double py, double gx, double gy,
                       double ox, double oy, double dist, double d0,
                       double b, bint has_active):
    """See _kernel.pure.steer_core."""
    cdef double dxg, dyg, an, ax, ay, dxo, dyo, rn, rx, ry
    cdef double c1, c2, sx, sy, sn
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
    c2 = b + (1.0 - b) * (dist / d0)
    sx = ax + c1 * c2 * rx
    sy = ay + c1 * c2 * ry
    sn = sqrt(sx * sx + sy * sy)
    if sn < TIE_EPS:
        return -ry, rx, ax, ay, rx, ry, c1, c2, True
    return sx / sn, sy / sn, ax, ay, rx, ry, c1, c2, False


cpdef tuple step_core(double x, double y, double heading, double vx,
                      double vy, double gx, double gy, double cruise,
                      double max_turn, double slowdown_r, double drift_x,
                      double drift_y, double dt):
    """See _kernel.pure.step_core."""
    cdef double desired, err, max_delta, dxg, dyg, goal_dist, speed
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
