"""Outer-loop control laws and the planar pass-through feasibility study.

Two regimes: a PD roll law that aligns the vehicle with the gate center
while pitch is held at a fixed trim angle, and an open-loop coordinated
arc flown on bank, pitch, yaw rate, and altitude-holding thrust.

The arc law lives in the body-fixed earth frame F: origin at the vehicle,
x along the heading, z down.  Thrust here is the specific force along the
body z axis, so hover is thrust_c = -9.81.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

G = 9.81
ATT_LIMIT = math.radians(30.0)


@dataclass
class AttitudeCmd:
    phi_c: float
    theta_c: float
    thrust_c: float
    psi_c: float = None
    psi_rate_c: float = None
    limit: float = ATT_LIMIT

    def __post_init__(self):
        if abs(self.phi_c) > self.limit + 1e-12:
            raise ValueError("phi_c exceeds attitude limit")
        if abs(self.theta_c) > self.limit + 1e-12:
            raise ValueError("theta_c exceeds attitude limit")


@dataclass
class ArcState:
    """Inputs the feed-forward arc law needs, expressed in frame F."""

    v_x_f: float
    a_y_f: float
    a_z_f: float
    r: float
    elapsed: float = 0.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("arc radius must be positive")


def straight_command(y_hat, y_dot_hat, k_p, k_d, theta_0, psi_gate=0.0,
                     thrust_c=-G, limit=ATT_LIMIT):
    """PD alignment law for the straight segment.

    y_hat is the lateral offset in the gate-local frame (origin at the
    gate center), so the roll command steers toward y = 0 while pitch
    stays at the trim angle and the heading tracks the gate.
    """
    phi = -k_p * y_hat - k_d * y_dot_hat
    phi = max(-limit, min(limit, phi))
    return AttitudeCmd(phi_c=phi, theta_c=theta_0, thrust_c=thrust_c,
                       psi_c=psi_gate, limit=limit)


def altitude_hold_thrust(phi, theta, a_z_f=0.0, g=G):
    """Specific thrust that zeroes vertical acceleration in frame F."""
    denom = math.cos(theta) * math.cos(phi)
    if abs(denom) < 1e-6:
        raise NumericalError("attitude too steep for altitude hold")
    return (-g - a_z_f) / denom


def arc_command(arc, theta_0, direction=1, g=G, limit=ATT_LIMIT):
    """Feed-forward coordinated-turn command.

    direction +1 turns with increasing yaw, -1 with decreasing yaw.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    denom = -g - arc.a_z_f
    if abs(denom) < 1e-6:
        raise NumericalError("free-fall regime: -g - a_z_f ~ 0")
    centripetal = direction * arc.v_x_f ** 2 / arc.r
    phi = math.atan((arc.a_y_f - centripetal) * math.cos(theta_0) / denom)
    phi = max(-limit, min(limit, phi))
    thrust = altitude_hold_thrust(phi, theta_0, arc.a_z_f, g)
    return AttitudeCmd(phi_c=phi, theta_c=theta_0, thrust_c=thrust,
                       psi_rate_c=direction * arc.v_x_f / arc.r,
                       limit=limit)


def planar_step(state, phi, v_x, k_y, dt, g=G):
    """One forward-Euler step of the simplified planar pass-through model."""
    if abs(phi) >= math.pi / 2:
        raise ValueError("|phi| must be below pi/2")
    x, y, v_y = state
    c = math.cos(phi)
    v_y_dot = g * math.tan(phi) + k_y * v_y * c * c
    return (x + v_x * dt, y + v_y * dt, v_y + v_y_dot * dt)


def pd_roll(y, v_y, k_p=1.0, k_v=2.0, limit=ATT_LIMIT):
    """The feasibility study's roll law phi = k_v*(k_p*(0 - y) - v_y)."""
    return max(-limit, min(limit, k_v * (k_p * (0.0 - y) - v_y)))


@dataclass
class FeasibilityResult:
    v_x: float
    x0: np.ndarray          # grid axis, shape (nx,)
    y0: np.ndarray          # grid axis, shape (ny,)
    feasible: np.ndarray    # (ny, nx) booleans
    boundary: np.ndarray    # per-y0 largest feasible x0, nan when none


def feasibility_region(v_x, x0_range=(-5.0, 0.0), y0_range=(-3.0, 3.0),
                       grid_n=100, gate_half_width=0.35, k_y=-1.0,
                       k_p=1.0, k_v=2.0, v_y0=0.0, dt=0.01,
                       limit=ATT_LIMIT, g=G):
    """Simulate the PD law from a grid of initial points.

    A point is feasible when the lateral offset at the x = 0 crossing
    (linearly interpolated between steps) is inside the gate aperture.
    """
    if grid_n < 10:
        raise ValueError("grid_n must be at least 10")
    if v_x <= 0:
        raise ValueError("v_x must be positive")
    x0 = np.linspace(x0_range[0], x0_range[1], grid_n)
    y0 = np.linspace(y0_range[0], y0_range[1], grid_n)
    xg, yg = np.meshgrid(x0, y0)
    x = xg.ravel().copy()
    y = yg.ravel().copy()
    v_y = np.full(x.shape, float(v_y0))
    y_cross = np.full(x.shape, np.nan)

    active = x < 0.0
    # cells starting at x >= 0 cross immediately
    y_cross[~active] = y[~active]
    while active.any():
        phi = np.clip(k_v * (k_p * (0.0 - y) - v_y), -limit, limit)
        c = np.cos(phi)
        x_new = x + v_x * dt
        y_new = y + v_y * dt
        v_y_new = v_y + (g * np.tan(phi) + k_y * v_y * c * c) * dt
        crossed = active & (x_new >= 0.0)
        if crossed.any():
            frac = (0.0 - x[crossed]) / (x_new[crossed] - x[crossed])
            y_cross[crossed] = y[crossed] \
                + frac * (y_new[crossed] - y[crossed])
            active &= ~crossed
        x, y, v_y = x_new, y_new, v_y_new

    feasible = (np.abs(y_cross) <= gate_half_width).reshape(grid_n, grid_n)
    boundary = np.full(grid_n, np.nan)
    for i in range(grid_n):
        idx = np.nonzero(feasible[i])[0]
        if idx.size:
            boundary[i] = x0[idx.max()]
    return FeasibilityResult(v_x=v_x, x0=x0, y0=y0, feasible=feasible,
                             boundary=boundary)


def write_feasibility_csv(path, result):
    with open(path, "w", newline="") as fh:
        fh.write("x0,y0,feasible\n")
        for i, yv in enumerate(result.y0):
            for j, xv in enumerate(result.x0):
                fh.write("%.10g,%.10g,%d\n"
                         % (xv, yv, int(result.feasible[i, j])))


def write_boundary_csv(path, result):
    with open(path, "w", newline="") as fh:
        fh.write("y0,x_boundary\n")
        for yv, xb in zip(result.y0, result.boundary):
            fh.write("%.10g,%s\n"
                     % (yv, "" if np.isnan(xb) else "%.10g" % xb))
