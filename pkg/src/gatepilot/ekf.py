"""Drag-model extended Kalman filter.

Seven states: earth position, body-frame vertical velocity, and the three
accelerometer biases.  Horizontal body velocity never appears as a state:
the accelerometer reading is turned into a velocity pseudo-measurement
through the linear drag model, v = (a_m - b) / k, so the bias is only
integrated once on its way into position.

State vector layout (index: meaning):
    0,1,2  x_E, y_E, z_E   position, earth frame, NED (m)
    3      v_z^B           vertical velocity, body frame (m/s)
    4,5,6  b_ax, b_ay, b_az  accelerometer biases (m/s^2)
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .camera import Attitude
from .errors import NumericalError

G = 9.81

N_STATES = 7

# Per-step process noise and per-axis measurement noise defaults.  These are
# tuning values, not identified constants.
Q_POS = 1e-6
Q_VZ = 1e-3
Q_BIAS = 1e-8
R_POS = 0.05 ** 2


def default_q():
    return np.diag([Q_POS, Q_POS, Q_POS, Q_VZ, Q_BIAS, Q_BIAS, Q_BIAS])


def default_r():
    return np.eye(3) * R_POS


def default_p0():
    return np.diag([0.1 ** 2] * 3 + [0.5 ** 2] + [0.3 ** 2] * 3)


@dataclass
class DragParams:
    """Linear drag coefficients (1/s). k_z is only used by the simulator."""

    k_x: float = -0.57
    k_y: float = -1.0
    k_z: float = -1.0

    def __post_init__(self):
        if self.k_x >= 0:
            raise ValueError("k_x must be negative")
        if self.k_y >= 0:
            raise ValueError("k_y must be negative")


@dataclass
class ImuInput:
    """One IMU/AHRS sample: attitude, specific force, roll/pitch rates."""

    phi: float
    theta: float
    psi: float
    ax: float
    ay: float
    az: float
    p: float
    q: float

    def __post_init__(self):
        # reuse the attitude range checks
        Attitude(self.phi, self.theta, self.psi)

    def attitude(self):
        return Attitude(self.phi, self.theta, self.psi)


@dataclass
class NavState:
    x: np.ndarray
    P: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.x.shape != (N_STATES,):
            raise ValueError("state must be a 7-vector")
        if self.P.shape != (N_STATES, N_STATES):
            raise ValueError("P must be 7x7")
        if np.abs(self.P - self.P.T).max() > 1e-9:
            raise ValueError("P must be symmetric")
        w = np.linalg.eigvalsh(self.P)
        if w.min() < -1e-9:
            raise ValueError("P must be positive semi-definite")

    @property
    def pos(self):
        return self.x[:3]

    @property
    def v_z(self):
        return float(self.x[3])

    @property
    def bias(self):
        return self.x[4:]


def initial_state(pos=(0.0, 0.0, 0.0), p0=None, t=0.0):
    x = np.zeros(N_STATES)
    x[:3] = pos
    return NavState(x, default_p0() if p0 is None else p0, t)


def process_derivative(x, u, drag):
    """Time derivative of the state under one IMU input."""
    x = np.asarray(x, dtype=float)
    v_x = (u.ax - x[4]) / drag.k_x
    v_y = (u.ay - x[5]) / drag.k_y
    v_z = x[3]
    r_be = u.attitude().r_be()
    xdot = np.zeros(N_STATES)
    xdot[:3] = r_be @ (v_x, v_y, v_z)
    xdot[3] = (u.az - x[6] + G * math.cos(u.theta) * math.cos(u.phi)
               + u.q * v_x - u.p * v_y)
    # bias random walk: zero mean drift
    return xdot


def jacobian_f(x, u, drag):
    """Analytic Jacobian of process_derivative w.r.t. the state.

    The model is affine in the state, so the result does not actually
    depend on x; the argument is kept for the standard EKF signature.
    """
    r_be = u.attitude().r_be()
    F = np.zeros((N_STATES, N_STATES))
    F[:3, 3] = r_be[:, 2]
    F[:3, 4] = -r_be[:, 0] / drag.k_x
    F[:3, 5] = -r_be[:, 1] / drag.k_y
    F[3, 4] = -u.q / drag.k_x
    F[3, 5] = u.p / drag.k_y
    F[3, 6] = -1.0
    return F


def predict(s, u, dt, drag, Q=None):
    """Forward-Euler state propagation, Phi = I + F*dt covariance update."""
    if not 0 < dt <= 0.1:
        raise ValueError("dt must be in (0, 0.1] s")
    if Q is None:
        Q = default_q()
    x = s.x + process_derivative(s.x, u, drag) * dt
    F = jacobian_f(s.x, u, drag)
    phi = np.eye(N_STATES) + F * dt
    P = phi @ s.P @ phi.T + Q
    P = 0.5 * (P + P.T)
    return NavState(x, P, s.t + dt)


def update(s, z, R=None):
    """Position measurement update, Joseph-form covariance."""
    z = np.asarray(z, dtype=float)
    if z.shape != (3,):
        raise ValueError("measurement must be a 3-vector")
    if R is None:
        R = default_r()
    R = np.asarray(R, dtype=float)
    S = s.P[:3, :3] + R
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericalError(
            "innovation covariance not invertible (cond=%.3g)" % cond)
    H = np.zeros((3, N_STATES))
    H[:, :3] = np.eye(3)
    K = s.P @ H.T @ np.linalg.inv(S)
    x = s.x + K @ (z - s.x[:3])
    ikh = np.eye(N_STATES) - K @ H
    P = ikh @ s.P @ ikh.T + K @ R @ K.T
    P = 0.5 * (P + P.T)
    return NavState(x, P, s.t)


# Replay log columns. Measurement columns are optional; empty fields on a
# row mean "no fix at this tick".
LOG_FIELDS = ["t", "phi", "theta", "psi", "ax", "ay", "az", "p", "q"]
MEAS_FIELDS = ["zx", "zy", "zz"]
OUT_FIELDS = ["t", "x", "y", "z", "vz", "bax", "bay", "baz", "P_trace"]


def write_imu_log(path, records):
    """records: iterable of (t, ImuInput, z-or-None)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LOG_FIELDS + MEAS_FIELDS)
        for t, u, z in records:
            row = ["%.10g" % v for v in
                   (t, u.phi, u.theta, u.psi, u.ax, u.ay, u.az, u.p, u.q)]
            if z is None:
                row += ["", "", ""]
            else:
                row += ["%.10g" % v for v in z]
            w.writerow(row)


def read_imu_log(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:len(LOG_FIELDS)] != LOG_FIELDS:
            raise ValueError("unexpected log header: %s" % header)
        has_meas = header[len(LOG_FIELDS):] == MEAS_FIELDS
        for row in reader:
            if not row:
                continue
            vals = [float(v) for v in row[:len(LOG_FIELDS)]]
            u = ImuInput(*vals[1:])
            z = None
            if has_meas and len(row) > len(LOG_FIELDS) and row[9] != "":
                z = np.array([float(row[9]), float(row[10]),
                              float(row[11])])
            records.append((vals[0], u, z))
    return records


def run_replay(records, drag, Q=None, R=None, x0=None):
    """Run the filter over a replay log; returns output rows.

    Output row: (t, x, y, z, vz, bax, bay, baz, trace(P)).
    """
    if not records:
        return []
    state = x0 if x0 is not None else initial_state(t=records[0][0])
    rows = []
    prev_t = records[0][0]
    for t, u, z in records:
        dt = t - prev_t
        if dt > 0:
            state = predict(state, u, dt, drag, Q)
        prev_t = t
        if z is not None:
            state = update(state, z, R)
        rows.append((t, *state.x, float(np.trace(state.P))))
    return rows


def write_filter_output(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(OUT_FIELDS)
        for row in rows:
            w.writerow(["%.10g" % v for v in row])
