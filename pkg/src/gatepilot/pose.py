"""Position estimation from detected gate corners.

Three routes:

- ls_position: bearing rays through the four corners, attitude supplied
  externally; camera position minimizes the summed squared perpendicular
  distance to the four corner rays (closed-form 3x3 solve).
- pnp_position: classic planar PnP via homography DLT + decomposition;
  recovers position and full attitude from pixels alone (baseline).
- histogram_position: two-bar closed-form lateral geometry for very close
  range where corners leave the field of view.

Corner order everywhere: TL, TR, BL, BR, matching detect and imaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .camera import Attitude, CameraModel, bearing_to_earth
from .errors import DegenerateGeometryError, GeometryError

_METHODS = ("LS", "PnP", "histogram")


@dataclass
class GateGeometry:
    """Known gate model: 4 earth-frame corners (TL, TR, BL, BR) and side g_s."""

    corners: np.ndarray
    g_s: float

    def __post_init__(self):
        self.corners = np.asarray(self.corners, dtype=float)
        if self.corners.shape != (4, 3):
            raise ValueError("corners must be 4 x 3")
        tl, tr, bl, br = self.corners
        # Coplanarity: the fourth corner lies in the plane of the first three.
        n = np.cross(tr - tl, bl - tl)
        nn = np.linalg.norm(n)
        if nn < 1e-12:
            raise ValueError("degenerate corner triangle")
        if abs((br - tl) @ (n / nn)) > 1e-9:
            raise ValueError("corners are not coplanar")
        for a, b in ((tl, tr), (tr, br), (br, bl), (bl, tl)):
            side = np.linalg.norm(a - b)
            if abs(side - self.g_s) > 1e-9 * max(1.0, self.g_s):
                raise ValueError(
                    f"side length {side} does not match g_s={self.g_s}")

    @classmethod
    def from_spec(cls, gate_spec):
        """Build from an imaging.GateSpec (centerline square)."""
        return cls(gate_spec.corners(), gate_spec.size)

    def center(self):
        return self.corners.mean(axis=0)

    def axes(self):
        """Rotation gate->earth: columns (h right, down, normal)."""
        tl, tr, bl, _ = self.corners
        h = (tr - tl) / np.linalg.norm(tr - tl)
        d = (bl - tl) / np.linalg.norm(bl - tl)
        n = np.cross(h, d)
        return np.column_stack([h, d, n])


@dataclass
class PoseEstimate:
    """Estimated camera position, fit residual, and provenance tag."""

    t: np.ndarray
    residual: float
    method: str
    attitude: Attitude = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.residual < 0:
            raise ValueError("residual must be >= 0")
        if self.method not in _METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")


def point_line_distance(t, p, v):
    """Perpendicular distance from point t to the line through p along v."""
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    d = p - t
    return float(np.linalg.norm(d - (d @ v) * v))


def ls_position(corners_px, gate: GateGeometry, att: Attitude,
                cam: CameraModel) -> PoseEstimate:
    """Least-squares camera position from 4 corner bearing rays.

    corners_px are ideal (undistorted) pixels ordered TL, TR, BL, BR.
    Each corner pixel gives an earth-frame bearing ray anchored at the
    known 3-D corner; the returned position minimizes the sum of squared
    perpendicular distances to the four rays.
    """
    corners_px = np.asarray(corners_px, dtype=float)
    a = np.zeros((3, 3))
    b = np.zeros(3)
    rays = []
    for i in range(4):
        v_cam = cam.bearing_from_pixel(corners_px[i])
        v = bearing_to_earth(v_cam, att, cam)
        m = np.eye(3) - np.outer(v, v)
        a += m
        b += m @ gate.corners[i]
        rays.append(v)
    if np.linalg.cond(a) > 1e12:
        raise DegenerateGeometryError("bearing rays are (nearly) all parallel")
    t = np.linalg.solve(a, b)
    residual = float(np.mean([point_line_distance(t, gate.corners[i], rays[i])
                              for i in range(4)]))
    return PoseEstimate(t, residual, "LS")


def _dlt_homography(plane_pts, pixels):
    """Homography plane (a,b) -> pixel (u,v) by normalized DLT."""

    def normalizer(pts):
        c = pts.mean(axis=0)
        d = np.linalg.norm(pts - c, axis=1).mean()
        if d < 1e-12:
            raise DegenerateGeometryError("coincident correspondence points")
        s = math.sqrt(2.0) / d
        return np.array([[s, 0.0, -s * c[0]],
                         [0.0, s, -s * c[1]],
                         [0.0, 0.0, 1.0]])

    t_pl = normalizer(plane_pts)
    t_px = normalizer(pixels)
    rows = []
    for (a, b), (u, v) in zip(plane_pts, pixels):
        xs = t_pl @ (a, b, 1.0)
        us = t_px @ (u, v, 1.0)
        x = xs / xs[2]
        uu = us / us[2]
        rows.append(np.concatenate([np.zeros(3), -x, uu[1] * x]))
        rows.append(np.concatenate([x, np.zeros(3), -uu[0] * x]))
    m = np.array(rows)
    _, s, vt = np.linalg.svd(m)
    # Rank < 8 means the solution is not unique (collinear corners).
    if s[6] < 1e-10 * s[0]:
        raise DegenerateGeometryError("correspondences are rank deficient")
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_px) @ h_norm @ t_pl
    return h


def pnp_position(corners_px, gate: GateGeometry,
                 cam: CameraModel) -> PoseEstimate:
    """Planar PnP baseline: homography decomposition, no attitude prior.

    Returns the camera position (earth frame) plus the full recovered
    attitude. Residual is the same mean ray-distance metric as LS,
    computed with the recovered attitude.
    """
    corners_px = np.asarray(corners_px, dtype=float)
    axes = gate.axes()
    c = gate.center()
    plane_pts = (gate.corners - c) @ axes[:, :2]
    h = _dlt_homography(plane_pts, corners_px)

    k = np.array([[cam.f_x, 0.0, cam.c_x],
                  [0.0, cam.f_y, cam.c_y],
                  [0.0, 0.0, 1.0]])
    m = np.linalg.solve(k, h)
    n1 = np.linalg.norm(m[:, 0])
    n2 = np.linalg.norm(m[:, 1])
    if n1 + n2 < 1e-12:
        raise DegenerateGeometryError("homography collapse")
    lam = 2.0 / (n1 + n2)
    # Positive depth: the gate center (plane origin) must sit in front of
    # the camera.
    if m[2, 2] * lam < 0:
        lam = -lam
    r1 = lam * m[:, 0]
    r2 = lam * m[:, 1]
    t = lam * m[:, 2]
    r_approx = np.column_stack([r1, r2, np.cross(r1, r2)])
    u, _, vt = np.linalg.svd(r_approx)
    r = u @ np.diag([1.0, 1.0, np.linalg.det(u @ vt)]) @ vt

    # r, t map gate-plane coords to camera coords. Camera pose in earth:
    cam_pos = c + axes @ (-r.T @ t)
    r_ec = axes @ r.T
    r_eb = r_ec @ cam.r_cb.T
    psi = math.atan2(r_eb[1, 0], r_eb[0, 0])
    theta = -math.asin(max(-1.0, min(1.0, r_eb[2, 0])))
    phi = math.atan2(r_eb[2, 1], r_eb[2, 2])
    att = Attitude(phi=phi, theta=theta, psi=psi)

    rays = [r_ec @ cam.bearing_from_pixel(corners_px[i]) for i in range(4)]
    residual = float(np.mean(
        [point_line_distance(cam_pos, gate.corners[i], rays[i])
         for i in range(4)]))
    return PoseEstimate(cam_pos, residual, "PnP", attitude=att)


def histogram_position(u_left, u_right, att: Attitude, cam: CameraModel,
                       g_s):
    """Close-range lateral position from the two vertical-bar columns.

    u_left/u_right are raw image columns of the bar peaks; they are
    undistorted at the principal row internally. att.psi is the heading
    relative to the gate normal. Returns (x_h, y_h): perpendicular
    distance to the gate plane and lateral offset, positive toward the
    left bar.
    """
    if not u_left < u_right:
        raise GeometryError(
            f"bar columns out of order: {u_left} >= {u_right}")
    delta = att.psi
    ul = cam.undistort_pixel((float(u_left), cam.c_y))[0]
    ur = cam.undistort_pixel((float(u_right), cam.c_y))[0]
    beta_l = math.atan((ul - cam.c_x) / cam.f_x)
    beta_r = math.atan((ur - cam.c_x) / cam.f_x)
    alpha1 = -(delta + beta_l)
    alpha2 = delta + beta_r
    if alpha1 + alpha2 <= 0:
        raise GeometryError(
            f"bar bearings cross: alpha1={alpha1}, alpha2={alpha2}")
    gamma = math.pi / 2.0 - alpha2
    r1 = g_s * math.sin(gamma) / math.sin(alpha1 + alpha2)
    x_h = r1 * math.cos(alpha1)
    y_h = g_s / 2.0 - r1 * math.sin(alpha1)
    return x_h, y_h


# -- noise benchmarks ----------------------------------------------------

def default_bench_camera():
    """Pinhole camera used by the benchmarks (ideal pixels, no fisheye)."""
    return CameraModel(f_x=150.0, f_y=150.0, c_x=175.0, c_y=80.0,
                       width=350, height=160, k_fish=0.0)


def _bench_gate(distance, g_s=1.0):
    half = g_s / 2.0
    corners = np.array([
        [distance, -half, -half],
        [distance, half, -half],
        [distance, -half, half],
        [distance, half, half],
    ])
    return GateGeometry(corners, g_s)


def pose_noise_benchmark(distances, pixel_noise_sigma, attitude_noise_degs,
                         trials, seed, cam: CameraModel = None, g_s=1.0):
    """Monte-Carlo RMSE of LS vs PnP over a distance x attitude-noise grid.

    The camera sits at the origin looking straight at a g_s gate centered
    at each distance. Per trial both estimators see the same perturbed
    pixels; LS additionally gets a perturbed attitude. Returns rows of
    (method, distance_m, att_noise_deg, rmse_m), LS rows first per cell.
    Deterministic per seed.
    """
    if cam is None:
        cam = default_bench_camera()
    rows = []
    for di, dist in enumerate(distances):
        gate = _bench_gate(dist, g_s)
        truth_px = np.array([cam.project_raw(g)[:2]
                             for g in _gate_in_camera(gate, cam)])
        for ai, att_deg in enumerate(attitude_noise_degs):
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(di, ai)))
            sq_ls = 0.0
            sq_pnp = 0.0
            for _ in range(trials):
                px = truth_px + rng.normal(0.0, pixel_noise_sigma,
                                           size=(4, 2))
                datt = np.deg2rad(rng.normal(0.0, att_deg, size=3)) \
                    if att_deg > 0 else np.zeros(3)
                att = Attitude(phi=datt[0], theta=datt[1], psi=datt[2])
                est_ls = ls_position(px, gate, att, cam)
                est_pnp = pnp_position(px, gate, cam)
                sq_ls += float(np.sum(est_ls.t ** 2))
                sq_pnp += float(np.sum(est_pnp.t ** 2))
            rows.append(("LS", float(dist), float(att_deg),
                         math.sqrt(sq_ls / trials)))
            rows.append(("PnP", float(dist), float(att_deg),
                         math.sqrt(sq_pnp / trials)))
    return rows


def _gate_in_camera(gate, cam, position=None, att=None):
    """Gate corners expressed in the camera frame for a given pose."""
    if position is None:
        position = np.zeros(3)
    if att is None:
        att = Attitude()
    r_ec = (att.r_be() @ cam.r_cb).T
    return [(r_ec @ (c - position)) for c in gate.corners]


def histogram_noise_benchmark(x_distances, headings_deg, pixel_noise_sigma,
                              trials, seed, cam: CameraModel = None,
                              g_s=1.0, lateral_range=(-0.2, 0.2)):
    """Monte-Carlo RMSE of the two-bar geometry at close range.

    The camera stands x meters from the gate plane with a random lateral
    offset and the given relative heading; bar columns are projected
    through the camera model (including fisheye), perturbed with pixel
    noise, and inverted. Returns rows of (distance_m, heading_deg,
    rmse_m). Deterministic per seed.
    """
    if cam is None:
        cam = CameraModel(f_x=150.0, f_y=150.0, c_x=175.0, c_y=80.0,
                          width=350, height=160, k_fish=1.0)
    rows = []
    for xi, x in enumerate(x_distances):
        for hi, hdg in enumerate(headings_deg):
            delta = math.radians(hdg)
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(xi, hi)))
            sq = 0.0
            for _ in range(trials):
                y_e = rng.uniform(lateral_range[0], lateral_range[1])
                cols = []
                for bar_y in (-g_s / 2.0, g_s / 2.0):
                    d_e = np.array([x, bar_y - y_e, 0.0])
                    att = Attitude(psi=delta)
                    d_cam = (att.r_be() @ cam.r_cb).T @ d_e
                    u, _, _ = cam.project_raw(d_cam)
                    cols.append(u + rng.normal(0.0, pixel_noise_sigma))
                est_x, est_y = histogram_position(
                    cols[0], cols[1], Attitude(psi=delta), cam, g_s)
                sq += (est_x - x) ** 2 + (est_y - (-y_e)) ** 2
            rows.append((float(x), float(hdg), math.sqrt(sq / trials)))
    return rows
