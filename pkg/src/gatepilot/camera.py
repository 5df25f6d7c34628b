"""Camera geometry: pinhole projection, parametric fisheye warp, bearing rays.

Frame conventions used throughout the package:

- Earth frame E: NED (x north, y east, z down). Gravity is +9.81 m/s^2
  along +z.
- Body frame B: x forward, y right, z down. Attitude is Euler Z-Y-X
  (yaw-pitch-roll), so the body-to-earth rotation is
  ``R_be = Rz(psi) @ Ry(theta) @ Rx(phi)``.
- Camera frame C: x right, y down, z along the optical axis. The fixed
  mount rotation ``r_cb`` maps camera to body; the default front mount
  sends the optical axis to body-x.

The fisheye model is a one-parameter blend between pinhole and equidistant
projection, radial in normalized image coordinates:

    r_d = (1 - k) * r + k * atan(r)

with ``k = 0`` the pure pinhole and ``k = 1`` the pure equidistant mapping.
The blend is strictly increasing in r, so the inverse warp is a 1-D root
find (Newton, tolerance 1e-12).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GRAVITY = 9.81

_NEWTON_ITERS = 40


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass
class Attitude:
    """Euler angles (rad), roll-pitch-yaw, body-to-earth via Z-Y-X."""

    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        if not abs(self.phi) < math.pi:
            raise ValueError(f"roll out of range: {self.phi}")
        if not abs(self.theta) < math.pi / 2:
            raise ValueError(f"pitch out of range: {self.theta}")
        self.psi = wrap_angle(self.psi)

    def r_be(self) -> np.ndarray:
        """Rotation matrix body -> earth."""
        return rot_z(self.psi) @ rot_y(self.theta) @ rot_x(self.phi)

    def r_eb(self) -> np.ndarray:
        """Rotation matrix earth -> body."""
        return self.r_be().T


def mount_rotation(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Camera-to-body rotation from a yaw-pitch-roll triple (rad)."""
    return rot_z(yaw) @ rot_y(pitch) @ rot_x(roll)

# Front camera: optical axis -> body x, image right -> body y, image down -> body z.
FRONT_MOUNT = mount_rotation(math.pi / 2, 0.0, math.pi / 2)


@dataclass
class CameraModel:
    """Intrinsics plus the one-parameter fisheye coefficient and mount rotation.

    f_x, f_y are focal lengths over pixel pitch (px); (c_x, c_y) the
    principal point (px); k_fish in [0, 1] blends pinhole (0) to
    equidistant (1); r_cb rotates camera directions into the body frame.
    """

    f_x: float
    f_y: float
    c_x: float
    c_y: float
    width: int
    height: int
    k_fish: float = 0.0
    r_cb: np.ndarray = field(default_factory=lambda: FRONT_MOUNT.copy())

    def __post_init__(self):
        self.r_cb = np.asarray(self.r_cb, dtype=float)
        errs = []
        if not (self.f_x > 0 and self.f_y > 0):
            errs.append(f"focal lengths must be positive: {self.f_x}, {self.f_y}")
        if not (0 <= self.c_x < self.width and 0 <= self.c_y < self.height):
            errs.append("principal point outside the image")
        if not 0.0 <= self.k_fish <= 1.0:
            errs.append(f"k_fish outside [0, 1]: {self.k_fish}")
        if self.r_cb.shape != (3, 3):
            errs.append("r_cb must be 3x3")
        else:
            if np.linalg.norm(self.r_cb.T @ self.r_cb - np.eye(3)) >= 1e-9:
                errs.append("r_cb is not orthonormal")
            elif np.linalg.det(self.r_cb) < 0:
                errs.append("r_cb is a reflection")
        if errs:
            raise ValueError("; ".join(errs))
        self._bearing_grid = None

    # -- fisheye warp -------------------------------------------------

    def _distort_radius(self, r):
        k = self.k_fish
        return (1.0 - k) * r + k * np.arctan(r)

    def _undistort_radius(self, r_d):
        """Invert the radial blend by Newton iteration (vectorized)."""
        k = self.k_fish
        if k == 0.0:
            return np.asarray(r_d, dtype=float)
        r = np.asarray(r_d, dtype=float).copy()
        for _ in range(_NEWTON_ITERS):
            f = (1.0 - k) * r + k * np.arctan(r) - r_d
            fp = (1.0 - k) + k / (1.0 + r * r)
            r = r - f / fp
        return r

    # -- projection ---------------------------------------------------

    def project(self, point_cam) -> tuple[float, float] | None:
        """Project a camera-frame point to a (possibly distorted) pixel.

        Returns None when the point is at or behind the focal plane or
        falls outside the image rectangle.
        """
        u, v, ok = self.project_raw(point_cam)
        return (u, v) if ok else None

    def project_raw(self, point_cam) -> tuple[float, float, bool]:
        """Like project, but always returns coordinates plus an in-view flag.

        Out-of-view points still get meaningful coordinates unless the
        point is at/behind the focal plane, in which case (nan, nan, False).
        """
        x, y, z = (float(c) for c in point_cam)
        if z <= 1e-12:
            return math.nan, math.nan, False
        xn = x / z
        yn = y / z
        if self.k_fish != 0.0:
            r = math.hypot(xn, yn)
            if r > 1e-12:
                scale = float(self._distort_radius(r)) / r
                xn *= scale
                yn *= scale
        u = self.f_x * xn + self.c_x
        v = self.f_y * yn + self.c_y
        in_view = 0.0 <= u < self.width and 0.0 <= v < self.height
        return u, v, in_view

    def undistort_pixel(self, px) -> tuple[float, float]:
        """Map a raw (distorted) pixel to the ideal pinhole pixel."""
        u, v = float(px[0]), float(px[1])
        if self.k_fish == 0.0:
            return u, v
        xd = (u - self.c_x) / self.f_x
        yd = (v - self.c_y) / self.f_y
        r_d = math.hypot(xd, yd)
        if r_d < 1e-12:
            return u, v
        r = float(self._undistort_radius(r_d))
        scale = r / r_d
        return self.c_x + self.f_x * xd * scale, self.c_y + self.f_y * yd * scale

    def bearing_from_pixel(self, px) -> np.ndarray:
        """Unit direction in the camera frame through an ideal pixel."""
        u, v = float(px[0]), float(px[1])
        d = np.array([(u - self.c_x) / self.f_x, (v - self.c_y) / self.f_y, 1.0])
        return d / np.linalg.norm(d)

    def bearing_grid(self) -> np.ndarray:
        """Camera-frame unit bearing for every pixel center, shape (H, W, 3).

        Raw pixel coordinates are undistorted first, so the grid is the
        exact inverse of project() per pixel. Cached per camera.
        """
        if self._bearing_grid is None:
            us, vs = np.meshgrid(
                np.arange(self.width, dtype=float),
                np.arange(self.height, dtype=float),
            )
            xd = (us - self.c_x) / self.f_x
            yd = (vs - self.c_y) / self.f_y
            r_d = np.sqrt(xd * xd + yd * yd)
            if self.k_fish != 0.0:
                r = self._undistort_radius(r_d)
                scale = np.where(r_d > 1e-12, r / np.maximum(r_d, 1e-300), 1.0)
            else:
                scale = np.ones_like(r_d)
            x = xd * scale
            y = yd * scale
            z = np.ones_like(x)
            n = np.sqrt(x * x + y * y + z * z)
            grid = np.stack([x / n, y / n, z / n], axis=-1)
            self._bearing_grid = np.ascontiguousarray(grid)
        return self._bearing_grid


def bearing_to_earth(v_cam, att: Attitude, cam: CameraModel) -> np.ndarray:
    """Rotate a camera-frame bearing into the earth frame."""
    return att.r_be() @ cam.r_cb @ np.asarray(v_cam, dtype=float)


@dataclass
class BearingRay:
    """A line anchored at p (earth frame, m) with unit direction v."""

    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        n = np.linalg.norm(self.v)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"direction is not unit length: |v| = {n}")
