import math

import numpy as np
import pytest

from gatepilot.camera import (
    Attitude,
    BearingRay,
    CameraModel,
    FRONT_MOUNT,
    bearing_to_earth,
    mount_rotation,
    rot_x,
    rot_y,
    rot_z,
    wrap_angle,
)


def make_cam(**kw):
    base = dict(f_x=120.0, f_y=120.0, c_x=80.0, c_y=175.0, width=160, height=350)
    base.update(kw)
    return CameraModel(**base)


class TestProject:
    def test_optical_axis_hits_principal_point(self):
        cam = make_cam()
        u, v = cam.project((0.0, 0.0, 1.0))
        assert u == pytest.approx(cam.c_x)
        assert v == pytest.approx(cam.c_y)

    def test_unit_tangent_offset(self):
        cam = CameraModel(f_x=100.0, f_y=100.0, c_x=80.0, c_y=50.0,
                          width=200, height=100)
        u, v = cam.project((1.0, 0.0, 1.0))
        assert u == pytest.approx(180.0)

    def test_hand_evaluated_projection(self):
        # u = 120 * 0.4/2 + 80 = 104, v = 120 * (-0.2)/2 + 175 = 163,
        # worked out from the pinhole formulas by hand.
        cam = make_cam()
        u, v = cam.project((0.4, -0.2, 2.0))
        assert u == pytest.approx(104.0, abs=1e-12)
        assert v == pytest.approx(163.0, abs=1e-12)

    def test_behind_camera_is_out_of_view(self):
        cam = make_cam()
        assert cam.project((0.0, 0.0, -1.0)) is None
        assert cam.project((0.2, 0.1, 0.0)) is None

    def test_outside_rectangle_is_out_of_view(self):
        cam = make_cam()
        assert cam.project((10.0, 0.0, 1.0)) is None

    def test_project_raw_gives_coords_out_of_view(self):
        cam = make_cam()
        u, v, ok = cam.project_raw((10.0, 0.0, 1.0))
        assert not ok
        assert u == pytest.approx(120.0 * 10.0 + 80.0)


class TestUndistort:
    def test_center_is_fixed_point(self):
        cam = make_cam(k_fish=0.7)
        u, v = cam.undistort_pixel((cam.c_x, cam.c_y))
        assert (u, v) == pytest.approx((cam.c_x, cam.c_y))

    def test_identity_when_pinhole(self):
        cam = make_cam(k_fish=0.0)
        for px in [(3.0, 7.0), (100.0, 300.0), (80.0, 175.0)]:
            assert cam.undistort_pixel(px) == pytest.approx(px)

    @pytest.mark.parametrize("k", [0.25, 0.5, 1.0])
    def test_roundtrip_nine_point_grid(self, k):
        cam_d = make_cam(k_fish=k)
        cam_i = make_cam(k_fish=0.0)
        for x in (-0.5, 0.0, 0.5):
            for y in (-0.9, 0.0, 0.9):
                p = (x, y, 1.0)
                raw = cam_d.project_raw(p)[:2]
                ideal = cam_i.project_raw(p)[:2]
                got = cam_d.undistort_pixel(raw)
                assert abs(got[0] - ideal[0]) < 1e-6
                assert abs(got[1] - ideal[1]) < 1e-6


class TestBearing:
    def test_principal_point_bearing(self):
        cam = make_cam()
        np.testing.assert_allclose(cam.bearing_from_pixel((cam.c_x, cam.c_y)),
                                   [0.0, 0.0, 1.0])

    def test_45_degree_ray(self):
        cam = make_cam()
        v = cam.bearing_from_pixel((cam.c_x + cam.f_x, cam.c_y))
        np.testing.assert_allclose(v, np.array([1.0, 0.0, 1.0]) / math.sqrt(2),
                                   atol=1e-12)

    def test_projection_roundtrip_any_scale(self):
        cam = make_cam()
        rng = np.random.default_rng(42)
        for _ in range(50):
            px = (rng.uniform(0, cam.width), rng.uniform(0, cam.height))
            b = cam.bearing_from_pixel(px)
            for s in (0.1, 1.0, 17.3):
                u, v, _ = cam.project_raw(b * s)
                assert abs(u - px[0]) < 1e-6
                assert abs(v - px[1]) < 1e-6

    def test_roundtrip_with_fisheye_goes_through_undistort(self):
        cam = make_cam(k_fish=1.0)
        rng = np.random.default_rng(7)
        for _ in range(50):
            p = np.array([rng.uniform(-0.8, 0.8), rng.uniform(-1.0, 1.0), 1.0])
            raw = cam.project_raw(p)
            ideal = cam.undistort_pixel(raw[:2])
            b = cam.bearing_from_pixel(ideal)
            np.testing.assert_allclose(b, p / np.linalg.norm(p), atol=1e-6)

    def test_bearing_grid_matches_pointwise(self):
        cam = CameraModel(f_x=40.0, f_y=40.0, c_x=20.0, c_y=15.0,
                          width=40, height=30, k_fish=1.0)
        grid = cam.bearing_grid()
        assert grid.shape == (30, 40, 3)
        for (u, v) in [(0, 0), (39, 29), (20, 15), (5, 22)]:
            ideal = cam.undistort_pixel((float(u), float(v)))
            np.testing.assert_allclose(grid[v, u], cam.bearing_from_pixel(ideal),
                                       atol=1e-9)


class TestFrames:
    def test_identity_everything(self):
        cam = make_cam(r_cb=np.eye(3))
        att = Attitude()
        v = np.array([0.3, -0.4, math.sqrt(1 - 0.25)])
        np.testing.assert_allclose(bearing_to_earth(v, att, cam), v, atol=1e-12)

    def test_yawed_front_camera(self):
        # Optical axis -> body x; yaw 90 deg sends body x to earth y.
        cam = make_cam()
        att = Attitude(psi=math.pi / 2)
        out = bearing_to_earth(np.array([0.0, 0.0, 1.0]), att, cam)
        np.testing.assert_allclose(out, [0.0, 1.0, 0.0], atol=1e-12)

    def test_norm_preserved(self):
        cam = make_cam()
        rng = np.random.default_rng(3)
        for _ in range(100):
            v = rng.normal(size=3)
            v /= np.linalg.norm(v)
            att = Attitude(phi=rng.uniform(-1.0, 1.0),
                           theta=rng.uniform(-1.0, 1.0),
                           psi=rng.uniform(-3.0, 3.0))
            out = bearing_to_earth(v, att, cam)
            assert abs(np.linalg.norm(out) - 1.0) < 1e-9

    def test_rotations_orthonormal(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            r = (rot_z(rng.uniform(-4, 4)) @ rot_y(rng.uniform(-4, 4))
                 @ rot_x(rng.uniform(-4, 4)))
            assert np.linalg.norm(r.T @ r - np.eye(3)) < 1e-9
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-9)

    def test_front_mount_sends_axes_where_expected(self):
        np.testing.assert_allclose(FRONT_MOUNT @ [0, 0, 1], [1, 0, 0], atol=1e-12)
        np.testing.assert_allclose(FRONT_MOUNT @ [1, 0, 0], [0, 1, 0], atol=1e-12)
        np.testing.assert_allclose(FRONT_MOUNT @ [0, 1, 0], [0, 0, 1], atol=1e-12)
        np.testing.assert_allclose(
            mount_rotation(math.pi / 2, 0.0, math.pi / 2), FRONT_MOUNT, atol=1e-12)


class TestValidation:
    def test_attitude_limits(self):
        with pytest.raises(ValueError):
            Attitude(phi=math.pi)
        with pytest.raises(ValueError):
            Attitude(theta=math.pi / 2)
        assert Attitude(psi=3 * math.pi).psi == pytest.approx(math.pi)

    def test_wrap_angle(self):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(2.5 * math.pi) == pytest.approx(0.5 * math.pi)

    def test_camera_invariants(self):
        with pytest.raises(ValueError):
            make_cam(f_x=-1.0)
        with pytest.raises(ValueError):
            make_cam(c_x=200.0)
        with pytest.raises(ValueError):
            make_cam(k_fish=1.5)
        with pytest.raises(ValueError):
            make_cam(r_cb=np.eye(3) * 2.0)
        # reflections rejected too
        r = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(ValueError):
            make_cam(r_cb=r)

    def test_bearing_ray_unit_norm(self):
        BearingRay(np.zeros(3), np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ValueError):
            BearingRay(np.zeros(3), np.array([0.0, 0.0, 1.1]))
