import math

import numpy as np
import pytest

from gatepilot.control import (
    ArcState,
    AttitudeCmd,
    FeasibilityResult,
    G,
    altitude_hold_thrust,
    arc_command,
    feasibility_region,
    pd_roll,
    planar_step,
    straight_command,
    write_boundary_csv,
    write_feasibility_csv,
)
from gatepilot.errors import NumericalError


class TestStraightCommand:
    def test_centered_is_trim(self):
        cmd = straight_command(0.0, 0.0, k_p=0.3, k_d=0.2,
                               theta_0=math.radians(-5))
        assert cmd.phi_c == 0.0
        assert cmd.theta_c == math.radians(-5)
        assert cmd.psi_c == 0.0

    def test_formula(self):
        cmd = straight_command(1.0, 0.0, k_p=0.3, k_d=0.2, theta_0=0.0)
        assert cmd.phi_c == pytest.approx(-0.3)

    def test_clamp(self):
        cmd = straight_command(10.0, 0.0, k_p=1.0, k_d=0.0, theta_0=0.0)
        assert cmd.phi_c == pytest.approx(-math.radians(30))

    def test_odd_symmetry(self):
        a = straight_command(0.4, -0.2, k_p=0.3, k_d=0.2, theta_0=0.0)
        b = straight_command(-0.4, 0.2, k_p=0.3, k_d=0.2, theta_0=0.0)
        assert a.phi_c == pytest.approx(-b.phi_c)


class TestArcCommand:
    def test_rest_case(self):
        cmd = arc_command(ArcState(0.0, 0.0, 0.0, r=1.5), theta_0=0.0)
        assert cmd.phi_c == 0.0
        assert cmd.thrust_c == pytest.approx(-G)
        assert cmd.psi_rate_c == 0.0

    def test_coordinated_turn_identity(self):
        v, r = 1.5, 1.5
        cmd = arc_command(ArcState(v, 0.0, 0.0, r=r), theta_0=0.0)
        assert math.tan(cmd.phi_c) == pytest.approx(v * v / (r * G),
                                                    abs=1e-9)
        assert cmd.phi_c == pytest.approx(math.radians(8.7), abs=2e-3)
        assert cmd.psi_rate_c == pytest.approx(1.0)

    def test_direction_flips_signs(self):
        a = arc_command(ArcState(2.0, 0.0, 0.0, r=1.5), 0.0, direction=1)
        b = arc_command(ArcState(2.0, 0.0, 0.0, r=1.5), 0.0, direction=-1)
        assert a.phi_c == pytest.approx(-b.phi_c)
        assert a.psi_rate_c == pytest.approx(-b.psi_rate_c)

    def test_thrust_holds_altitude(self):
        # vertical force balance in F: g + cos(theta)cos(phi)*T + a_z = 0
        arc = ArcState(2.0, 0.3, -0.4, r=1.5)
        cmd = arc_command(arc, theta_0=math.radians(-5))
        resid = G + math.cos(cmd.theta_c) * math.cos(cmd.phi_c) \
            * cmd.thrust_c + arc.a_z_f
        assert abs(resid) < 1e-12

    def test_free_fall_error(self):
        with pytest.raises(NumericalError):
            arc_command(ArcState(1.0, 0.0, -G, r=1.5), 0.0)
        with pytest.raises(NumericalError):
            altitude_hold_thrust(math.pi / 2 - 1e-9, 0.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            ArcState(1.0, 0.0, 0.0, r=0.0)
        with pytest.raises(ValueError):
            arc_command(ArcState(1.0, 0.0, 0.0, r=1.5), 0.0, direction=2)
        with pytest.raises(ValueError):
            AttitudeCmd(phi_c=1.0, theta_c=0.0, thrust_c=-G)


class TestPlanarStep:
    def test_level_stays(self):
        s = planar_step((0.0, 0.5, 0.0), 0.0, 1.5, -1.0, 0.01)
        assert s == (pytest.approx(0.015), 0.5, 0.0)

    def test_drag_decay(self):
        s = planar_step((0.0, 0.0, 1.0), 0.0, 1.5, -0.5, 0.01)
        assert s[2] == pytest.approx(1.0 - 0.5 * 0.01)

    def test_equilibrium_sideways_speed(self):
        phi, k_y = 0.2, -1.0
        s = (0.0, 0.0, 0.0)
        for _ in range(3000):
            s = planar_step(s, phi, 1.5, k_y, 0.01)
        v_star = -G * math.tan(phi) / (k_y * math.cos(phi) ** 2)
        assert s[2] == pytest.approx(v_star, rel=1e-6)

    def test_phi_domain(self):
        with pytest.raises(ValueError):
            planar_step((0, 0, 0), math.pi / 2, 1.0, -1.0, 0.01)


@pytest.fixture(scope="module")
def regions():
    return (feasibility_region(1.5, grid_n=40),
            feasibility_region(2.0, grid_n=40))


class TestFeasibility:
    def test_aligned_always_feasible(self, regions):
        f, _ = regions
        i = np.argmin(np.abs(f.y0))
        assert f.feasible[i].all()

    def test_faster_is_subset(self, regions):
        slow, fast = regions
        assert not np.any(fast.feasible & ~slow.feasible)
        assert fast.feasible.sum() < slow.feasible.sum()

    def test_margin_point_feasible(self, regions):
        f, _ = regions
        i = np.argmin(np.abs(f.y0 - 0.8))
        j = np.argmin(np.abs(f.x0 - (-2.0)))
        assert f.feasible[i, j]

    def test_y_symmetry(self, regions):
        f, _ = regions
        assert np.array_equal(f.feasible, f.feasible[::-1, :])

    def test_boundary_matches_grid(self, regions):
        f, _ = regions
        for i in range(f.y0.size):
            idx = np.nonzero(f.feasible[i])[0]
            if idx.size:
                assert f.boundary[i] == f.x0[idx.max()]
            else:
                assert np.isnan(f.boundary[i])

    def test_validation(self):
        with pytest.raises(ValueError):
            feasibility_region(1.5, grid_n=5)
        with pytest.raises(ValueError):
            feasibility_region(0.0)

    def test_csv_writers(self, tmp_path, regions):
        f, _ = regions
        gp = tmp_path / "grid.csv"
        bp = tmp_path / "boundary.csv"
        write_feasibility_csv(gp, f)
        write_boundary_csv(bp, f)
        lines = gp.read_text().splitlines()
        assert lines[0] == "x0,y0,feasible"
        assert len(lines) == 1 + f.feasible.size
        blines = bp.read_text().splitlines()
        assert blines[0] == "y0,x_boundary"
        assert len(blines) == 1 + f.y0.size
        # byte determinism
        gp2 = tmp_path / "grid2.csv"
        write_feasibility_csv(gp2, feasibility_region(1.5, grid_n=40))
        assert gp.read_bytes() == gp2.read_bytes()
