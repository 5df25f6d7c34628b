"""Kernel behavior plus native-vs-python backend equivalence.

Every public kernel gets a functional test against the python reference
and, when the compiled extension is importable, a bit-identity check on
randomized inputs.
"""

import numpy as np
import pytest

from gatepilot._kernels import pyfallback as pyk

try:
    from gatepilot._kernels import _native as nat
    HAVE_NATIVE = True
except ImportError:
    nat = None
    HAVE_NATIVE = False

BACKENDS = [pyk] + ([nat] if HAVE_NATIVE else [])


def backend_id(mod):
    return "native" if mod is nat else "python"


@pytest.fixture(params=BACKENDS, ids=backend_id)
def kern(request):
    return request.param


def random_mask(rng, h=40, w=60, p=0.3):
    return (rng.random((h, w)) < p).astype(np.uint8)


class TestColor:
    def test_ycbcr_known_values(self, kern):
        # Pure colors, worked out from the BT.601 full-range formulas:
        # white -> (255,128,128); black -> (0,128,128);
        # red (255,0,0) -> Y=76.245->76, Cb=84.972->85, Cr=255.5->clamp 255.
        img = np.array([[[255, 255, 255], [0, 0, 0], [255, 0, 0]]], dtype=np.uint8)
        out = kern.rgb_to_ycbcr(img)
        np.testing.assert_array_equal(out[0, 0], [255, 128, 128])
        np.testing.assert_array_equal(out[0, 1], [0, 128, 128])
        np.testing.assert_array_equal(out[0, 2], [76, 85, 255])

    def test_gray_is_neutral_chroma(self, kern):
        img = np.full((3, 3, 3), 77, dtype=np.uint8)
        out = kern.rgb_to_ycbcr(img)
        assert (out[..., 1] == 128).all()
        assert (out[..., 2] == 128).all()
        assert (out[..., 0] == 77).all()

    def test_color_mask_rgb_space(self, kern):
        img = np.zeros((2, 2, 3), dtype=np.uint8)
        img[0, 0] = (200, 100, 30)
        img[0, 1] = (200, 100, 120)  # B channel out
        lo, hi = (150, 50, 0), (255, 150, 60)
        m = kern.color_mask(img, lo, hi, pyk.SPACE_RGB)
        assert m[0, 0] == 1
        assert m[0, 1] == 0
        assert m[1, 0] == 0

    def test_color_mask_bounds_inclusive(self, kern):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        img[0, 0] = (10, 20, 30)
        m = kern.color_mask(img, (10, 20, 30), (10, 20, 30), pyk.SPACE_RGB)
        assert m[0, 0] == 1


class TestWalks:
    def test_vertical_straight_bar(self, kern):
        mask = np.zeros((20, 10), dtype=np.uint8)
        mask[3:15, 4] = 1
        x1, y1, x2, y2 = kern.search_vertical(mask, 4, 8)
        assert (x1, y1) == (4, 3)
        assert (x2, y2) == (4, 14)

    def test_vertical_diagonal_continuation(self, kern):
        # Bar drifts one column left going up; the walk should follow.
        mask = np.zeros((10, 10), dtype=np.uint8)
        for i in range(6):
            mask[8 - i, 5 - i] = 1
        x1, y1, x2, y2 = kern.search_vertical(mask, 5, 8)
        assert (x1, y1) == (0, 3)
        assert (x2, y2) == (5, 8)

    def test_vertical_prefers_straight_over_diagonal(self, kern):
        mask = np.zeros((6, 6), dtype=np.uint8)
        mask[3, 2] = 1
        mask[2, 2] = 1  # straight up
        mask[2, 1] = 1  # also a diagonal candidate
        x1, y1, _, _ = kern.search_vertical(mask, 2, 3)
        assert (x1, y1) == (2, 2)

    def test_horizontal_straight_bar(self, kern):
        mask = np.zeros((10, 20), dtype=np.uint8)
        mask[5, 2:17] = 1
        xl, yl, xr, yr = kern.search_horizontal(mask, 8, 5)
        assert (xl, yl) == (2, 5)
        assert (xr, yr) == (16, 5)

    def test_walks_stop_at_image_edge(self, kern):
        mask = np.ones((5, 5), dtype=np.uint8)
        x1, y1, x2, y2 = kern.search_vertical(mask, 2, 2)
        assert y1 == 0 and y2 == 4
        xl, _, xr, _ = kern.search_horizontal(mask, 2, 2)
        assert xl == 0 and xr == 4


class TestPatchCentroid:
    def test_centroid_of_filled_patch(self, kern):
        mask = np.zeros((11, 11), dtype=np.uint8)
        mask[4:7, 4:7] = 1
        fx, fy, n = kern.patch_centroid(mask, 5, 5, 2)
        assert n == 9
        assert fx == pytest.approx(5.0)
        assert fy == pytest.approx(5.0)

    def test_centroid_pulls_toward_mass(self, kern):
        mask = np.zeros((11, 11), dtype=np.uint8)
        mask[5, 5] = 1
        mask[5, 7] = 1
        fx, fy, n = kern.patch_centroid(mask, 5, 5, 2)
        assert n == 2
        assert fx == pytest.approx(6.0)
        assert fy == pytest.approx(5.0)

    def test_empty_patch_echoes_center(self, kern):
        mask = np.zeros((11, 11), dtype=np.uint8)
        fx, fy, n = kern.patch_centroid(mask, 3, 4, 2)
        assert (fx, fy, n) == (3.0, 4.0, 0)

    def test_patch_clipped_at_border(self, kern):
        mask = np.zeros((8, 8), dtype=np.uint8)
        mask[0, 0] = 1
        fx, fy, n = kern.patch_centroid(mask, 0, 0, 3)
        assert n == 1
        assert (fx, fy) == (0.0, 0.0)


class TestEdgeFitness:
    def test_perfect_square_all_target(self, kern):
        mask = np.zeros((20, 20), dtype=np.uint8)
        mask[5, 5:16] = 1
        mask[15, 5:16] = 1
        mask[5:16, 5] = 1
        mask[5:16, 15] = 1
        quad = np.array([[5, 5], [15, 5], [15, 15], [5, 15]])
        n_t, n_n = kern.edge_fitness(mask, quad)
        assert n_n == 40  # 4 edges x 10 points each (end excluded)
        assert n_t == n_n

    def test_half_missing_edge(self, kern):
        mask = np.zeros((20, 20), dtype=np.uint8)
        mask[5, 5:16] = 1
        mask[15, 5:16] = 1
        mask[5:16, 5] = 1  # right edge absent
        quad = np.array([[5, 5], [15, 5], [15, 15], [5, 15]])
        n_t, n_n = kern.edge_fitness(mask, quad)
        assert n_n == 40
        # right edge contributes 10 samples, one of which ((15,5)) is on
        # the top edge already drawn
        assert n_t == 40 - 9

    def test_degenerate_quad_counts_nothing(self, kern):
        mask = np.ones((5, 5), dtype=np.uint8)
        quad = np.array([[2, 2]] * 4)
        n_t, n_n = kern.edge_fitness(mask, quad)
        assert (n_t, n_n) == (0, 0)


class TestColumnCounts:
    def test_counts(self, kern):
        mask = np.zeros((6, 4), dtype=np.uint8)
        mask[:, 1] = 1
        mask[0:3, 3] = 1
        np.testing.assert_array_equal(kern.column_counts(mask), [0, 6, 0, 3])


class TestRaycast:
    def make_inputs(self, rng, n_gates=2, h=24, w=32):
        # Random-ish but well-conditioned scene geometry.
        dirs = rng.normal(size=(h, w, 3))
        dirs[..., 0] = np.abs(dirs[..., 0]) + 0.5  # bias rays forward
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        geom = np.zeros((n_gates, 11))
        colors = rng.uniform(0, 255, size=(n_gates, 4, 3))
        for g in range(n_gates):
            yaw = rng.uniform(-0.4, 0.4)
            geom[g, 0:3] = (2.0 + 1.5 * g, rng.uniform(-0.3, 0.3),
                            rng.uniform(-0.2, 0.2))
            geom[g, 3:6] = (-np.sin(yaw), np.cos(yaw), 0.0)
            geom[g, 6:9] = (np.cos(yaw), np.sin(yaw), 0.0)
            geom[g, 9] = 0.5
            geom[g, 10] = 0.35
        origin = np.zeros(3)
        return dirs, origin, geom, colors

    def test_single_gate_paints_frame(self, kern):
        h, w = 40, 40
        dirs = np.zeros((h, w, 3))
        # Simple pinhole-ish grid looking along +x.
        for v in range(h):
            for u in range(w):
                d = np.array([1.0, (u - w / 2) / 40.0, (v - h / 2) / 40.0])
                dirs[v, u] = d / np.linalg.norm(d)
        geom = np.array([[2.0, 0.0, 0.0,
                          0.0, 1.0, 0.0,
                          1.0, 0.0, 0.0,
                          0.5, 0.35]])
        colors = np.full((1, 4, 3), 200.0)
        img = np.zeros((h, w, 3))
        kern.raycast_gates(dirs, np.zeros(3), geom, colors, img)
        painted = (img[..., 0] > 0).sum()
        assert painted > 0
        # Center pixel looks through the hole.
        assert img[h // 2, w // 2, 0] == 0.0
        # Corners of the view look past the frame entirely.
        assert img[0, 0, 0] == 0.0

    def test_nearer_gate_occludes(self, kern):
        dirs = np.array([[[1.0, 0.0, 0.0]]])
        # Two gates on the ray, both with bars crossing it (half_i = 0 so
        # the plane is solid).
        geom = np.array([
            [2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.0],
            [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.0],
        ])
        colors = np.zeros((2, 4, 3))
        colors[0] = 10.0
        colors[1] = 99.0
        img = np.zeros((1, 1, 3))
        kern.raycast_gates(dirs, np.zeros(3), geom, colors, img)
        assert img[0, 0, 0] == 99.0

    def test_near_clip(self, kern):
        dirs = np.array([[[1.0, 0.0, 0.0]]])
        geom = np.array([[0.01, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0,
                          0.5, 0.0]])
        colors = np.full((1, 4, 3), 50.0)
        img = np.zeros((1, 1, 3))
        kern.raycast_gates(dirs, np.zeros(3), geom, colors, img)
        assert img[0, 0, 0] == 0.0


@pytest.mark.skipif(not HAVE_NATIVE, reason="compiled kernels not built")
class TestBackendIdentity:
    """The two backends must agree bit for bit."""

    def test_ycbcr_all_boundary_and_random(self):
        rng = np.random.default_rng(101)
        img = rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
        img[0, 0] = (255, 255, 255)
        img[0, 1] = (0, 0, 0)
        img[0, 2] = (255, 0, 0)
        img[0, 3] = (0, 0, 255)
        img[0, 4] = (0, 255, 0)
        np.testing.assert_array_equal(pyk.rgb_to_ycbcr(img), nat.rgb_to_ycbcr(img))

    def test_color_mask_identity(self):
        rng = np.random.default_rng(102)
        for space in (pyk.SPACE_RGB, pyk.SPACE_YCBCR):
            img = rng.integers(0, 256, size=(48, 80, 3), dtype=np.uint8)
            lo = tuple(rng.integers(0, 128, size=3).tolist())
            hi = tuple(rng.integers(128, 256, size=3).tolist())
            np.testing.assert_array_equal(
                pyk.color_mask(img, lo, hi, space),
                nat.color_mask(img, lo, hi, space))

    def test_walk_identity(self):
        rng = np.random.default_rng(103)
        for _ in range(30):
            mask = random_mask(rng, 30, 30, p=0.55)
            ys, xs = np.nonzero(mask)
            if len(xs) == 0:
                continue
            i = rng.integers(len(xs))
            x, y = int(xs[i]), int(ys[i])
            assert (pyk.search_vertical(mask, x, y)
                    == nat.search_vertical(mask, x, y))
            assert (pyk.search_horizontal(mask, x, y)
                    == nat.search_horizontal(mask, x, y))

    def test_patch_centroid_identity(self):
        rng = np.random.default_rng(104)
        for _ in range(30):
            mask = random_mask(rng, 25, 25, p=0.4)
            cx, cy = int(rng.integers(25)), int(rng.integers(25))
            half = int(rng.integers(1, 6))
            a = pyk.patch_centroid(mask, cx, cy, half)
            b = nat.patch_centroid(mask, cx, cy, half)
            assert a == b  # exact: same integer sums, same division

    def test_edge_fitness_identity(self):
        rng = np.random.default_rng(105)
        for _ in range(30):
            mask = random_mask(rng, 40, 40, p=0.5)
            quad = rng.integers(0, 40, size=(4, 2))
            assert pyk.edge_fitness(mask, quad) == nat.edge_fitness(mask, quad)

    def test_column_counts_identity(self):
        rng = np.random.default_rng(106)
        mask = random_mask(rng, 33, 57)
        np.testing.assert_array_equal(pyk.column_counts(mask),
                                      nat.column_counts(mask))

    def test_raycast_identity_bitwise(self):
        rng = np.random.default_rng(107)
        t = TestRaycast()
        for trial in range(5):
            dirs, origin, geom, colors = t.make_inputs(rng, n_gates=3)
            img_a = np.full((dirs.shape[0], dirs.shape[1], 3), 7.5)
            img_b = img_a.copy()
            pyk.raycast_gates(dirs, origin, geom, colors, img_a)
            nat.raycast_gates(dirs, origin, geom, colors, img_b)
            np.testing.assert_array_equal(img_a, img_b)
