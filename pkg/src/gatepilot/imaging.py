"""Image buffers, target-color classification, synthetic gate scenes.

The renderer draws square gate frames by per-pixel raycasting against the
gate planes, plus rectangular background clutter, per-bar exposure jitter
and additive pixel noise. It returns exact projected corner labels so a
rendered corpus doubles as detection ground truth. generate_corpus writes
a whole labeled image set to disk (PPM + sidecar labels + manifest).

Gate geometry convention: a gate is a vertical square frame. Its `size`
is the side length of the square through the bar centerlines, and the
labeled corners sit on that square. Bars extend bar_width/2 to either
side, so the painted frame spans size/2 +- bar_width/2 around the center.
Plane coordinates: s1 along the horizontal in-plane axis
h = (-sin(yaw), cos(yaw), 0), s2 along earth +z (down). Viewed from the
approach side (looking along the gate normal (cos(yaw), sin(yaw), 0)),
-h is image-left. Corner storage order: TL, TR, BL, BR.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .camera import Attitude, CameraModel
from .errors import CorpusError

CORNER_NAMES = ("TL", "TR", "BL", "BR")

# Plane-coordinate signs (s1, s2) per corner, order TL, TR, BL, BR.
_CORNER_SIGNS = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])


@dataclass
class Image:
    """8-bit 3-channel raster, pixels row-major with shape (height, width, 3)."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3")

    @classmethod
    def solid(cls, width, height, rgb):
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:] = np.asarray(rgb, dtype=np.uint8)
        return cls(width, height, px)


@dataclass
class ColorBounds:
    """Inclusive per-channel bounds in RGB or YCbCr space."""

    lo: tuple
    hi: tuple
    space: str = "ycbcr"

    def __post_init__(self):
        self.lo = tuple(int(v) for v in self.lo)
        self.hi = tuple(int(v) for v in self.hi)
        if len(self.lo) != 3 or len(self.hi) != 3:
            raise ValueError("bounds must have three channels")
        for a, b in zip(self.lo, self.hi):
            if not (0 <= a <= b <= 255):
                raise ValueError(f"invalid channel bounds ({a}, {b})")
        if self.space not in ("rgb", "ycbcr"):
            raise ValueError(f"unknown channel space {self.space!r}")

    @property
    def space_code(self):
        return _kernels.SPACE_YCBCR if self.space == "ycbcr" else _kernels.SPACE_RGB

    def midpoint(self):
        return tuple((a + b) // 2 for a, b in zip(self.lo, self.hi))


# Default detection band for the orange gate color (255, 128, 0), which
# sits near YCbCr (151, 43, 202). Wide on luma so exposure jitter stays in
# band, tight on Cr so strong overexposure (clipped toward yellow) falls out.
ORANGE_BOUNDS = ColorBounds(lo=(40, 0, 160), hi=(235, 100, 255), space="ycbcr")


@dataclass
class GateSpec:
    """One square gate: center (m, earth NED), yaw (rad), centerline side (m)."""

    center: np.ndarray
    yaw: float = 0.0
    size: float = 1.0
    bar_width: float = 0.1
    rgb: tuple = (255, 128, 0)

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if self.center.shape != (3,):
            raise ValueError("gate center must be a 3-vector")
        if not self.size > 0:
            raise ValueError(f"gate size must be positive: {self.size}")
        if not 0 < self.bar_width < self.size / 2:
            raise ValueError(
                f"bar width {self.bar_width} must be in (0, size/2)")

    def h_axis(self):
        return np.array([-math.sin(self.yaw), math.cos(self.yaw), 0.0])

    def normal(self):
        return np.array([math.cos(self.yaw), math.sin(self.yaw), 0.0])

    def corners(self):
        """Earth-frame 3-D corner points, order TL, TR, BL, BR."""
        h = self.h_axis()
        down = np.array([0.0, 0.0, 1.0])
        half = self.size / 2.0
        return np.array([self.center + half * (s1 * h + s2 * down)
                         for s1, s2 in _CORNER_SIGNS])


@dataclass
class SceneSpec:
    """A renderable scene: gates, clutter model, exposure model, noise.

    clutter_target_rgb is the color that "near target" clutter rectangles
    jitter around; when None the first gate's color is used (or a fully
    random color if the scene has no gates).
    """

    gates: list = field(default_factory=list)
    background_rgb: tuple = (118, 128, 138)
    clutter_count: int = 0
    clutter_size_range: tuple = (4, 30)
    clutter_target_prob: float = 0.0
    clutter_target_rgb: tuple = None
    exposure_range: tuple = (1.0, 1.0)
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.clutter_count < 0:
            raise ValueError("clutter_count must be >= 0")
        if not 0.0 <= self.clutter_target_prob <= 1.0:
            raise ValueError("clutter_target_prob must be in [0, 1]")
        lo, hi = self.exposure_range
        if not 0.0 < lo <= hi:
            raise ValueError(f"bad exposure range ({lo}, {hi})")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass
class GateLabel:
    """Exact projected corners of one gate, storage order TL, TR, BL, BR.

    corners_px may contain nan for corners behind the camera; `visible`
    marks corners that project in front of the camera and inside the
    image rectangle.
    """

    gate_id: int
    corners_px: np.ndarray
    visible: np.ndarray


def classify_pixel(img: Image, x, y, bounds: ColorBounds) -> bool:
    """True iff pixel (x, y) falls inside the color band.

    Out-of-image probes return False; the snake search pokes neighbors
    without bounds checking of its own.
    """
    if not (0 <= x < img.width and 0 <= y < img.height):
        return False
    px = img.pixels[int(y), int(x)]
    if bounds.space == "ycbcr":
        px = _kernels.rgb_to_ycbcr(px.reshape(1, 1, 3))[0, 0]
    return all(lo <= int(c) <= hi
               for c, lo, hi in zip(px, bounds.lo, bounds.hi))


def target_mask(img: Image, bounds: ColorBounds) -> np.ndarray:
    """Whole-image binary mask (u8 of 0/1) via the kernel backend."""
    return _kernels.color_mask(img.pixels, bounds.lo, bounds.hi,
                               bounds.space_code)


def _gate_geometry(gates):
    """Pack gate planes for the raycast kernel: (G, 11) float rows."""
    geom = np.zeros((len(gates), 11))
    for i, gs in enumerate(gates):
        geom[i, 0:3] = gs.center
        geom[i, 3:6] = gs.h_axis()
        geom[i, 6:9] = gs.normal()
        geom[i, 9] = gs.size / 2.0 + gs.bar_width / 2.0
        geom[i, 10] = gs.size / 2.0 - gs.bar_width / 2.0
    return geom


def render_scene(scene: SceneSpec, pose, cam: CameraModel, seed):
    """Render the scene from (position, attitude); returns (Image, labels).

    Deterministic for a given (scene, pose, cam, seed). Labels hold the
    exact projections of the centerline corners for every gate with at
    least one corner in view.
    """
    position, att = pose
    position = np.asarray(position, dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    h, w = cam.height, cam.width

    img = np.empty((h, w, 3), dtype=float)
    img[:] = np.asarray(scene.background_rgb, dtype=float)

    # Background clutter: axis-aligned rectangles, some near the target
    # color so the false-positive path gets exercised.
    for _ in range(scene.clutter_count):
        x0 = int(rng.integers(0, w))
        y0 = int(rng.integers(0, h))
        cw = int(rng.integers(scene.clutter_size_range[0],
                              scene.clutter_size_range[1] + 1))
        ch = int(rng.integers(scene.clutter_size_range[0],
                              scene.clutter_size_range[1] + 1))
        near_target = rng.random() < scene.clutter_target_prob
        base = scene.clutter_target_rgb
        if base is None and scene.gates:
            base = scene.gates[0].rgb
        if near_target and base is not None:
            color = np.asarray(base, dtype=float) + rng.normal(0.0, 12.0, size=3)
        else:
            color = rng.uniform(0.0, 255.0, size=3)
        img[y0:y0 + ch, x0:x0 + cw] = np.clip(color, 0.0, 255.0)

    # Gates: raycast, opaque over clutter, nearest gate wins.
    if scene.gates:
        mults = rng.uniform(scene.exposure_range[0], scene.exposure_range[1],
                            size=(len(scene.gates), 4))
        colors = np.empty((len(scene.gates), 4, 3))
        for i, gs in enumerate(scene.gates):
            colors[i] = np.asarray(gs.rgb, dtype=float) * mults[i][:, None]
        geom = _gate_geometry(scene.gates)
        r_ce = att.r_be() @ cam.r_cb
        dirs = np.ascontiguousarray(cam.bearing_grid() @ r_ce.T)
        _kernels.raycast_gates(dirs, position, geom, colors, img)

    if scene.noise_sigma > 0:
        img = img + rng.normal(0.0, scene.noise_sigma, size=img.shape)

    out = Image(w, h, np.clip(np.rint(img), 0, 255).astype(np.uint8))

    labels = []
    r_ec = (att.r_be() @ cam.r_cb).T
    for gid, gs in enumerate(scene.gates):
        corners3d = gs.corners()
        px = np.full((4, 2), np.nan)
        vis = np.zeros(4, dtype=bool)
        for k in range(4):
            p_cam = r_ec @ (corners3d[k] - position)
            u, v, ok = cam.project_raw(p_cam)
            px[k] = (u, v)
            vis[k] = ok
        if vis.any():
            labels.append(GateLabel(gid, px, vis))
    return out, labels


# -- corpus file I/O ----------------------------------------------------

def write_ppm(img: Image, path):
    """Binary P6 portable pixel map."""
    with open(path, "wb") as f:
        f.write(f"P6\n{img.width} {img.height}\n255\n".encode("ascii"))
        f.write(img.pixels.tobytes())


def read_ppm(path) -> Image:
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P6"):
        raise CorpusError(f"{path}: not a P6 pixel map")
    # Header: magic, width, height, maxval, single whitespace, then raster.
    fields = []
    i = 2
    while len(fields) < 3:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        fields.append(int(data[i:j]))
        i = j
    i += 1  # the single whitespace byte after maxval
    w, h, maxval = fields
    if maxval != 255:
        raise CorpusError(f"{path}: unsupported maxval {maxval}")
    raster = data[i:i + w * h * 3]
    if len(raster) != w * h * 3:
        raise CorpusError(f"{path}: truncated raster")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3)
    return Image(w, h, px.copy())


def write_labels(labels, path):
    """Sidecar label file: lines of `gate_id corner_idx u v visible`."""
    with open(path, "w") as f:
        for lab in labels:
            for k in range(4):
                u, v = lab.corners_px[k]
                f.write("%d %d %.10g %.10g %d\n"
                        % (lab.gate_id, k, u, v, int(lab.visible[k])))


def read_labels(path):
    by_gate = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise CorpusError(f"{path}: bad label line {line!r}")
            gid, k = int(parts[0]), int(parts[1])
            u, v = float(parts[2]), float(parts[3])
            vis = bool(int(parts[4]))
            entry = by_gate.setdefault(
                gid, (np.full((4, 2), np.nan), np.zeros(4, dtype=bool)))
            entry[0][k] = (u, v)
            entry[1][k] = vis
    return [GateLabel(gid, px, vis)
            for gid, (px, vis) in sorted(by_gate.items())]


# -- corpus generation --------------------------------------------------

@dataclass
class CorpusItem:
    """One loaded corpus entry: image, its labels, and manifest metadata."""

    image: Image
    labels: list
    meta: dict


def _sample_gate_pose(rng, cam, size, bar_width, distance_range, margin=6):
    """Draw a gate spec fully visible from the origin; retry until it fits."""
    for _ in range(40):
        d = rng.uniform(distance_range[0], distance_range[1])
        y_off = rng.uniform(-0.5, 0.5)
        z_off = rng.uniform(-0.25, 0.25)
        yaw = rng.uniform(-0.35, 0.35)
        att = Attitude(phi=rng.uniform(-0.05, 0.05),
                       theta=rng.uniform(-0.05, 0.05),
                       psi=rng.uniform(-0.08, 0.08))
        gate = GateSpec(center=(d, y_off, z_off), yaw=yaw, size=size,
                        bar_width=bar_width)
        r_ec = (att.r_be() @ cam.r_cb).T
        ok = True
        for corner in gate.corners():
            u, v, in_view = cam.project_raw(r_ec @ corner)
            if not (in_view and margin <= u < cam.width - margin
                    and margin <= v < cam.height - margin):
                ok = False
                break
        if ok:
            return gate, att
    # Last resort: a centered gate at mid range is always in view.
    d = 0.5 * (distance_range[0] + distance_range[1])
    return GateSpec(center=(d, 0.0, 0.0), size=size,
                    bar_width=bar_width), Attitude()


def generate_corpus(out_dir, n_images, cam, *, seed, gate_size=1.0,
                    bar_width=0.1, distance_range=(1.0, 5.5),
                    gate_free_frac=1.0 / 6.0, clutter_count=10,
                    clutter_target_prob=0.25, clutter_size_range=(4, 20),
                    noise_sigma=6.0, exposure_range=(0.85, 1.35),
                    gate_rgb=(255, 128, 0)):
    """Render a labeled detection corpus to out_dir; returns the manifest.

    Files: img_NNNN.ppm, img_NNNN.labels, manifest.json. Gate-free images
    (clutter only) are mixed in at gate_free_frac. Deterministic per seed.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for i in range(n_images):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        gate_free = rng.random() < gate_free_frac
        if gate_free:
            gates = []
            att = Attitude(psi=rng.uniform(-0.08, 0.08))
            distance = None
        else:
            gate, att = _sample_gate_pose(rng, cam, gate_size, bar_width,
                                          distance_range)
            gate.rgb = gate_rgb
            gates = [gate]
            distance = float(np.linalg.norm(gate.center))
        scene = SceneSpec(gates=gates,
                          clutter_count=clutter_count,
                          clutter_size_range=clutter_size_range,
                          clutter_target_prob=clutter_target_prob,
                          clutter_target_rgb=gate_rgb,
                          exposure_range=exposure_range,
                          noise_sigma=noise_sigma)
        render_seed = int(rng.integers(0, 2 ** 63))
        img, labels = render_scene(scene, (np.zeros(3), att), cam, render_seed)
        stem = f"img_{i:04d}"
        write_ppm(img, os.path.join(out_dir, stem + ".ppm"))
        write_labels(labels, os.path.join(out_dir, stem + ".labels"))
        entries.append({
            "ppm": stem + ".ppm",
            "labels": stem + ".labels",
            "distance": distance,
            "n_gates": len(gates),
            "rpy": [att.phi, att.theta, att.psi],
        })
    manifest = {"seed": seed, "width": cam.width, "height": cam.height,
                "images": entries}
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")
    return manifest


def load_corpus(corpus_dir):
    """Load a generated corpus; raises CorpusError on missing pieces."""
    man_path = os.path.join(corpus_dir, "manifest.json")
    if not os.path.exists(man_path):
        raise CorpusError(f"missing manifest: {man_path}")
    with open(man_path) as f:
        manifest = json.load(f)
    items = []
    for entry in manifest["images"]:
        ppm = os.path.join(corpus_dir, entry["ppm"])
        lab = os.path.join(corpus_dir, entry["labels"])
        if not os.path.exists(ppm):
            raise CorpusError(f"missing image file: {ppm}")
        if not os.path.exists(lab):
            raise CorpusError(f"missing label sidecar: {lab}")
        items.append(CorpusItem(read_ppm(ppm), read_labels(lab), dict(entry)))
    return items
