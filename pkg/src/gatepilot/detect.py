"""Snake gate detection and its evaluation harness.

The detector probes random pixels; a hit on the target color starts a
vertical walk (straight first, then the left diagonal, then the right
diagonal), which must span more than the minimum length sigma_L. The two
vertical endpoints then each start a horizontal walk; at least one far
endpoint must also clear sigma_L. The four raw points are wrapped in a
minimal square, corners are pulled onto the bar mass by patch centroids,
and the candidate survives iff the color fitness along its refined
perimeter exceeds sigma_cf. Overlapping candidates on one gate are merged
keeping the highest fitness.

Corner storage order everywhere: TL, TR, BL, BR (matching imaging labels).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .imaging import ColorBounds, Image, load_corpus, target_mask


@dataclass
class DetectorParams:
    """Detection thresholds and sampling policy.

    sigma_L: minimum length threshold in px. sigma_cf: color fitness
    threshold in [0, 1]. max_samples: random probes per frame. seed:
    probe RNG seed. refine_patch_frac: corner patch side as a fraction of
    the minimal-square side (patch side clamped to >= 5 px).
    merge_radius_frac: duplicate merge radius as a fraction of image
    width. best_only keeps only the single highest-fitness detection,
    mirroring the race-mode behavior of trusting one gate.
    """

    sigma_L: float = 25.0
    sigma_cf: float = 0.5
    max_samples: int = 512
    seed: int = 0
    refine_patch_frac: float = 0.2
    merge_radius_frac: float = 0.1
    best_only: bool = False

    def __post_init__(self):
        errs = []
        if self.sigma_L < 1:
            errs.append(f"sigma_L must be >= 1: {self.sigma_L}")
        if not 0.0 <= self.sigma_cf <= 1.0:
            errs.append(f"sigma_cf must be in [0, 1]: {self.sigma_cf}")
        if self.max_samples < 1:
            errs.append(f"max_samples must be >= 1: {self.max_samples}")
        if errs:
            raise ValueError("; ".join(errs))


@dataclass
class GateDetection:
    """One accepted gate candidate.

    raw_points: the snake endpoints P1 (up), P2 (down), P3, P4
    (far horizontal endpoints from P1/P2). square: minimal square
    corners, order TL, TR, BL, BR. corners: refined corners in the same
    order. cf: color fitness of the refined polygon.
    """

    raw_points: np.ndarray
    square: np.ndarray
    corners: np.ndarray
    cf: float

    def __post_init__(self):
        self.raw_points = np.asarray(self.raw_points, dtype=float)
        self.square = np.asarray(self.square, dtype=float)
        self.corners = np.asarray(self.corners, dtype=float)
        if not 0.0 <= self.cf <= 1.0:
            raise ValueError(f"cf out of range: {self.cf}")
        if _polygon_area(self.corners) <= 0.0:
            raise ValueError("refined corner polygon is degenerate")

    @property
    def centroid(self):
        return self.corners.mean(axis=0)


def _polygon_area(corners):
    """Absolute shoelace area of the TL, TR, BL, BR quad."""
    quad = corners[[0, 1, 3, 2]]  # perimeter order
    x = quad[:, 0]
    y = quad[:, 1]
    s = x @ np.roll(y, -1) - np.roll(x, -1) @ y
    return abs(s) / 2.0


def search_up_down(img: Image, p0, bounds: ColorBounds):
    """Vertical snake walk from p0; returns (P_up, P_down) pixel tuples."""
    mask = target_mask(img, bounds)
    x1, y1, x2, y2 = _kernels.search_vertical(mask, int(p0[0]), int(p0[1]))
    return (x1, y1), (x2, y2)


def search_left_right(img: Image, p0, bounds: ColorBounds):
    """Horizontal snake walk from p0; returns (P_left, P_right)."""
    mask = target_mask(img, bounds)
    xl, yl, xr, yr = _kernels.search_horizontal(mask, int(p0[0]), int(p0[1]))
    return (xl, yl), (xr, yr)


def minimal_square(points):
    """Smallest axis-aligned square containing the bounding box of points.

    The box is expanded symmetrically along its shorter side. Returns
    corners TL, TR, BL, BR as floats (possibly sticking out of the image;
    refinement clamps).
    """
    pts = np.asarray(points, dtype=float)
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    side = max(x1 - x0, y1 - y0)
    cx = (x0 + x1) / 2.0
    cy = (y0 + y1) / 2.0
    hx = side / 2.0
    return np.array([[cx - hx, cy - hx], [cx + hx, cy - hx],
                     [cx - hx, cy + hx], [cx + hx, cy + hx]])


def _refine_on_mask(mask, square, params):
    h, w = mask.shape
    side = max(square[:, 0].max() - square[:, 0].min(),
               square[:, 1].max() - square[:, 1].min())
    patch_side = max(5.0, params.refine_patch_frac * side)
    half = max(2, int(round(patch_side / 2.0)))
    out = np.empty((4, 2))
    for i in range(4):
        cx = min(w - 1, max(0, int(round(square[i, 0]))))
        cy = min(h - 1, max(0, int(round(square[i, 1]))))
        fx, fy, n = _kernels.patch_centroid(mask, cx, cy, half)
        out[i] = (fx, fy)
    return out


def refine_corners(img: Image, square, params: DetectorParams,
                   bounds: ColorBounds):
    """Pull each square corner to the centroid of nearby target pixels.

    Patch side is refine_patch_frac of the square side, at least 5 px.
    Corners with no target pixels in their patch stay put (clamped into
    the image).
    """
    mask = target_mask(img, bounds)
    return _refine_on_mask(mask, np.asarray(square, dtype=float), params)


def _fitness_on_mask(mask, corners):
    quad = np.rint(np.asarray(corners, dtype=float)[[0, 1, 3, 2]]).astype(np.int64)
    if _polygon_area(np.asarray(corners, dtype=float)) <= 1e-9:
        return 0.0
    n_target, n_total = _kernels.edge_fitness(mask, quad)
    if n_total == 0:
        return 0.0
    return n_target / n_total


def color_fitness(img: Image, corners, bounds: ColorBounds):
    """Fraction of rasterized polygon-edge pixels that are target color.

    corners in TL, TR, BL, BR order; edges are 1 px wide integer lines
    between successive perimeter corners. Degenerate polygons score 0.
    """
    mask = target_mask(img, bounds)
    return _fitness_on_mask(mask, corners)


def _detect_on_mask(mask, params):
    h, w = mask.shape
    rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    candidates = []
    for _ in range(params.max_samples):
        x = int(rng.integers(0, w))
        y = int(rng.integers(0, h))
        if not mask[y, x]:
            continue
        x1, y1, x2, y2 = _kernels.search_vertical(mask, x, y)
        if math.hypot(x1 - x2, y1 - y2) <= params.sigma_L:
            continue
        xl1, yl1, xr1, yr1 = _kernels.search_horizontal(mask, x1, y1)
        xl2, yl2, xr2, yr2 = _kernels.search_horizontal(mask, x2, y2)
        # Far horizontal endpoint from each vertical endpoint.
        if math.hypot(xl1 - x1, yl1 - y1) >= math.hypot(xr1 - x1, yr1 - y1):
            p3 = (xl1, yl1)
        else:
            p3 = (xr1, yr1)
        if math.hypot(xl2 - x2, yl2 - y2) >= math.hypot(xr2 - x2, yr2 - y2):
            p4 = (xl2, yl2)
        else:
            p4 = (xr2, yr2)
        span3 = math.hypot(p3[0] - x1, p3[1] - y1)
        span4 = math.hypot(p4[0] - x2, p4[1] - y2)
        if not (span3 > params.sigma_L or span4 > params.sigma_L):
            continue
        raw = np.array([[x1, y1], [x2, y2], list(p3), list(p4)], dtype=float)
        square = minimal_square(raw)
        refined = _refine_on_mask(mask, square, params)
        cf = _fitness_on_mask(mask, refined)
        if cf > params.sigma_cf and _polygon_area(refined) > 1e-9:
            candidates.append((cf, raw, square, refined))

    # Merge duplicates: highest fitness wins within the merge radius.
    candidates.sort(key=lambda c: (-c[0], c[3][0, 0], c[3][0, 1]))
    radius = params.merge_radius_frac * w
    kept = []
    for cf, raw, square, refined in candidates:
        cen = refined.mean(axis=0)
        if any(np.linalg.norm(cen - k.centroid) < radius for k in kept):
            continue
        kept.append(GateDetection(raw, square, refined, cf))
    if params.best_only and kept:
        kept = [max(kept, key=lambda d: d.cf)]
    return kept


def snake_gate_detect(img: Image, params: DetectorParams,
                      bounds: ColorBounds):
    """Run the full snake detector on one frame; returns GateDetections.

    Deterministic for identical (image, params, seed). An empty list is a
    frame-level miss, not an error.
    """
    mask = target_mask(img, bounds)
    return _detect_on_mask(mask, params)


# -- histogram side detection -------------------------------------------

def histogram_side_detect(img: Image, bounds: ColorBounds, window=5,
                          peak_min_count=10, min_separation=25):
    """Column histogram of target pixels; returns the two bar columns.

    The histogram is smoothed with a centered moving window (sum over the
    window, so peak_min_count is a pixel-mass threshold), local maxima
    are ranked by height, and the best pair at least min_separation
    columns apart is returned as (u_left, u_right). Plateau maxima report
    their center column. None when no qualifying pair exists.
    """
    mask = target_mask(img, bounds)
    counts = _kernels.column_counts(mask).astype(float)
    smooth = np.convolve(counts, np.ones(window), mode="same")
    peaks = []
    n = len(smooth)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and smooth[j + 1] == smooth[i]:
            j += 1
        v = smooth[i]
        left = smooth[i - 1] if i > 0 else -math.inf
        right = smooth[j + 1] if j + 1 < n else -math.inf
        if v > left and v > right and v > peak_min_count:
            peaks.append((v, (i + j) // 2))
        i = j + 1
    if len(peaks) < 2:
        return None
    peaks.sort(key=lambda p: (-p[0], p[1]))
    best_u = peaks[0][1]
    for _, u2 in peaks[1:]:
        if abs(u2 - best_u) >= min_separation:
            return (min(best_u, u2), max(best_u, u2))
    return None


# -- evaluation harness --------------------------------------------------

def match_detections(detections, labels, match_tol=10.0):
    """Greedy detection-to-label matching by nearest centroid.

    A detection is a true positive when every refined corner lands within
    match_tol px of the same-order corner of its nearest unmatched label.
    Only labels with all four corners visible are matchable. Returns
    (n_true_positive, n_false_positive, n_matchable_labels).
    """
    usable = [lab for lab in labels if lab.visible.all()]
    matched = [False] * len(usable)
    tp = 0
    fp = 0
    for det in sorted(detections, key=lambda d: -d.cf):
        best_i = -1
        best_d = math.inf
        for i, lab in enumerate(usable):
            if matched[i]:
                continue
            d = np.linalg.norm(det.centroid - lab.corners_px.mean(axis=0))
            if d < best_d:
                best_d = d
                best_i = i
        ok = False
        if best_i >= 0:
            diffs = np.linalg.norm(
                det.corners - usable[best_i].corners_px, axis=1)
            ok = bool((diffs <= match_tol).all())
        if ok:
            matched[best_i] = True
            tp += 1
        else:
            fp += 1
    return tp, fp, len(usable)


def evaluate_roc(corpus_dir, sigma_l_values, sigma_cf_values, repeats,
                 bounds: ColorBounds, base_params: DetectorParams = None,
                 match_tol=10.0):
    """Sweep (sigma_L, sigma_cf) over a labeled corpus.

    Each cell runs the detector `repeats` times with distinct seeds and
    reports mean TPR and mean false positives per image. Returns rows of
    (sigma_L, sigma_cf, tpr, fp_per_image); tpr is nan when the corpus
    has no usable labeled gates.
    """
    if base_params is None:
        base_params = DetectorParams()
    items = load_corpus(corpus_dir)
    masks = [target_mask(it.image, bounds) for it in items]
    seeds = np.random.SeedSequence(base_params.seed).generate_state(max(repeats, 1))
    rows = []
    for sl in sigma_l_values:
        for scf in sigma_cf_values:
            tprs = []
            fps = []
            for rep in range(repeats):
                tp_sum = 0
                gates_sum = 0
                fp_sum = 0
                params = DetectorParams(
                    sigma_L=sl, sigma_cf=scf,
                    max_samples=base_params.max_samples,
                    seed=int(seeds[rep]),
                    refine_patch_frac=base_params.refine_patch_frac,
                    merge_radius_frac=base_params.merge_radius_frac)
                for mask, item in zip(masks, items):
                    dets = _detect_on_mask(mask, params)
                    tp, fp, n_lab = match_detections(dets, item.labels,
                                                     match_tol)
                    tp_sum += tp
                    gates_sum += n_lab
                    fp_sum += fp
                tprs.append(tp_sum / gates_sum if gates_sum else math.nan)
                fps.append(fp_sum / len(items))
            rows.append((float(sl), float(scf), float(np.mean(tprs)),
                         float(np.mean(fps))))
    return rows


def evaluate_tpr_by_distance(corpus_dir, bin_edges, repeats,
                             bounds: ColorBounds,
                             params: DetectorParams = None, match_tol=10.0):
    """TPR per gate-distance bin (manifest distances, meters).

    Returns (bin_centers, tpr_per_bin) with nan for empty bins.
    """
    if params is None:
        params = DetectorParams()
    items = load_corpus(corpus_dir)
    edges = np.asarray(bin_edges, dtype=float)
    masks = [target_mask(it.image, bounds) for it in items]
    seeds = np.random.SeedSequence(params.seed).generate_state(max(repeats, 1))
    tp = np.zeros(len(edges) - 1)
    total = np.zeros(len(edges) - 1)
    for rep in range(repeats):
        p = DetectorParams(sigma_L=params.sigma_L, sigma_cf=params.sigma_cf,
                           max_samples=params.max_samples,
                           seed=int(seeds[rep]),
                           refine_patch_frac=params.refine_patch_frac,
                           merge_radius_frac=params.merge_radius_frac)
        for mask, item in zip(masks, items):
            d = item.meta.get("distance")
            if d is None:
                continue
            b = int(np.searchsorted(edges, d, side="right")) - 1
            if not 0 <= b < len(edges) - 1:
                continue
            dets = _detect_on_mask(mask, p)
            got_tp, _, n_lab = match_detections(dets, item.labels, match_tol)
            tp[b] += got_tp
            total[b] += n_lab
    with np.errstate(invalid="ignore", divide="ignore"):
        tpr = np.where(total > 0, tp / np.maximum(total, 1), np.nan)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, tpr
