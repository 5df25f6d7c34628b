"""Pure-python kernel implementations.

Mirror of the compiled extension in gatepilot._kernels._native. Both
backends must produce bit-identical outputs: color classification and the
snake walks use integer arithmetic only, and the raycast writes each float
expression in the same operation order as the C loop (the extension is
compiled with contraction off so no FMA sneaks in).

Vectorized numpy where the operation allows it; the walk and raster
kernels are plain loops because each step depends on the previous pixel.
"""

import numpy as np

# Fixed-point BT.601 full-range RGB -> YCbCr, 16 fractional bits.
_Y_R, _Y_G, _Y_B = 19595, 38470, 7471
_CB_R, _CB_G, _CB_B = -11059, -21709, 32768
_CR_R, _CR_G, _CR_B = 32768, -27439, -5329
_HALF = 32768
_OFFSET = 128 << 16

SPACE_RGB = 0
SPACE_YCBCR = 1


def rgb_to_ycbcr(img):
    """Per-pixel integer YCbCr (BT.601 full range), shape preserved.

    Input u8 (..., 3); output u8. Fixed-point with round-half-up so the
    result is exactly reproducible.
    """
    rgb = np.asarray(img, dtype=np.int64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = (_Y_R * r + _Y_G * g + _Y_B * b + _HALF) >> 16
    cb = (_OFFSET + _CB_R * r + _CB_G * g + _CB_B * b + _HALF) >> 16
    cr = (_OFFSET + _CR_R * r + _CR_G * g + _CR_B * b + _HALF) >> 16
    out = np.stack([y, np.minimum(cb, 255), np.minimum(cr, 255)], axis=-1)
    return out.astype(np.uint8)


def color_mask(img, lo, hi, space):
    """Binary target-color mask, u8 of 0/1, shape (H, W).

    img: u8 (H, W, 3) RGB. lo, hi: length-3 integer bounds, inclusive,
    in the channel space selected by `space` (0 = RGB, 1 = YCbCr).
    """
    chans = rgb_to_ycbcr(img) if space == SPACE_YCBCR else np.asarray(img)
    chans = chans.astype(np.int64)
    ok = np.ones(chans.shape[:2], dtype=bool)
    for c in range(3):
        ok &= (chans[..., c] >= int(lo[c])) & (chans[..., c] <= int(hi[c]))
    return ok.astype(np.uint8)


def search_vertical(mask, x, y):
    """Walk a connected colored segment up and down from (x, y).

    At each step the pixel straight ahead is tried first, then the
    diagonal at x-1, then the diagonal at x+1. Returns the up endpoint
    followed by the down endpoint: (x_up, y_up, x_dn, y_dn).
    """
    h, w = mask.shape
    x1, y1 = x, y
    while y1 > 0:
        if mask[y1 - 1, x1]:
            y1 -= 1
        elif x1 > 0 and mask[y1 - 1, x1 - 1]:
            x1 -= 1
            y1 -= 1
        elif x1 + 1 < w and mask[y1 - 1, x1 + 1]:
            x1 += 1
            y1 -= 1
        else:
            break
    x2, y2 = x, y
    while y2 + 1 < h:
        if mask[y2 + 1, x2]:
            y2 += 1
        elif x2 > 0 and mask[y2 + 1, x2 - 1]:
            x2 -= 1
            y2 += 1
        elif x2 + 1 < w and mask[y2 + 1, x2 + 1]:
            x2 += 1
            y2 += 1
        else:
            break
    return x1, y1, x2, y2


def search_horizontal(mask, x, y):
    """Same walk sideways: returns (x_left, y_left, x_right, y_right)."""
    h, w = mask.shape
    xl, yl = x, y
    while xl > 0:
        if mask[yl, xl - 1]:
            xl -= 1
        elif yl > 0 and mask[yl - 1, xl - 1]:
            xl -= 1
            yl -= 1
        elif yl + 1 < h and mask[yl + 1, xl - 1]:
            xl -= 1
            yl += 1
        else:
            break
    xr, yr = x, y
    while xr + 1 < w:
        if mask[yr, xr + 1]:
            xr += 1
        elif yr > 0 and mask[yr - 1, xr + 1]:
            xr += 1
            yr -= 1
        elif yr + 1 < h and mask[yr + 1, xr + 1]:
            xr += 1
            yr += 1
        else:
            break
    return xl, yl, xr, yr


def patch_centroid(mask, cx, cy, half):
    """Centroid of target pixels in a (2*half+1)^2 patch around (cx, cy).

    Patch is clipped to the image. Returns (fx, fy, count); when the
    patch holds no target pixels the center is echoed back with count 0.
    """
    h, w = mask.shape
    x0 = max(0, cx - half)
    x1 = min(w - 1, cx + half)
    y0 = max(0, cy - half)
    y1 = min(h - 1, cy + half)
    if x0 > x1 or y0 > y1:
        return float(cx), float(cy), 0
    patch = mask[y0:y1 + 1, x0:x1 + 1]
    ys, xs = np.nonzero(patch)
    n = len(xs)
    if n == 0:
        return float(cx), float(cy), 0
    sx = int(xs.sum()) + n * x0
    sy = int(ys.sum()) + n * y0
    return sx / n, sy / n, n


def _bresenham_points(x0, y0, x1, y1):
    """Integer line from (x0, y0) up to but excluding (x1, y1)."""
    pts = []
    dx = abs(x1 - x0)
    sx = 1 if x0 < x1 else -1
    dy = -abs(y1 - y0)
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while (x0, y0) != (x1, y1):
        pts.append((x0, y0))
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return pts


def edge_fitness(mask, quad):
    """Count target pixels along the rasterized perimeter of a quad.

    quad: int (4, 2) of (x, y) corners in perimeter order. Each edge
    includes its start point and excludes its end so corners are sampled
    once. Returns (n_target, n_total); off-image samples count toward the
    total only.
    """
    h, w = mask.shape
    n_target = 0
    n_total = 0
    for i in range(4):
        x0, y0 = int(quad[i][0]), int(quad[i][1])
        x1, y1 = int(quad[(i + 1) % 4][0]), int(quad[(i + 1) % 4][1])
        for x, y in _bresenham_points(x0, y0, x1, y1):
            n_total += 1
            if 0 <= x < w and 0 <= y < h and mask[y, x]:
                n_target += 1
    return n_target, n_total


def column_counts(mask):
    """Per-column count of target pixels, int64 of length W."""
    return np.asarray(mask, dtype=np.int64).sum(axis=0)


def raycast_gates(dirs, origin, geom, colors, img):
    """Paint gate frames into img by per-pixel ray vs plane intersection.

    dirs: (H, W, 3) earth-frame ray directions per pixel. origin: (3,)
    camera position. geom: (G, 11) rows of [center(3), h_axis(3),
    normal(3), half_outer, half_inner] describing a vertical square frame:
    in-plane coords are s1 along h_axis and s2 along earth +z (down), a
    pixel is frame when max(|s1|, |s2|) <= half_outer and not strictly
    inside half_inner. colors: (G, 4, 3) float RGB per bar, bar order top,
    bottom, left, right. img: (H, W, 3) float, painted in place; nearest
    hit along the ray wins, intersections closer than 0.05 are ignored.
    """
    hgt, wid = img.shape[0], img.shape[1]
    ox, oy, oz = float(origin[0]), float(origin[1]), float(origin[2])
    best = np.full((hgt, wid), np.inf)
    dx = dirs[..., 0]
    dy = dirs[..., 1]
    dz = dirs[..., 2]
    for g in range(geom.shape[0]):
        cx, cy, cz = geom[g, 0], geom[g, 1], geom[g, 2]
        hx, hy, hz = geom[g, 3], geom[g, 4], geom[g, 5]
        nx, ny, nz = geom[g, 6], geom[g, 7], geom[g, 8]
        half_o = geom[g, 9]
        half_i = geom[g, 10]
        denom = dx * nx + dy * ny + dz * nz
        num = (cx - ox) * nx + (cy - oy) * ny + (cz - oz) * nz
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = num / denom
        lam = np.where(np.abs(denom) > 1e-12, lam, np.inf)
        qx = ox + lam * dx
        qy = oy + lam * dy
        qz = oz + lam * dz
        s1 = (qx - cx) * hx + (qy - cy) * hy + (qz - cz) * hz
        s2 = qz - cz
        a1 = np.abs(s1)
        a2 = np.abs(s2)
        amax = np.maximum(a1, a2)
        hit = (lam > 0.05) & (lam < best) & (amax <= half_o) & (amax >= half_i)
        if not hit.any():
            continue
        bar = np.where(a1 >= a2,
                       np.where(s1 < 0.0, 2, 3),
                       np.where(s2 < 0.0, 0, 1))
        best[hit] = lam[hit]
        for b in range(4):
            sel = hit & (bar == b)
            img[sel] = colors[g, b]
