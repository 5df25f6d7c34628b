# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel implementations.

Must stay bit-identical to gatepilot._kernels.pyfallback: integer math in
the classification and walk kernels, and float expressions in raycast_gates
written in the same operation order as the numpy version (built with
contraction disabled so the compiler cannot fuse multiply-adds).
"""

import numpy as np

from libc.math cimport fabs, INFINITY

ctypedef unsigned char u8
ctypedef long long i64

cdef i64 HALF = 32768
cdef i64 OFFSET = 8388608  # 128 << 16


cdef inline i64 _clamp255(i64 v) noexcept nogil:
    return 255 if v > 255 else v


def rgb_to_ycbcr(img):
    """Per-pixel integer YCbCr (BT.601 full range), shape preserved."""
    arr = np.ascontiguousarray(img, dtype=np.uint8)
    flat = arr.reshape(-1, 3)
    out = np.empty_like(flat)
    cdef u8[:, ::1] src = flat
    cdef u8[:, ::1] dst = out
    cdef Py_ssize_t i, n = src.shape[0]
    cdef i64 r, g, b
    with nogil:
        for i in range(n):
            r = src[i, 0]
            g = src[i, 1]
            b = src[i, 2]
            dst[i, 0] = <u8>((19595 * r + 38470 * g + 7471 * b + HALF) >> 16)
            dst[i, 1] = <u8>_clamp255(
                (OFFSET - 11059 * r - 21709 * g + 32768 * b + HALF) >> 16)
            dst[i, 2] = <u8>_clamp255(
                (OFFSET + 32768 * r - 27439 * g - 5329 * b + HALF) >> 16)
    return out.reshape(arr.shape)


def color_mask(img, lo, hi, space):
    """Binary target-color mask, u8 of 0/1, shape (H, W)."""
    arr = np.ascontiguousarray(img, dtype=np.uint8)
    cdef u8[:, :, ::1] px = arr
    cdef Py_ssize_t h = px.shape[0], w = px.shape[1]
    out = np.zeros((h, w), dtype=np.uint8)
    cdef u8[:, ::1] m = out
    cdef i64 lo0 = lo[0], lo1 = lo[1], lo2 = lo[2]
    cdef i64 hi0 = hi[0], hi1 = hi[1], hi2 = hi[2]
    cdef int ycbcr = 1 if space == 1 else 0
    cdef Py_ssize_t x, y
    cdef i64 r, g, b, c0, c1, c2
    with nogil:
        for y in range(h):
            for x in range(w):
                r = px[y, x, 0]
                g = px[y, x, 1]
                b = px[y, x, 2]
                if ycbcr:
                    c0 = (19595 * r + 38470 * g + 7471 * b + HALF) >> 16
                    c1 = _clamp255(
                        (OFFSET - 11059 * r - 21709 * g + 32768 * b + HALF) >> 16)
                    c2 = _clamp255(
                        (OFFSET + 32768 * r - 27439 * g - 5329 * b + HALF) >> 16)
                else:
                    c0 = r
                    c1 = g
                    c2 = b
                if (lo0 <= c0 <= hi0 and lo1 <= c1 <= hi1
                        and lo2 <= c2 <= hi2):
                    m[y, x] = 1
    return out


def search_vertical(mask, x, y):
    """Walk a colored segment up and down from (x, y); see pyfallback."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef u8[:, ::1] m = arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    cdef Py_ssize_t x1 = x, y1 = y, x2 = x, y2 = y
    with nogil:
        while y1 > 0:
            if m[y1 - 1, x1]:
                y1 -= 1
            elif x1 > 0 and m[y1 - 1, x1 - 1]:
                x1 -= 1
                y1 -= 1
            elif x1 + 1 < w and m[y1 - 1, x1 + 1]:
                x1 += 1
                y1 -= 1
            else:
                break
        while y2 + 1 < h:
            if m[y2 + 1, x2]:
                y2 += 1
            elif x2 > 0 and m[y2 + 1, x2 - 1]:
                x2 -= 1
                y2 += 1
            elif x2 + 1 < w and m[y2 + 1, x2 + 1]:
                x2 += 1
                y2 += 1
            else:
                break
    return int(x1), int(y1), int(x2), int(y2)


def search_horizontal(mask, x, y):
    """Walk a colored segment left and right from (x, y); see pyfallback."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef u8[:, ::1] m = arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    cdef Py_ssize_t xl = x, yl = y, xr = x, yr = y
    with nogil:
        while xl > 0:
            if m[yl, xl - 1]:
                xl -= 1
            elif yl > 0 and m[yl - 1, xl - 1]:
                xl -= 1
                yl -= 1
            elif yl + 1 < h and m[yl + 1, xl - 1]:
                xl -= 1
                yl += 1
            else:
                break
        while xr + 1 < w:
            if m[yr, xr + 1]:
                xr += 1
            elif yr > 0 and m[yr - 1, xr + 1]:
                xr += 1
                yr -= 1
            elif yr + 1 < h and m[yr + 1, xr + 1]:
                xr += 1
                yr += 1
            else:
                break
    return int(xl), int(yl), int(xr), int(yr)


def patch_centroid(mask, cx, cy, half):
    """Centroid of target pixels in a clipped square patch; see pyfallback."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef u8[:, ::1] m = arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    cdef Py_ssize_t icx = cx, icy = cy, ihalf = half
    cdef Py_ssize_t x0 = icx - ihalf, x1 = icx + ihalf
    cdef Py_ssize_t y0 = icy - ihalf, y1 = icy + ihalf
    if x0 < 0:
        x0 = 0
    if y0 < 0:
        y0 = 0
    if x1 > w - 1:
        x1 = w - 1
    if y1 > h - 1:
        y1 = h - 1
    if x0 > x1 or y0 > y1:
        return float(cx), float(cy), 0
    cdef i64 sx = 0, sy = 0, n = 0
    cdef Py_ssize_t x, y
    with nogil:
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                if m[y, x]:
                    sx += x
                    sy += y
                    n += 1
    if n == 0:
        return float(cx), float(cy), 0
    return sx / <double>n, sy / <double>n, int(n)


def edge_fitness(mask, quad):
    """Target vs total pixel counts along the quad perimeter; see pyfallback."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    q = np.ascontiguousarray(quad, dtype=np.int64)
    cdef u8[:, ::1] m = arr
    cdef i64[:, ::1] qq = q
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    cdef i64 n_target = 0, n_total = 0
    cdef Py_ssize_t i
    cdef i64 x0, y0, x1, y1, dx, dy, sx, sy, err, e2
    with nogil:
        for i in range(4):
            x0 = qq[i, 0]
            y0 = qq[i, 1]
            x1 = qq[(i + 1) % 4, 0]
            y1 = qq[(i + 1) % 4, 1]
            dx = x1 - x0
            if dx < 0:
                dx = -dx
            sx = 1 if x0 < x1 else -1
            dy = y1 - y0
            if dy < 0:
                dy = -dy
            dy = -dy
            sy = 1 if y0 < y1 else -1
            err = dx + dy
            while x0 != x1 or y0 != y1:
                n_total += 1
                if 0 <= x0 < w and 0 <= y0 < h and m[y0, x0]:
                    n_target += 1
                e2 = 2 * err
                if e2 >= dy:
                    err += dy
                    x0 += sx
                if e2 <= dx:
                    err += dx
                    y0 += sy
    return int(n_target), int(n_total)


def column_counts(mask):
    """Per-column count of target pixels, int64 of length W."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef u8[:, ::1] m = arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out = np.zeros(w, dtype=np.int64)
    cdef i64[::1] c = out
    cdef Py_ssize_t x, y
    with nogil:
        for y in range(h):
            for x in range(w):
                if m[y, x]:
                    c[x] += 1
    return out


def raycast_gates(dirs, origin, geom, colors, img):
    """Paint gate frames into img, nearest plane hit per pixel; see pyfallback."""
    d_arr = np.ascontiguousarray(dirs, dtype=np.float64)
    g_arr = np.ascontiguousarray(geom, dtype=np.float64)
    c_arr = np.ascontiguousarray(colors, dtype=np.float64)
    cdef double[:, :, ::1] dd = d_arr
    cdef double[:, ::1] gg = g_arr
    cdef double[:, :, ::1] cc = c_arr
    cdef double[:, :, ::1] im = img
    cdef Py_ssize_t h = im.shape[0], w = im.shape[1]
    cdef Py_ssize_t ng = gg.shape[0]
    best_arr = np.full((h, w), np.inf)
    cdef double[:, ::1] best = best_arr
    cdef double ox = origin[0], oy = origin[1], oz = origin[2]
    cdef Py_ssize_t g, x, y
    cdef double cx, cy, cz, hx, hy, hz, nx, ny, nz, half_o, half_i
    cdef double denom, num, lam, qx, qy, qz, s1, s2, a1, a2, amax
    cdef double dx, dy, dz
    cdef Py_ssize_t bar
    with nogil:
        for g in range(ng):
            cx = gg[g, 0]
            cy = gg[g, 1]
            cz = gg[g, 2]
            hx = gg[g, 3]
            hy = gg[g, 4]
            hz = gg[g, 5]
            nx = gg[g, 6]
            ny = gg[g, 7]
            nz = gg[g, 8]
            half_o = gg[g, 9]
            half_i = gg[g, 10]
            num = (cx - ox) * nx + (cy - oy) * ny + (cz - oz) * nz
            for y in range(h):
                for x in range(w):
                    dx = dd[y, x, 0]
                    dy = dd[y, x, 1]
                    dz = dd[y, x, 2]
                    denom = dx * nx + dy * ny + dz * nz
                    if fabs(denom) > 1e-12:
                        lam = num / denom
                    else:
                        lam = INFINITY
                    if not (lam > 0.05 and lam < best[y, x]):
                        continue
                    qx = ox + lam * dx
                    qy = oy + lam * dy
                    qz = oz + lam * dz
                    s1 = (qx - cx) * hx + (qy - cy) * hy + (qz - cz) * hz
                    s2 = qz - cz
                    a1 = fabs(s1)
                    a2 = fabs(s2)
                    amax = a1 if a1 >= a2 else a2
                    if not (amax <= half_o and amax >= half_i):
                        continue
                    if a1 >= a2:
                        bar = 2 if s1 < 0.0 else 3
                    else:
                        bar = 0 if s2 < 0.0 else 1
                    best[y, x] = lam
                    im[y, x, 0] = cc[g, bar, 0]
                    im[y, x, 1] = cc[g, bar, 1]
                    im[y, x, 2] = cc[g, bar, 2]
