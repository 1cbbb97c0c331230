# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel core.

Bit-for-bit twin of ``_backend_py``: same formulas, same operation order,
same rounding. The extension is built with -ffp-contract=off so the C
compiler cannot fuse multiply/add pairs that numpy keeps separate.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, pow, sqrt
from libc.stdint cimport int8_t, int64_t, uint64_t

cnp.import_array()

BACKEND = "compiled"

cdef uint64_t _GOLD = 0x9E3779B97F4A7C15ULL
cdef uint64_t _PRIME_Y = 0xC2B2AE3D27D4EB4FULL
cdef uint64_t _PRIME_CH = 0x165667B19E3779F9ULL
cdef uint64_t _MIX_A = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _MIX_B = 0x94D049BB133111EBULL
cdef double _INV_2P53 = 1.0 / 9007199254740992.0

CH_TREE_JITTER_X = 0
CH_TREE_JITTER_Y = 1
CH_TREE_YAW = 2
CH_TREE_MULT = 3
CH_TREE_VAR = 4
CH_TREE_MODEL = 5
CH_GRASS_JITTER_X = 6
CH_GRASS_JITTER_Y = 7
CH_GRASS_YAW = 8


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * _MIX_A
    z = (z ^ (z >> 27)) * _MIX_B
    return z ^ (z >> 31)


cdef inline double _u01(uint64_t seed, uint64_t x, uint64_t y, uint64_t ch) nogil:
    cdef uint64_t z = _mix64(seed ^ (x * _GOLD))
    z = _mix64(z ^ (y * _PRIME_Y))
    z = _mix64(z ^ (ch * _PRIME_CH))
    return <double>(z >> 11) * _INV_2P53


def hash_u01(seed, xs, ys, channel):
    """Counter-based keyed draw in [0, 1); see the python backend docstring."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ax = np.ascontiguousarray(xs, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ay = np.ascontiguousarray(ys, dtype=np.uint64)
    cdef Py_ssize_t n = ax.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t ch = <uint64_t>(int(channel) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _u01(s, ax[i], ay[i], ch)
    return out


def emitter_math(flux, double f_min, double f_max, double exponent,
                 s_lo, s_hi, c_lo, c_hi):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fl = np.ascontiguousarray(flux, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] slo = np.asarray(s_lo, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] shi = np.asarray(s_hi, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] clo = np.asarray(c_lo, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] chi = np.asarray(c_hi, dtype=np.float64)
    cdef Py_ssize_t n = fl.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f_norm = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f_curved = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] scale = np.empty((n, 3), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] color = np.empty((n, 3), dtype=np.float64)
    cdef bint degenerate = not (f_max > f_min)
    cdef bint three_halves = exponent == 1.5
    cdef double denom = f_max - f_min
    cdef double t, c
    cdef Py_ssize_t i, j
    for i in range(n):
        if degenerate:
            t = 1.0
        else:
            t = (fl[i] - f_min) / denom
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        f_norm[i] = t
        # x*sqrt(x) fast path mirrors the python backend (see its comment)
        c = t * sqrt(t) if three_halves else pow(t, exponent)
        f_curved[i] = c
        for j in range(3):
            scale[i, j] = slo[j] + (shi[j] - slo[j]) * c
            color[i, j] = clo[j] + (chi[j] - clo[j]) * c
    return f_norm, f_curved, scale, color


cdef inline bint _heap_after(double d2a, int64_t ia, double d2b, int64_t ib) nogil:
    # True when (d2a, ia) orders after (d2b, ib); the max-heap root is the
    # element that orders last among the kept k.
    if d2a != d2b:
        return d2a > d2b
    return ia > ib


cdef void _sift_down(double* hd, int64_t* hi_idx, Py_ssize_t size, Py_ssize_t root) nogil:
    cdef Py_ssize_t child
    cdef double dv = hd[root]
    cdef int64_t iv = hi_idx[root]
    while True:
        child = 2 * root + 1
        if child >= size:
            break
        if child + 1 < size and _heap_after(hd[child + 1], hi_idx[child + 1], hd[child], hi_idx[child]):
            child += 1
        if _heap_after(hd[child], hi_idx[child], dv, iv):
            hd[root] = hd[child]
            hi_idx[root] = hi_idx[child]
            root = child
        else:
            break
    hd[root] = dv
    hi_idx[root] = iv


def nearest_select(px, py, pz, double cx, double cy, double cz, k):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax = np.ascontiguousarray(px, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ay = np.ascontiguousarray(py, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] az = np.ascontiguousarray(pz, dtype=np.float64)
    cdef Py_ssize_t n = ax.shape[0]
    cdef Py_ssize_t kk = min(int(k), n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.empty(kk, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.empty(kk, dtype=np.float64)
    if kk == 0:
        return order, dist
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hd_arr = np.empty(kk, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hidx_arr = np.empty(kk, dtype=np.int64)
    cdef double* hd = <double*>hd_arr.data
    cdef int64_t* hidx = <int64_t*>hidx_arr.data
    cdef Py_ssize_t size = 0, i, j
    cdef double dx, dy, dz, d2
    with nogil:
        for i in range(n):
            dx = ax[i] - cx
            dy = ay[i] - cy
            dz = az[i] - cz
            d2 = dx * dx + dy * dy + dz * dz
            if size < kk:
                # push
                j = size
                hd[j] = d2
                hidx[j] = i
                size += 1
                while j > 0 and _heap_after(hd[j], hidx[j], hd[(j - 1) // 2], hidx[(j - 1) // 2]):
                    hd[j], hd[(j - 1) // 2] = hd[(j - 1) // 2], hd[j]
                    hidx[j], hidx[(j - 1) // 2] = hidx[(j - 1) // 2], hidx[j]
                    j = (j - 1) // 2
            elif _heap_after(hd[0], hidx[0], d2, i):
                hd[0] = d2
                hidx[0] = i
                _sift_down(hd, hidx, kk, 0)
        # heapsort: pop the max to the back, leaving ascending (d2, idx)
        for i in range(kk - 1, 0, -1):
            hd[0], hd[i] = hd[i], hd[0]
            hidx[0], hidx[i] = hidx[i], hidx[0]
            _sift_down(hd, hidx, i, 0)
    for i in range(kk):
        order[i] = hidx[i]
        dist[i] = sqrt(hd[i])
    return order, dist


def tree_sample(canopy, cell_x, cell_y, seed, double large_thr, double medium_thr,
                mult_lo, mult_hi, double base_lo, double base_hi, double max_fuel,
                double var_lo, double var_hi, model_counts, double jitter_x, double jitter_y):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cf = np.ascontiguousarray(canopy, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] xs = np.ascontiguousarray(cell_x, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ys = np.ascontiguousarray(cell_y, dtype=np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mlo = np.asarray(mult_lo, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mhi = np.asarray(mult_hi, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.asarray(model_counts, dtype=np.int64)
    cdef Py_ssize_t n = cf.shape[0]
    cdef cnp.ndarray[cnp.int8_t, ndim=1] category = np.empty(n, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] model_index = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dx = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dy = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yaw = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] scale = np.empty(n, dtype=np.float64)
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    cdef int8_t cat
    cdef int64_t count, mi
    cdef double u, lo, hi, mult, var, t, norm_fuel
    with nogil:
        for i in range(n):
            if cf[i] >= large_thr:
                cat = 0
            elif cf[i] >= medium_thr:
                cat = 1
            else:
                cat = 2
            category[i] = cat
            dx[i] = (2.0 * _u01(s, xs[i], ys[i], 0) - 1.0) * jitter_x
            dy[i] = (2.0 * _u01(s, xs[i], ys[i], 1) - 1.0) * jitter_y
            yaw[i] = _u01(s, xs[i], ys[i], 2) * 360.0
            u = _u01(s, xs[i], ys[i], 3)
            lo = mlo[cat]
            hi = mhi[cat]
            mult = lo + (hi - lo) * u
            var = var_lo + (var_hi - var_lo) * _u01(s, xs[i], ys[i], 4)
            t = cf[i] / max_fuel
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            norm_fuel = t
            scale[i] = (base_lo + (base_hi - base_lo) * norm_fuel) * mult * var
            count = counts[cat]
            mi = <int64_t>(_u01(s, xs[i], ys[i], 5) * <double>count)
            if mi > count - 1:
                mi = count - 1
            model_index[i] = mi
    return category, model_index, dx, dy, yaw, scale


def grass_sample(cell_x, cell_y, seed, double jitter_x, double jitter_y):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] xs = np.ascontiguousarray(cell_x, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ys = np.ascontiguousarray(cell_y, dtype=np.uint64)
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dx = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dy = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yaw = np.empty(n, dtype=np.float64)
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            dx[i] = (2.0 * _u01(s, xs[i], ys[i], 6) - 1.0) * jitter_x
            dy[i] = (2.0 * _u01(s, xs[i], ys[i], 7) - 1.0) * jitter_y
            yaw[i] = _u01(s, xs[i], ys[i], 8) * 360.0
    return dx, dy, yaw


cdef inline double _ground_at(const double* elev, Py_ssize_t h, Py_ssize_t w,
                              double x0, double y0, double dx_sp, double dy_sp,
                              double x, double y) nogil:
    cdef double gx = (x - x0) / dx_sp
    cdef double gy = (y - y0) / dy_sp
    cdef double fx = gx
    cdef double fy = gy
    if fx < 0.0:
        fx = 0.0
    elif fx > w - 1.0:
        fx = w - 1.0
    if fy < 0.0:
        fy = 0.0
    elif fy > h - 1.0:
        fy = h - 1.0
    cdef Py_ssize_t ix = <Py_ssize_t>floor(fx)
    cdef Py_ssize_t iy = <Py_ssize_t>floor(fy)
    if ix > w - 2:
        ix = w - 2
    if iy > h - 2:
        iy = h - 2
    cdef double tx = fx - ix
    cdef double ty = fy - iy
    cdef double h00 = elev[iy * w + ix]
    cdef double h10 = elev[iy * w + ix + 1]
    cdef double h01 = elev[(iy + 1) * w + ix]
    cdef double h11 = elev[(iy + 1) * w + ix + 1]
    return (h00 * (1.0 - tx) + h10 * tx) * (1.0 - ty) + (h01 * (1.0 - tx) + h11 * tx) * ty


def raymarch_depth(elev, double x0, double y0, double dx_sp, double dy_sp,
                   double ox, double oy, double oz,
                   dir_x, dir_y, dir_z, double t_max, double min_step,
                   double slope_c, max_steps, bisect_iters):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ev = np.ascontiguousarray(elev, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rdx = np.ascontiguousarray(dir_x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rdy = np.ascontiguousarray(dir_y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rdz = np.ascontiguousarray(dir_z, dtype=np.float64)
    cdef Py_ssize_t m = rdx.shape[0]
    cdef Py_ssize_t h = ev.shape[0]
    cdef Py_ssize_t w = ev.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] depth = np.full(m, np.inf)
    cdef const double* ep = <const double*>ev.data
    cdef double max_elev = ev.max()
    cdef Py_ssize_t n_steps = int(max_steps)
    cdef Py_ssize_t n_bisect = int(bisect_iters)
    cdef double g0 = _ground_at(ep, h, w, x0, y0, dx_sp, dy_sp, ox, oy)
    cdef double dz0 = oz - g0
    cdef Py_ssize_t i, step_i, bi
    cdef double t, dz, step, t_new, px, py, pz, g, ndz, lo, hi, mid
    if dz0 < 0.0:
        depth[:] = np.nan
        return depth
    with nogil:
        for i in range(m):
            t = 0.0
            dz = dz0
            for step_i in range(n_steps):
                step = dz * slope_c
                if step < min_step:
                    step = min_step
                t_new = t + step
                if t_new > t_max:
                    break
                px = ox + rdx[i] * t_new
                py = oy + rdy[i] * t_new
                pz = oz + rdz[i] * t_new
                g = _ground_at(ep, h, w, x0, y0, dx_sp, dy_sp, px, py)
                ndz = pz - g
                if ndz < 0.0:
                    lo = t
                    hi = t_new
                    for bi in range(n_bisect):
                        mid = 0.5 * (lo + hi)
                        px = ox + rdx[i] * mid
                        py = oy + rdy[i] * mid
                        pz = oz + rdz[i] * mid
                        g = _ground_at(ep, h, w, x0, y0, dx_sp, dy_sp, px, py)
                        if pz - g >= 0.0:
                            lo = mid
                        else:
                            hi = mid
                    depth[i] = 0.5 * (lo + hi)
                    break
                if rdz[i] >= 0.0 and pz > max_elev:
                    break
                t = t_new
                dz = ndz
    return depth
