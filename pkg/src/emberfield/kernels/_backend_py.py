"""Vectorized numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_core.pyx``. The two backends
must produce bit-identical output, which the parity test suite enforces, so
any arithmetic change must be mirrored in the .pyx file (same operations,
same order, no re-association).
"""

import math

import numpy as np

BACKEND = "python"

_U64 = np.uint64
_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLD = _U64(0x9E3779B97F4A7C15)
_PRIME_Y = _U64(0xC2B2AE3D27D4EB4F)
_PRIME_CH = _U64(0x165667B19E3779F9)
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)
_INV_2P53 = 1.0 / 9007199254740992.0  # 2**-53


def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _MIX_A
    z = (z ^ (z >> _U64(27))) * _MIX_B
    return z ^ (z >> _U64(31))


def hash_u01(seed, xs, ys, channel):
    """Counter-based keyed draw in [0, 1): one double per (seed, x, y, channel).

    Stateless, so draws are order-independent and a cell's randomness never
    depends on any other cell.
    """
    xs = np.ascontiguousarray(xs, dtype=np.uint64)
    ys = np.ascontiguousarray(ys, dtype=np.uint64)
    z = _mix64(_U64(seed & _MASK64) ^ (xs * _GOLD))
    z = _mix64(z ^ (ys * _PRIME_Y))
    z = _mix64(z ^ (_U64(int(channel) & _MASK64) * _PRIME_CH))
    return ((z >> _U64(11)).astype(np.float64)) * _INV_2P53


def emitter_math(flux, f_min, f_max, exponent, s_lo, s_hi, c_lo, c_hi):
    """Flux -> (normalized, curved, scale vec3, color vec3) for positive cells.

    Degenerate extrema (f_max <= f_min) map every positive flux to full
    intensity instead of erroring.
    """
    flux = np.ascontiguousarray(flux, dtype=np.float64)
    if f_max > f_min:
        t = (flux - f_min) / (f_max - f_min)
        f_norm = np.minimum(np.maximum(t, 0.0), 1.0)
    else:
        f_norm = np.ones_like(flux)
    if exponent == 1.5:
        # x*sqrt(x): sqrt is correctly rounded everywhere, so this matches
        # the compiled backend exactly; np.power does not (SIMD pow differs
        # from libm by an ulp on some inputs)
        f_curved = f_norm * np.sqrt(f_norm)
    else:
        f_curved = np.array([math.pow(v, exponent) for v in f_norm])
    s_lo = np.asarray(s_lo, dtype=np.float64)
    s_hi = np.asarray(s_hi, dtype=np.float64)
    c_lo = np.asarray(c_lo, dtype=np.float64)
    c_hi = np.asarray(c_hi, dtype=np.float64)
    scale = s_lo[None, :] + (s_hi - s_lo)[None, :] * f_curved[:, None]
    color = c_lo[None, :] + (c_hi - c_lo)[None, :] * f_curved[:, None]
    return f_norm, f_curved, scale, color


def nearest_select(px, py, pz, cx, cy, cz, k):
    """Indices of the k nearest points to (cx, cy, cz), sorted ascending.

    Ordering key is (squared distance, index); ties on the exact squared
    distance break toward the lower index. Returns (indices, distances).
    """
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    pz = np.ascontiguousarray(pz, dtype=np.float64)
    n = px.shape[0]
    dx = px - cx
    dy = py - cy
    dz = pz - cz
    d2 = dx * dx + dy * dy + dz * dz
    k = min(int(k), n)
    if k == n:
        idx = np.arange(n, dtype=np.int64)
        order = idx[np.lexsort((idx, d2))]
    else:
        part = np.argpartition(d2, k - 1)[:k]
        thresh = d2[part].max()
        cand = np.flatnonzero(d2 <= thresh).astype(np.int64)
        order = cand[np.lexsort((cand, d2[cand]))][:k]
    return order, np.sqrt(d2[order])


# Draw channels for the keyed RNG. Trees and grass use disjoint channels so
# the two spawn decisions in one cell stay independent.
CH_TREE_JITTER_X = 0
CH_TREE_JITTER_Y = 1
CH_TREE_YAW = 2
CH_TREE_MULT = 3
CH_TREE_VAR = 4
CH_TREE_MODEL = 5
CH_GRASS_JITTER_X = 6
CH_GRASS_JITTER_Y = 7
CH_GRASS_YAW = 8


def tree_sample(canopy, cell_x, cell_y, seed, large_thr, medium_thr,
                mult_lo, mult_hi, base_lo, base_hi, max_fuel,
                var_lo, var_hi, model_counts, jitter_x, jitter_y):
    """Per-cell tree draws for cells already known to clear the canopy floor.

    Returns (category, model_index, dx, dy, yaw, scale). Categories index
    mult_lo/mult_hi/model_counts as 0=large, 1=medium, 2=small.
    """
    canopy = np.ascontiguousarray(canopy, dtype=np.float64)
    cell_x = np.ascontiguousarray(cell_x, dtype=np.uint64)
    cell_y = np.ascontiguousarray(cell_y, dtype=np.uint64)
    mult_lo = np.asarray(mult_lo, dtype=np.float64)
    mult_hi = np.asarray(mult_hi, dtype=np.float64)
    model_counts = np.asarray(model_counts, dtype=np.int64)

    category = np.full(canopy.shape, 2, dtype=np.int8)
    category[canopy >= medium_thr] = 1
    category[canopy >= large_thr] = 0

    u_jx = hash_u01(seed, cell_x, cell_y, CH_TREE_JITTER_X)
    u_jy = hash_u01(seed, cell_x, cell_y, CH_TREE_JITTER_Y)
    u_yaw = hash_u01(seed, cell_x, cell_y, CH_TREE_YAW)
    u_mult = hash_u01(seed, cell_x, cell_y, CH_TREE_MULT)
    u_var = hash_u01(seed, cell_x, cell_y, CH_TREE_VAR)
    u_model = hash_u01(seed, cell_x, cell_y, CH_TREE_MODEL)

    dx = (2.0 * u_jx - 1.0) * jitter_x
    dy = (2.0 * u_jy - 1.0) * jitter_y
    yaw = u_yaw * 360.0

    lo = mult_lo[category]
    hi = mult_hi[category]
    mult = lo + (hi - lo) * u_mult
    var = var_lo + (var_hi - var_lo) * u_var

    t = canopy / max_fuel
    norm_fuel = np.minimum(np.maximum(t, 0.0), 1.0)
    scale = (base_lo + (base_hi - base_lo) * norm_fuel) * mult * var

    counts = model_counts[category]
    model_index = (u_model * counts.astype(np.float64)).astype(np.int64)
    model_index = np.minimum(model_index, counts - 1)

    return category, model_index, dx, dy, yaw, scale


def grass_sample(cell_x, cell_y, seed, jitter_x, jitter_y):
    """Per-cell grass draws: (dx, dy, yaw)."""
    cell_x = np.ascontiguousarray(cell_x, dtype=np.uint64)
    cell_y = np.ascontiguousarray(cell_y, dtype=np.uint64)
    u_jx = hash_u01(seed, cell_x, cell_y, CH_GRASS_JITTER_X)
    u_jy = hash_u01(seed, cell_x, cell_y, CH_GRASS_JITTER_Y)
    u_yaw = hash_u01(seed, cell_x, cell_y, CH_GRASS_YAW)
    dx = (2.0 * u_jx - 1.0) * jitter_x
    dy = (2.0 * u_jy - 1.0) * jitter_y
    return dx, dy, u_yaw * 360.0


def _ground(elev, x0, y0, dx_sp, dy_sp, x, y):
    """Bilinear terrain height with edge-clamped extension."""
    h, w = elev.shape
    gx = (x - x0) / dx_sp
    gy = (y - y0) / dy_sp
    fx = np.minimum(np.maximum(gx, 0.0), w - 1.0)
    fy = np.minimum(np.maximum(gy, 0.0), h - 1.0)
    ix = np.minimum(np.floor(fx).astype(np.int64), w - 2)
    iy = np.minimum(np.floor(fy).astype(np.int64), h - 2)
    tx = fx - ix
    ty = fy - iy
    h00 = elev[iy, ix]
    h10 = elev[iy, ix + 1]
    h01 = elev[iy + 1, ix]
    h11 = elev[iy + 1, ix + 1]
    return (h00 * (1.0 - tx) + h10 * tx) * (1.0 - ty) + (h01 * (1.0 - tx) + h11 * tx) * ty


def raymarch_depth(elev, x0, y0, dx_sp, dy_sp, ox, oy, oz,
                   dir_x, dir_y, dir_z, t_max, min_step, slope_c,
                   max_steps, bisect_iters):
    """March rays against a bilinear heightfield; returns hit distances.

    Terrain extends past the grid with edge-clamped heights. Misses are +inf.
    Steps are proportional to the current height above ground (floored at
    min_step); a sign change brackets the surface and fixed-count bisection
    refines it. All rays share one origin.
    """
    elev = np.ascontiguousarray(elev, dtype=np.float64)
    dir_x = np.ascontiguousarray(dir_x, dtype=np.float64)
    dir_y = np.ascontiguousarray(dir_y, dtype=np.float64)
    dir_z = np.ascontiguousarray(dir_z, dtype=np.float64)
    m = dir_x.shape[0]
    max_elev = elev.max()

    depth = np.full(m, np.inf)
    lo = np.zeros(m)
    hi = np.zeros(m)
    bracketed = np.zeros(m, dtype=bool)

    t = np.zeros(m)
    g0 = _ground(elev, x0, y0, dx_sp, dy_sp, np.full(m, ox), np.full(m, oy))
    dz = oz - g0
    active = dz >= 0.0
    below = ~active
    if below.any():
        depth[below] = np.nan

    for _ in range(int(max_steps)):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        step = np.maximum(dz[idx] * slope_c, min_step)
        t_new = t[idx] + step
        over = t_new > t_max
        if over.any():
            done = idx[over]
            active[done] = False
            idx = idx[~over]
            t_new = t_new[~over]
            if idx.size == 0:
                continue
        px = ox + dir_x[idx] * t_new
        py = oy + dir_y[idx] * t_new
        pz = oz + dir_z[idx] * t_new
        g = _ground(elev, x0, y0, dx_sp, dy_sp, px, py)
        ndz = pz - g
        crossed = ndz < 0.0
        if crossed.any():
            c = idx[crossed]
            lo[c] = t[c]
            hi[c] = t_new[crossed]
            bracketed[c] = True
            active[c] = False
        sky = (~crossed) & (dir_z[idx] >= 0.0) & (pz > max_elev)
        if sky.any():
            active[idx[sky]] = False
        keep = (~crossed) & (~sky)
        kidx = idx[keep]
        t[kidx] = t_new[keep]
        dz[kidx] = ndz[keep]

    if bracketed.any():
        b = np.flatnonzero(bracketed)
        blo = lo[b]
        bhi = hi[b]
        for _ in range(int(bisect_iters)):
            mid = 0.5 * (blo + bhi)
            px = ox + dir_x[b] * mid
            py = oy + dir_y[b] * mid
            pz = oz + dir_z[b] * mid
            g = _ground(elev, x0, y0, dx_sp, dy_sp, px, py)
            above = (pz - g) >= 0.0
            blo = np.where(above, mid, blo)
            bhi = np.where(above, bhi, mid)
        depth[b] = 0.5 * (blo + bhi)
    return depth
