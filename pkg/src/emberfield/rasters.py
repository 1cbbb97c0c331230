"""2D multi-modal sensor rasters: thermal colormap, additive thermal/RGB
fusion, fire-intensity and fuel heatmaps, and heightfield depth from a
virtual drone pose.

All pixel math is defined on float64 before the final round to uint8, and
renders are pure functions, so outputs are byte-reproducible and safe to use
as golden files.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

# thermal gradient: black -> dark red -> orange -> yellow -> white
THERMAL_STOPS = (
    (0.00, (0, 0, 0)),
    (0.25, (128, 0, 0)),
    (0.50, (255, 128, 0)),
    (0.75, (255, 255, 0)),
    (1.00, (255, 255, 255)),
)

# fire intensity ramp: light yellow (low) -> deep yellow (medium) -> red (high)
INTENSITY_STOPS = (
    (0.00, (255, 255, 153)),
    (0.50, (255, 204, 0)),
    (1.00, (204, 0, 0)),
)

INTENSITY_BACKGROUND = (0, 0, 0)

T_AMBIENT_K = 300.0


@dataclass(frozen=True)
class ColorStop:
    t: float
    color: tuple


def _as_pairs(stops):
    """Normalize a gradient to (t, rgb) pairs; accepts ColorStop instances or
    bare tuples, and enforces sorted t with endpoints at 0 and 1."""
    pairs = [(s.t, s.color) if isinstance(s, ColorStop) else tuple(s)
             for s in stops]
    ts = [p[0] for p in pairs]
    if ts != sorted(ts) or ts[0] != 0.0 or ts[-1] != 1.0:
        raise ValueError("color stops must be sorted with t0=0 and t_last=1")
    return pairs


def colormap(t, stops=THERMAL_STOPS):
    """Piecewise-linear color for one t in [0, 1]; exact at stop positions."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    pairs = _as_pairs(stops)
    for (t0, c0), (t1, c1) in zip(pairs, pairs[1:]):
        if t <= t1:
            if t1 == t0:
                return tuple(c1)
            a = (t - t0) / (t1 - t0)
            return tuple(int(round(lo + (hi - lo) * a)) for lo, hi in zip(c0, c1))
    return tuple(pairs[-1][1])


def thermal_colormap(t_norm):
    return colormap(t_norm, THERMAL_STOPS)


def colorize(t_norm, stops=THERMAL_STOPS):
    """Vectorized colormap: float array in [0,1] -> uint8 rgb raster."""
    pairs = _as_pairs(stops)
    t = np.asarray(t_norm, dtype=np.float64)
    out = np.zeros(t.shape + (3,), dtype=np.float64)
    for (t0, c0), (t1, c1) in zip(pairs, pairs[1:]):
        sel = (t >= t0) & (t <= t1) if t1 == 1.0 else (t >= t0) & (t < t1)
        if not sel.any():
            continue
        a = (t[sel] - t0) / (t1 - t0) if t1 > t0 else np.ones(int(sel.sum()))
        for ch in range(3):
            out[sel, ch] = c0[ch] + (c1[ch] - c0[ch]) * a
    return np.rint(out).astype(np.uint8)


def normalize_temperature(temp, t_ambient=T_AMBIENT_K, t_max=None):
    """clamp((T - ambient) / (T_max - ambient), 0, 1); T_max defaults to the
    grid maximum (degenerate grids map to all-zero)."""
    vals = np.asarray(temp, dtype=np.float64)
    if t_max is None:
        t_max = float(vals.max())
    if t_max <= t_ambient:
        return np.zeros_like(vals)
    return np.clip((vals - t_ambient) / (t_max - t_ambient), 0.0, 1.0)


def downsample_mean(values, out_w, out_h):
    """Box-average a 2D field to (out_h, out_w); dims must divide evenly."""
    h, w = values.shape
    if h % out_h or w % out_w:
        raise ValueError(f"cannot box-average {w}x{h} to {out_w}x{out_h}: "
                         "factors must be integral")
    return values.reshape(out_h, h // out_h, out_w, w // out_w).mean(axis=(1, 3))


def render_thermal(temp_grid, resolution=None, t_ambient=T_AMBIENT_K, t_max=None):
    """Temperature grid -> thermal-gradient rgb raster, box-averaged to the
    target resolution when one is given."""
    field = temp_grid.as_2d().astype(np.float64)
    if resolution is not None and (resolution[0] != temp_grid.width
                                   or resolution[1] != temp_grid.height):
        field = downsample_mean(field, resolution[0], resolution[1])
    return colorize(normalize_temperature(field, t_ambient, t_max), THERMAL_STOPS)


def blend_thermal(base, thermal, alpha=1.0):
    """Additive fusion: out = clamp(base/255 + alpha*thermal/255, 0, 1)*255.

    Computed as clamp(base + alpha*thermal, 0, 255) on float64, which is the
    same expression with the /255 factored out, so a black thermal layer
    reproduces the base byte-for-byte.
    """
    if base.shape != thermal.shape:
        raise ValueError(f"raster dims differ: {base.shape} vs {thermal.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    out = base.astype(np.float64) + alpha * thermal.astype(np.float64)
    return np.rint(np.clip(out, 0.0, 255.0)).astype(np.uint8)


def render_intensity(flux_grid, extrema):
    """Flux grid -> intensity heatmap. Zero cells get the neutral background;
    positive cells run the light-yellow -> red ramp on normalized flux."""
    f_min, f_max = extrema
    vals = flux_grid.as_2d().astype(np.float64)
    if f_max > f_min:
        t = np.clip((vals - f_min) / (f_max - f_min), 0.0, 1.0)
    else:
        t = np.ones_like(vals)
    rgb = colorize(t, INTENSITY_STOPS)
    rgb[vals <= 0.0] = INTENSITY_BACKGROUND
    return rgb


def _fuel_rgb(vals, max_fuel=None):
    if max_fuel is None:
        max_fuel = float(vals.max())
    t = np.clip(vals / max_fuel, 0.0, 1.0) if max_fuel > 0 else np.zeros_like(vals)
    rgb = np.zeros(vals.shape + (3,), dtype=np.uint8)
    rgb[..., 1] = np.rint(255.0 * t).astype(np.uint8)
    return rgb


def render_fuel(canopy_grid, max_fuel=None):
    """Canopy grid -> green-ramp raster (denser fuel = greener)."""
    return _fuel_rgb(canopy_grid.as_2d().astype(np.float64), max_fuel)


def fuel_minimap(canopy_grid, resolution=None):
    """Fuel raster box-averaged to a target resolution; the stand-in base
    layer for thermal fusion when no aerial imagery is supplied."""
    vals = canopy_grid.as_2d().astype(np.float64)
    if resolution is not None and (resolution[0] != canopy_grid.width
                                   or resolution[1] != canopy_grid.height):
        vals = downsample_mean(vals, resolution[0], resolution[1])
    return _fuel_rgb(vals)


def camera_rays(camera, width, height):
    """Pinhole ray directions for a (width x height) image.

    yaw 0 looks north (+y), 90 east (+x); pitch -90 is straight down; fov is
    the horizontal field of view.
    """
    yaw = math.radians(camera.yaw)
    pitch = math.radians(camera.pitch)
    fwd = np.array([math.sin(yaw) * math.cos(pitch),
                    math.cos(yaw) * math.cos(pitch),
                    math.sin(pitch)])
    right = np.array([math.cos(yaw), -math.sin(yaw), 0.0])
    up = np.cross(right, fwd)
    half = math.tan(math.radians(camera.fov) / 2.0)
    xs = (2.0 * (np.arange(width) + 0.5) / width - 1.0) * half
    ys = (1.0 - 2.0 * (np.arange(height) + 0.5) / height) * half * (height / width)
    gx, gy = np.meshgrid(xs, ys)
    dirs = (fwd[None, None, :] + gx[..., None] * right[None, None, :]
            + gy[..., None] * up[None, None, :])
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    return dirs.reshape(-1, 3)


def _uniform_axis(axis, label):
    d = np.diff(axis)
    step = d.mean()
    if np.abs(d - step).max() > abs(step) * 0.01:
        raise ValueError(f"{label} axis is not uniform enough for terrain sampling")
    return float(axis[0]), float(step)


def render_depth(camera, georef, resolution=(128, 128), t_max=60000.0,
                 backend=None):
    """Per-pixel ray/heightfield intersection distance in meters.

    Terrain is the bilinearly interpolated elevation grid, extended past its
    extent with edge-clamped heights. Misses are +inf. Raises when the
    camera starts below the terrain.
    """
    impl = kernels.backend_module(backend) if backend else kernels.impl
    width, height = resolution
    xs, ys = georef.local_axes()
    if ys[0] > ys[-1]:  # kernel expects ascending axes
        ys = ys[::-1]
        elev = georef.local_z().reshape(georef.height, georef.width)[::-1]
    else:
        elev = georef.local_z().reshape(georef.height, georef.width)
    if xs[0] > xs[-1]:
        xs = xs[::-1]
        elev = elev[:, ::-1]
    x0, dx = _uniform_axis(xs, "east")
    y0, dy = _uniform_axis(ys, "north")
    dirs = camera_rays(camera, width, height)
    cam = camera.position
    depth = impl.raymarch_depth(
        np.ascontiguousarray(elev, dtype=np.float64), x0, y0, dx, dy,
        cam.x, cam.y, cam.z,
        np.ascontiguousarray(dirs[:, 0]), np.ascontiguousarray(dirs[:, 1]),
        np.ascontiguousarray(dirs[:, 2]),
        t_max, 0.5, 0.5, 4096, 48)
    if np.isnan(depth).any():
        raise ValueError("camera is below the terrain surface")
    return depth.reshape(height, width).astype(np.float32)


# ---------------------------------------------------------------------------
# raster IO
# ---------------------------------------------------------------------------

def write_ppm(path, rgb):
    """Binary P6 PPM, the golden-file format."""
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def read_ppm(path):
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P6"):
        raise ValueError(f"{path}: not a binary PPM")
    parts = data.split(b"\n", 3)
    w, h = (int(v) for v in parts[1].split())
    pixels = np.frombuffer(parts[3], dtype=np.uint8, count=w * h * 3)
    return pixels.reshape(h, w, 3).copy()


def encode_png(rgb):
    from io import BytesIO

    from PIL import Image

    buf = BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def write_png(path, rgb):
    with open(path, "wb") as f:
        f.write(encode_png(rgb))


def depth_to_rgb(depth):
    """Visualization helper: near = bright, misses = black."""
    finite = np.isfinite(depth)
    out = np.zeros(depth.shape + (3,), dtype=np.uint8)
    if finite.any():
        d = depth[finite]
        lo, hi = float(d.min()), float(d.max())
        t = (d - lo) / (hi - lo) if hi > lo else np.zeros_like(d)
        g = np.rint(255.0 * (1.0 - t)).astype(np.uint8)
        for ch in range(3):
            out[finite, ch] = g
    return out


def write_depth_f32(path, depth):
    np.asarray(depth, dtype="<f4").tofile(path)
