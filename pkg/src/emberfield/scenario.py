"""Scenario datasets on disk: manifest, binary grids, synthetic generation.

A scenario is a directory holding one ``scenario.json`` manifest plus
headerless little-endian float32 grid files (row-major, dimensions owned by
the manifest). Axis arrays are one float per row/column. The synthetic
generator writes a complete, deterministic, non-physical dataset so every
test and demo runs without real fire-model output.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from . import kernels
from .geodesy import GeodeticPoint, GeoReference, plane_scales

MANIFEST_NAME = "scenario.json"
EXTREMA_NAME = "extrema.json"
FRAME_FIELD = "####"

GRID_KINDS = ("flux", "temperature", "surface_fuel", "canopy_fuel")
PER_FRAME_KINDS = ("flux", "temperature")

# fuel grids are denser than flux grids by this factor along each axis
FUEL_REFINE = 5


class ManifestError(ValueError):
    """Malformed or inconsistent scenario manifest."""


class GridError(ValueError):
    """Grid file missing, truncated, or containing non-finite values."""


@dataclass
class ScenarioManifest:
    name: str
    grid_flux: tuple  # (width, height)
    grid_fuel: tuple
    frame_count: int
    frame_interval_s: float
    origin: GeodeticPoint
    seed: int
    root: object  # pathlib.Path of the scenario directory
    files: dict  # field -> relative path (flux/temp hold a #### pattern)

    def path_for(self, field, frame=None):
        rel = self.files[field]
        if FRAME_FIELD in rel:
            if frame is None:
                raise ManifestError(f"field {field!r} needs a frame index")
            rel = rel.replace(FRAME_FIELD, f"{frame:04d}")
        return self.root / rel


@dataclass(frozen=True)
class ScalarGrid:
    width: int
    height: int
    values: np.ndarray  # float32, row-major, index = y*width + x
    kind: str

    def value_at(self, x, y):
        return float(self.values[y * self.width + x])

    def as_2d(self):
        return self.values.reshape(self.height, self.width)


_PATH_FIELDS = ("lat", "lon", "elev", "fuel_lat", "fuel_lon", "fuel_elev",
                "flux", "temp", "surface_fuel", "canopy_fuel")

_DEFAULT_FILES = {
    "lat": "lat.f32",
    "lon": "lon.f32",
    "elev": "elev.f32",
    "fuel_lat": "fuel_lat.f32",
    "fuel_lon": "fuel_lon.f32",
    "fuel_elev": "fuel_elev.f32",
    "flux": "flux_####.f32",
    "temp": "temp_####.f32",
    "surface_fuel": "surface_fuel.f32",
    "canopy_fuel": "canopy_fuel.f32",
}


def _expect(cond, message):
    if not cond:
        raise ManifestError(message)


def load_manifest(path):
    """Read and fully validate a scenario manifest.

    ``path`` may be the scenario directory or the manifest file itself.
    Validation covers field presence, dimension/count invariants, and the
    existence and exact byte length of every referenced grid file.
    """
    from pathlib import Path

    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ManifestError(f"malformed manifest {path}: {e}") from e

    for field in ("name", "grid_flux_w", "grid_flux_h", "grid_fuel_w", "grid_fuel_h",
                  "frame_count", "frame_interval_s", "origin_lat", "origin_lon",
                  "origin_h", "seed"):
        _expect(field in raw, f"manifest missing field {field!r}")

    files = {}
    for field in _PATH_FIELDS:
        _expect(field in raw, f"manifest missing path field {field!r}")
        files[field] = raw[field]

    man = ScenarioManifest(
        name=str(raw["name"]),
        grid_flux=(int(raw["grid_flux_w"]), int(raw["grid_flux_h"])),
        grid_fuel=(int(raw["grid_fuel_w"]), int(raw["grid_fuel_h"])),
        frame_count=int(raw["frame_count"]),
        frame_interval_s=float(raw["frame_interval_s"]),
        origin=GeodeticPoint(float(raw["origin_lat"]), float(raw["origin_lon"]),
                             float(raw["origin_h"])),
        seed=int(raw["seed"]),
        root=path.parent,
        files=files,
    )

    _expect(man.frame_count >= 1, f"frame_count must be >= 1, got {man.frame_count}")
    for label, (w, h) in (("grid_flux", man.grid_flux), ("grid_fuel", man.grid_fuel)):
        _expect(w >= 1 and h >= 1, f"{label} dimensions must be >= 1, got {w}x{h}")

    def check_len(field, n_floats, frame=None):
        p = man.path_for(field, frame)
        if not p.is_file():
            raise ManifestError(f"{field}: referenced file missing: {p}")
        size = p.stat().st_size
        if size != n_floats * 4:
            raise ManifestError(
                f"{field}: {p.name} is {size} bytes, expected {n_floats * 4} "
                f"({n_floats} float32 values)")

    fw, fh = man.grid_flux
    uw, uh = man.grid_fuel
    check_len("lat", fh)
    check_len("lon", fw)
    check_len("elev", fw * fh)
    check_len("fuel_lat", uh)
    check_len("fuel_lon", uw)
    check_len("fuel_elev", uw * uh)
    check_len("surface_fuel", uw * uh)
    check_len("canopy_fuel", uw * uh)
    for frame in range(man.frame_count):
        check_len("flux", fw * fh, frame)
        check_len("temp", fw * fh, frame)
    return man


def read_f32(path, n_expected=None):
    data = np.fromfile(path, dtype="<f4")
    if n_expected is not None and data.shape[0] != n_expected:
        raise GridError(f"{path}: has {data.shape[0]} float32 values, expected {n_expected}")
    return data


def write_f32(path, values):
    np.asarray(values, dtype="<f4").tofile(path)


def _check_finite(values, width, path):
    bad = ~np.isfinite(values)
    if bad.any():
        flat = int(np.flatnonzero(bad)[0])
        x, y = flat % width, flat // width
        raise GridError(f"{path}: non-finite value at cell X={x}, Y={y}")


def load_grid(manifest, kind, frame=None):
    """Load one validated grid. ``frame`` applies to per-frame kinds only."""
    if kind not in GRID_KINDS:
        raise GridError(f"unknown grid kind {kind!r}")
    per_frame = kind in PER_FRAME_KINDS
    if per_frame:
        if frame is None:
            raise GridError(f"{kind} grids are per-frame; pass a frame index")
        if not (0 <= frame < manifest.frame_count):
            raise GridError(
                f"frame {frame} out of range [0, {manifest.frame_count})")
    w, h = manifest.grid_flux if per_frame else manifest.grid_fuel
    field = {"flux": "flux", "temperature": "temp",
             "surface_fuel": "surface_fuel", "canopy_fuel": "canopy_fuel"}[kind]
    path = manifest.path_for(field, frame if per_frame else None)
    values = read_f32(path, w * h)
    _check_finite(values, w, path)
    values.setflags(write=False)
    return ScalarGrid(width=w, height=h, values=values, kind=kind)


def load_georef(manifest, which="flux"):
    """Geo-reference for the flux or fuel grid family."""
    if which == "flux":
        w, h = manifest.grid_flux
        lat_f, lon_f, elev_f = "lat", "lon", "elev"
    elif which == "fuel":
        w, h = manifest.grid_fuel
        lat_f, lon_f, elev_f = "fuel_lat", "fuel_lon", "fuel_elev"
    else:
        raise ValueError(f"which must be 'flux' or 'fuel', got {which!r}")
    lat = read_f32(manifest.path_for(lat_f), h).astype(np.float64)
    lon = read_f32(manifest.path_for(lon_f), w).astype(np.float64)
    elev = read_f32(manifest.path_for(elev_f), w * h).astype(np.float64)
    for arr, path in ((lat, lat_f), (lon, lon_f), (elev, elev_f)):
        if not np.isfinite(arr).all():
            raise GridError(f"{path}: contains non-finite values")
    return GeoReference(lat, lon, elev, manifest.origin)


def positive_flux_extrema(manifest):
    """Scenario-global (min, max) over strictly positive flux, all frames."""
    from .emitters import flux_extrema

    try:
        return flux_extrema(load_grid(manifest, "flux", k)
                            for k in range(manifest.frame_count))
    except ValueError as e:
        raise GridError(str(e)) from e


def ensure_extrema(manifest):
    """Load the cached flux-extrema sidecar, computing and writing it once."""
    sidecar = manifest.root / EXTREMA_NAME
    if sidecar.is_file():
        raw = json.loads(sidecar.read_text())
        return float(raw["f_min"]), float(raw["f_max"])
    f_min, f_max = positive_flux_extrema(manifest)
    sidecar.write_text(json.dumps({"f_min": f_min, "f_max": f_max}, indent=2) + "\n")
    return f_min, f_max


# ---------------------------------------------------------------------------
# synthetic scenario generation
# ---------------------------------------------------------------------------

DEFAULT_ORIGIN = GeodeticPoint(38.8, -120.5, 1200.0)
FLUX_CELL_M = 250.0  # flux-grid cell spacing, meters


def _axis_latlon(origin, n, spacing_m, k_scale):
    """Cell-center axis in degrees: offsets (i+0.5)*spacing mapped through
    the tangent-plane scale (meters per radian)."""
    offs = (np.arange(n, dtype=np.float64) + 0.5) * spacing_m
    return np.degrees(offs / k_scale)


def _smooth_field(seed, w, h, channel, window):
    """Keyed white noise in [0,1), box-smoothed, and min-max rescaled."""
    ys, xs = np.mgrid[0:h, 0:w]
    u = kernels.hash_u01(seed, xs.ravel().astype(np.uint64),
                         ys.ravel().astype(np.uint64), channel)
    field = uniform_filter(u.reshape(h, w), size=window, mode="nearest")
    lo, hi = field.min(), field.max()
    if hi > lo:
        field = (field - lo) / (hi - lo)
    else:
        field = np.zeros_like(field)
    return field


def _elevation(seed, xs, ys, base_h):
    """Smooth analytic terrain evaluated at cell centers (meters)."""
    ph = kernels.hash_u01(seed, np.arange(4, dtype=np.uint64),
                          np.zeros(4, dtype=np.uint64), 101) * 2.0 * np.pi
    xg, yg = np.meshgrid(xs, ys)
    span = max(xs[-1] - xs[0], ys[-1] - ys[0], 1.0)
    z = (base_h
         + 45.0 * np.sin(2.0 * np.pi * xg / span + ph[0]) * np.cos(2.0 * np.pi * yg / span + ph[1])
         + 20.0 * np.sin(4.0 * np.pi * (xg + yg) / span + ph[2])
         + 10.0 * np.cos(6.0 * np.pi * (xg - yg) / span + ph[3]))
    return z


def generate_synthetic(out_dir, seed, dims=(144, 144), frames=10,
                       wind=(0.0, 0.0), name=None, origin=DEFAULT_ORIGIN,
                       frame_interval_s=60.0):
    """Write a complete synthetic scenario and return its manifest.

    Fuel fields come from smoothed seeded noise; flux frames from an
    elliptical wind-biased growth front over fuel-bearing cells; temperature
    rides on flux above a 300 K ambient. Output is a pure function of the
    arguments (re-runs are byte-identical). Explicitly non-physical: it
    exists so everything downstream can run without real model output.
    """
    from pathlib import Path

    w, h = int(dims[0]), int(dims[1])
    if w < 4 or h < 4:
        raise ValueError(f"dims must be at least 4x4, got {w}x{h}")
    frames = int(frames)
    if frames < 1:
        raise ValueError(f"frames must be >= 1, got {frames}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = int(seed)
    name = name or f"synthetic-{seed}"

    uw, uh = w * FUEL_REFINE, h * FUEL_REFINE
    fuel_cell = FLUX_CELL_M / FUEL_REFINE
    k_east, k_north = plane_scales(origin)

    lon = origin.lon + _axis_latlon(origin, w, FLUX_CELL_M, k_east)
    lat = origin.lat + _axis_latlon(origin, h, FLUX_CELL_M, k_north)
    fuel_lon = origin.lon + _axis_latlon(origin, uw, fuel_cell, k_east)
    fuel_lat = origin.lat + _axis_latlon(origin, uh, fuel_cell, k_north)

    xs_f = (np.arange(w) + 0.5) * FLUX_CELL_M
    ys_f = (np.arange(h) + 0.5) * FLUX_CELL_M
    xs_u = (np.arange(uw) + 0.5) * fuel_cell
    ys_u = (np.arange(uh) + 0.5) * fuel_cell
    elev = _elevation(seed, xs_f, ys_f, origin.h)
    fuel_elev = _elevation(seed, xs_u, ys_u, origin.h)

    canopy_raw = _smooth_field(seed, uw, uh, 1, window=max(9, uw // 24))
    canopy = np.clip(canopy_raw * 3.2 - 0.4, 0.0, 2.5)
    surface_raw = _smooth_field(seed, uw, uh, 2, window=max(9, uw // 20))
    surface = np.clip(surface_raw * 2.0 - 0.25, 0.0, 1.5)

    # coarse fuel mask: block-mean canopy down to the flux grid
    coarse = canopy.reshape(h, FUEL_REFINE, w, FUEL_REFINE).mean(axis=(1, 3))
    burnable = coarse > 0.05

    # ignition: burnable cell nearest the grid center
    cy, cx = np.nonzero(burnable)
    if cy.size == 0:
        burnable[h // 2, w // 2] = True
        cy, cx = np.array([h // 2]), np.array([w // 2])
    d_center = (cx - w / 2.0) ** 2 + (cy - h / 2.0) ** 2
    pick = int(np.argmin(d_center))
    ign_x, ign_y = int(cx[pick]), int(cy[pick])

    # wind-biased elliptical distance from the ignition cell, in cells
    wind_to_deg, wind_speed = float(wind[0]), float(wind[1])
    az = math.radians(wind_to_deg)
    gx, gy = np.meshgrid(np.arange(w, dtype=np.float64),
                         np.arange(h, dtype=np.float64))
    dx = gx - ign_x
    dy = gy - ign_y
    along = dx * math.sin(az) + dy * math.cos(az)
    cross = dx * math.cos(az) - dy * math.sin(az)
    stretch = 1.0 + 0.12 * wind_speed
    shrink = 1.0 + 0.06 * wind_speed
    scaled_along = np.where(along >= 0.0, along / stretch, along * shrink)
    e_dist = np.hypot(scaled_along, cross)

    cell_noise = kernels.hash_u01(seed, gx.ravel().astype(np.uint64),
                                  gy.ravel().astype(np.uint64), 3).reshape(h, w)
    noise_factor = 0.7 + 0.6 * cell_noise

    files = dict(_DEFAULT_FILES)
    write_f32(out / files["lat"], lat)
    write_f32(out / files["lon"], lon)
    write_f32(out / files["elev"], elev.ravel())
    write_f32(out / files["fuel_lat"], fuel_lat)
    write_f32(out / files["fuel_lon"], fuel_lon)
    write_f32(out / files["fuel_elev"], fuel_elev.ravel())
    write_f32(out / files["surface_fuel"], surface.ravel())
    write_f32(out / files["canopy_fuel"], canopy.ravel())

    r0, growth, tail = 2.5, 1.25, 6.0
    peak = 80.0
    for k in range(frames):
        radius = r0 + growth * k
        inside = (e_dist <= radius) & burnable
        profile = np.exp(-(radius - e_dist) / tail)
        flux = np.where(inside, peak * profile * noise_factor, 0.0)
        temp = 300.0 + 2.5 * flux
        write_f32(out / f"flux_{k:04d}.f32", flux.ravel())
        write_f32(out / f"temp_{k:04d}.f32", temp.ravel())

    doc = {
        "name": name,
        "grid_flux_w": w, "grid_flux_h": h,
        "grid_fuel_w": uw, "grid_fuel_h": uh,
        "frame_count": frames,
        "frame_interval_s": frame_interval_s,
        "origin_lat": origin.lat, "origin_lon": origin.lon, "origin_h": origin.h,
        "seed": seed,
        **files,
    }
    (out / MANIFEST_NAME).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return load_manifest(out)
