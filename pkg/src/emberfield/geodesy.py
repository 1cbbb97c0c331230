"""Geodetic <-> local scene-frame conversion.

The scene frame is east-north-up (ENU) in meters on a tangent plane anchored
at the scenario origin, using WGS84 radii of curvature evaluated at the
origin latitude. For fire-domain extents (tens of km) the small-angle form
is accurate and, unlike a full ECEF chain, exactly invertible.
"""

import math
from dataclasses import dataclass

import numpy as np

WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)


@dataclass(frozen=True)
class GeodeticPoint:
    lat: float
    lon: float
    h: float = 0.0

    def __post_init__(self):
        if not (abs(self.lat) <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat}")
        if not (abs(self.lon) <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class LocalPoint:
    x: float  # meters east
    y: float  # meters north
    z: float  # meters up

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("local point components must be finite")


def curvature_radii(lat_deg):
    """WGS84 meridian (M) and prime-vertical (N) radii of curvature."""
    s = math.sin(math.radians(lat_deg))
    w2 = 1.0 - WGS84_E2 * s * s
    m = WGS84_A * (1.0 - WGS84_E2) / (w2 * math.sqrt(w2))
    n = WGS84_A / math.sqrt(w2)
    return m, n


def plane_scales(origin):
    """Meters-per-radian factors (east, north) of the tangent plane at origin.

    Shared by the scalar conversions and the vectorized grid paths so both
    produce identical floats.
    """
    m, n = curvature_radii(origin.lat)
    k_east = n * math.cos(math.radians(origin.lat))
    return k_east, m


def to_local(p, origin):
    """Geodetic point -> ENU meters relative to origin."""
    k_east, k_north = plane_scales(origin)
    x = math.radians(p.lon - origin.lon) * k_east
    y = math.radians(p.lat - origin.lat) * k_north
    return LocalPoint(x, y, p.h - origin.h)


def to_geo(v, origin):
    """ENU meters relative to origin -> geodetic point (inverse of to_local)."""
    k_east, k_north = plane_scales(origin)
    lon = origin.lon + math.degrees(v.x / k_east)
    lat = origin.lat + math.degrees(v.y / k_north)
    return GeodeticPoint(lat, lon, origin.h + v.z)


class GeoReference:
    """Per-grid geolocation: one latitude per row, one longitude per column,
    a row-major elevation field, and the scenario origin."""

    def __init__(self, latitudes, longitudes, elevations, origin):
        self.latitudes = np.asarray(latitudes, dtype=np.float64)
        self.longitudes = np.asarray(longitudes, dtype=np.float64)
        self.elevations = np.asarray(elevations, dtype=np.float64)
        self.origin = origin
        self.height = self.latitudes.shape[0]
        self.width = self.longitudes.shape[0]
        if self.elevations.shape != (self.height * self.width,):
            raise ValueError(
                f"elevation length {self.elevations.shape[0]} != "
                f"width*height {self.width * self.height}"
            )
        for name, axis in (("latitudes", self.latitudes), ("longitudes", self.longitudes)):
            d = np.diff(axis)
            if not ((d > 0).all() or (d < 0).all()):
                raise ValueError(f"{name} must be strictly monotonic")
        if np.abs(self.latitudes).max() > 90.0:
            raise ValueError("latitude out of range")
        if np.abs(self.longitudes).max() > 180.0:
            raise ValueError("longitude out of range")

    def local_axes(self):
        """Vectorized to_local of the axis arrays: (xs[width], ys[height]).

        Valid because the tangent plane maps lon only to x and lat only to y.
        """
        k_east, k_north = plane_scales(self.origin)
        xs = np.radians(self.longitudes - self.origin.lon) * k_east
        ys = np.radians(self.latitudes - self.origin.lat) * k_north
        return xs, ys

    def local_z(self):
        """Elevations as scene-frame z, row-major."""
        return self.elevations - self.origin.h

    def cell_spacing(self):
        """Mean |east, north| spacing between neighboring cell centers, meters."""
        xs, ys = self.local_axes()
        sx = float(np.abs(np.diff(xs)).mean()) if self.width > 1 else 0.0
        sy = float(np.abs(np.diff(ys)).mean()) if self.height > 1 else 0.0
        return sx, sy


def cell_geodetic(georef, x, y):
    """Geodetic position of grid cell (column x, row y)."""
    if not (0 <= x < georef.width):
        raise IndexError(f"column {x} out of range [0, {georef.width})")
    if not (0 <= y < georef.height):
        raise IndexError(f"row {y} out of range [0, {georef.height})")
    return GeodeticPoint(
        float(georef.latitudes[y]),
        float(georef.longitudes[x]),
        float(georef.elevations[y * georef.width + x]),
    )
