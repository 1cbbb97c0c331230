import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emberfield.geodesy import (GeodeticPoint, GeoReference, LocalPoint,
                                cell_geodetic, curvature_radii, to_geo, to_local)

ORIGIN = GeodeticPoint(38.8, -120.5, 1200.0)

# meridian radius of curvature at 38.8 deg times one arcsecond, evaluated
# with 40-digit arithmetic from the WGS84 constants
ARCSEC_NORTH_METERS = 30.83657436080725


def test_identity_at_origin():
    v = to_local(ORIGIN, ORIGIN)
    assert (v.x, v.y, v.z) == (0.0, 0.0, 0.0)


def test_pure_vertical_offset():
    p = GeodeticPoint(ORIGIN.lat, ORIGIN.lon, ORIGIN.h + 100.0)
    v = to_local(p, ORIGIN)
    assert (v.x, v.y, v.z) == (0.0, 0.0, 100.0)
    back = to_geo(LocalPoint(0.0, 0.0, -70.0), ORIGIN)
    assert back.lat == ORIGIN.lat and back.lon == ORIGIN.lon
    assert back.h == ORIGIN.h - 70.0


def test_arcsecond_north():
    p = GeodeticPoint(ORIGIN.lat + 1.0 / 3600.0, ORIGIN.lon, ORIGIN.h)
    v = to_local(p, ORIGIN)
    assert v.y == pytest.approx(ARCSEC_NORTH_METERS, abs=1e-6)
    assert v.x == 0.0


def test_to_geo_identity():
    assert to_geo(LocalPoint(0.0, 0.0, 0.0), ORIGIN) == ORIGIN


def test_roundtrip_50km_grid():
    rng = np.random.default_rng(3)
    for _ in range(200):
        ang = rng.uniform(0, 2 * math.pi)
        r = rng.uniform(0, 50_000.0)
        v = LocalPoint(r * math.cos(ang), r * math.sin(ang), rng.uniform(-500, 3000))
        p = to_geo(v, ORIGIN)
        w = to_local(p, ORIGIN)
        assert abs(p.lat - to_geo(w, ORIGIN).lat) < 1e-9
        assert abs(w.x - v.x) < 1e-4
        assert abs(w.y - v.y) < 1e-4
        assert abs(w.z - v.z) < 1e-9


@settings(max_examples=100, deadline=None)
@given(dlat=st.floats(-0.4, 0.4), dlon=st.floats(-0.5, 0.5),
       h=st.floats(-100.0, 4000.0))
def test_roundtrip_property(dlat, dlon, h):
    p = GeodeticPoint(ORIGIN.lat + dlat, ORIGIN.lon + dlon, h)
    q = to_geo(to_local(p, ORIGIN), ORIGIN)
    assert abs(q.lat - p.lat) < 1e-9
    assert abs(q.lon - p.lon) < 1e-9
    assert abs(q.h - p.h) < 1e-4


def test_axis_orthogonality():
    eps = 1e-6  # degrees
    v_lon = to_local(GeodeticPoint(ORIGIN.lat, ORIGIN.lon + eps, ORIGIN.h), ORIGIN)
    v_lat = to_local(GeodeticPoint(ORIGIN.lat + eps, ORIGIN.lon, ORIGIN.h), ORIGIN)
    assert abs(v_lon.y) < 0.001 * abs(v_lon.x)
    assert abs(v_lat.x) < 0.001 * abs(v_lat.y)


def test_curvature_radii_reasonable():
    m, n = curvature_radii(38.8)
    assert 6.3e6 < m < 6.4e6
    assert 6.3e6 < n < 6.4e6
    assert n > m  # prime-vertical radius exceeds meridian radius off the poles


def test_geodetic_validation():
    with pytest.raises(ValueError):
        GeodeticPoint(91.0, 0.0)
    with pytest.raises(ValueError):
        GeodeticPoint(0.0, 181.0)
    with pytest.raises(ValueError):
        LocalPoint(float("nan"), 0.0, 0.0)


def _tiny_georef():
    w, h = 4, 3
    lat = ORIGIN.lat + np.arange(h) * 1e-3
    lon = ORIGIN.lon + np.arange(w) * 1e-3
    elev = ORIGIN.h + np.arange(w * h, dtype=float)
    return GeoReference(lat, lon, elev, ORIGIN)


def test_cell_geodetic_corner():
    g = _tiny_georef()
    p = cell_geodetic(g, 0, 0)
    assert p.lat == g.latitudes[0]
    assert p.lon == g.longitudes[0]
    assert p.h == g.elevations[0]


def test_cell_geodetic_bounds():
    g = _tiny_georef()
    with pytest.raises(IndexError):
        cell_geodetic(g, g.width, 0)
    with pytest.raises(IndexError):
        cell_geodetic(g, 0, g.height)


def test_cell_geodetic_indexing_oracle():
    g = _tiny_georef()
    # brute-force 2D -> 1D index oracle
    flat = {(x, y): y * g.width + x for y in range(g.height) for x in range(g.width)}
    for (x, y), i in flat.items():
        assert cell_geodetic(g, x, y).h == g.elevations[i]


def test_georef_monotonicity_enforced():
    lat = [38.8, 38.8, 38.9]
    lon = [-120.5, -120.4]
    with pytest.raises(ValueError):
        GeoReference(lat, lon, np.zeros(6), ORIGIN)


def test_local_axes_match_scalar_path(flux_georef):
    xs, ys = flux_georef.local_axes()
    for x_idx in (0, flux_georef.width // 2, flux_georef.width - 1):
        p = cell_geodetic(flux_georef, x_idx, 0)
        v = to_local(p, flux_georef.origin)
        assert xs[x_idx] == pytest.approx(v.x, rel=1e-12, abs=1e-9)
    for y_idx in (0, flux_georef.height // 2, flux_georef.height - 1):
        p = cell_geodetic(flux_georef, 0, y_idx)
        v = to_local(p, flux_georef.origin)
        assert ys[y_idx] == pytest.approx(v.y, rel=1e-12, abs=1e-9)
