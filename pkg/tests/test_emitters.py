import numpy as np
import pytest

from emberfield.emitters import (EmitterConfig, FireEmitter, build_emitters,
                                 flux_extrema, map_scale, normalize_flux,
                                 shape_response)
from emberfield.geodesy import GeodeticPoint, GeoReference, to_local, cell_geodetic
from emberfield.scenario import ScalarGrid

ORIGIN = GeodeticPoint(38.8, -120.5, 1200.0)

# 0.5 ** 1.5 evaluated with 40-digit arithmetic
HALF_POW_15 = 0.3535533905932738


def _cfg(f_min=10.0, f_max=110.0):
    return EmitterConfig(f_min=f_min, f_max=f_max)


def _georef(w, h, spacing_deg=1e-3):
    lat = ORIGIN.lat + np.arange(h) * spacing_deg
    lon = ORIGIN.lon + np.arange(w) * spacing_deg
    elev = ORIGIN.h + np.linspace(0, 50, w * h)
    return GeoReference(lat, lon, elev, ORIGIN)


def _grid(values, w, h):
    return ScalarGrid(width=w, height=h,
                      values=np.asarray(values, dtype=np.float32).ravel(), kind="flux")


def test_normalize_endpoints():
    cfg = _cfg()
    assert normalize_flux(cfg.f_min, cfg) == 0.0
    assert normalize_flux(cfg.f_max, cfg) == 1.0
    mid = cfg.f_min + 0.5 * (cfg.f_max - cfg.f_min)
    assert normalize_flux(mid, cfg) == 0.5


def test_normalize_clamps():
    cfg = _cfg()
    assert normalize_flux(cfg.f_min - 50.0, cfg) == 0.0
    assert normalize_flux(cfg.f_max + 50.0, cfg) == 1.0


def test_normalize_degenerate_extrema():
    cfg = EmitterConfig(f_min=5.0, f_max=5.0)
    assert normalize_flux(5.0, cfg) == 1.0
    assert normalize_flux(0.01, cfg) == 1.0


def test_shape_response_fixed_points():
    assert shape_response(0.0) == 0.0
    assert shape_response(1.0) == 1.0


def test_shape_response_exact_eighth():
    # (1/4)^1.5 = 1/8 exactly
    assert shape_response(0.25) == 0.125


def test_shape_response_half():
    assert shape_response(0.5) == pytest.approx(HALF_POW_15, rel=1e-15)


def test_shape_response_domain():
    with pytest.raises(ValueError):
        shape_response(1.5)


def test_map_scale_endpoints():
    lo, hi = (100.0,) * 3, (150.0,) * 3
    assert map_scale(0.0, lo, hi) == (100.0, 100.0, 100.0)
    assert map_scale(1.0, lo, hi) == (150.0, 150.0, 150.0)
    assert map_scale(1.0, (100.0,) * 3, (500.0,) * 3) == (500.0, 500.0, 500.0)


def test_config_validation():
    with pytest.raises(ValueError):
        EmitterConfig(f_min=10.0, f_max=5.0)
    with pytest.raises(ValueError):
        EmitterConfig(f_min=0.0, f_max=1.0, exponent=0.0)
    with pytest.raises(ValueError):
        EmitterConfig(f_min=0.0, f_max=1.0, scale_min=(2, 2, 2), scale_max=(1, 1, 1))


def test_flux_extrema_single_frame():
    g = _grid([0.0, 2.0, 5.0], 3, 1)
    assert flux_extrema([g]) == (2.0, 5.0)


def test_flux_extrema_across_frames():
    a = _grid([0.0, 1.0], 2, 1)
    b = _grid([3.0, 0.0], 2, 1)
    assert flux_extrema([a, b]) == (1.0, 3.0)


def test_flux_extrema_all_zero():
    with pytest.raises(ValueError, match="no positive flux"):
        flux_extrema([_grid([0.0, 0.0], 2, 1)])


def test_build_all_positive_count():
    w = h = 20
    rng = np.random.default_rng(1)
    grid = _grid(rng.uniform(10.0, 110.0, w * h), w, h)
    es = build_emitters(grid, _georef(w, h), _cfg())
    assert len(es) == w * h


def test_build_all_zero_empty():
    w = h = 8
    es = build_emitters(_grid(np.zeros(w * h), w, h), _georef(w, h), _cfg())
    assert len(es) == 0


def test_build_sparse_ids_match_bruteforce():
    w, h = 7, 5
    values = np.zeros(w * h, dtype=np.float32)
    cells = [(2, 1), (6, 0), (3, 4)]
    for x, y in cells:
        values[y * w + x] = 42.0
    es = build_emitters(_grid(values, w, h), _georef(w, h), _cfg())
    # brute-force scan oracle over the same grid
    expected_ids = sorted(y * w + x for x, y in cells)
    assert list(es.ids) == expected_ids
    assert len(es) == 3


def test_positions_match_scalar_pipeline():
    w, h = 6, 4
    georef = _georef(w, h)
    values = np.arange(1, w * h + 1, dtype=np.float32)
    es = build_emitters(_grid(values, w, h), georef, _cfg(1.0, float(w * h)))
    for i in (0, 5, 11, len(es) - 1):
        e = es.emitter(i)
        x, y = e.cell
        expected = to_local(cell_geodetic(georef, x, y), ORIGIN)
        assert e.position.x == pytest.approx(expected.x, rel=1e-12, abs=1e-9)
        assert e.position.y == pytest.approx(expected.y, rel=1e-12, abs=1e-9)
        assert e.position.z == pytest.approx(expected.z, rel=1e-12, abs=1e-9)


def test_scalar_pipeline_matches_vector():
    cfg = _cfg()
    w = 10
    values = np.linspace(cfg.f_min, cfg.f_max, w).astype(np.float32)
    es = build_emitters(_grid(values, w, 1), _georef(w, 1), cfg)
    for i in range(len(es)):
        e = es.emitter(i)
        f_norm = normalize_flux(e.flux, cfg)
        f_curved = shape_response(f_norm, cfg.exponent)
        assert e.f_curved == pytest.approx(f_curved, rel=1e-14)
        assert e.scale == pytest.approx(map_scale(f_curved, cfg.scale_min,
                                                  cfg.scale_max), rel=1e-14)


def test_endpoint_scales_exact():
    cfg = _cfg()
    values = np.array([cfg.f_min, cfg.f_max], dtype=np.float32)
    es = build_emitters(_grid(values, 2, 1), _georef(2, 1), cfg)
    assert tuple(es.scale[0]) == (100.0, 100.0, 100.0)
    assert tuple(es.scale[1]) == (150.0, 150.0, 150.0)
    assert tuple(es.color[0]) == (100.0, 100.0, 100.0)
    assert tuple(es.color[1]) == (500.0, 500.0, 500.0)


def test_monotonicity_random_pairs():
    cfg = _cfg()
    rng = np.random.default_rng(2)
    f = rng.uniform(cfg.f_min, cfg.f_max, 2000).astype(np.float32)
    es = build_emitters(_grid(f, 2000, 1), _georef(2000, 1), cfg)
    order = np.argsort(es.flux)
    s = es.scale[order]
    assert (np.diff(s, axis=0) >= -1e-12).all()


def test_scale_bounds_under_outliers():
    cfg = _cfg(10.0, 20.0)
    values = np.array([0.001, 5.0, 500.0, 15.0], dtype=np.float32)
    es = build_emitters(_grid(values, 4, 1), _georef(4, 1), cfg)
    assert (es.scale >= 100.0).all() and (es.scale <= 150.0).all()


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="does not match"):
        build_emitters(_grid(np.ones(12), 4, 3), _georef(3, 4), _cfg())


def test_traversal_order_independence():
    """Row-major build equals a brute-force per-cell scan in any order."""
    w, h = 9, 6
    rng = np.random.default_rng(3)
    values = (rng.uniform(-20, 80, w * h)).astype(np.float32)
    georef = _georef(w, h)
    cfg = _cfg(1.0, 80.0)
    es = build_emitters(_grid(values, w, h), georef, cfg)
    # column-major brute force
    records = {}
    for x in range(w):
        for y in range(h):
            fl = float(values[y * w + x])
            if fl <= 0.0:
                continue
            records[y * w + x] = fl
    assert sorted(records) == list(es.ids)
    for i in range(len(es)):
        assert records[int(es.ids[i])] == pytest.approx(float(es.flux[i]))


def test_export_text_stable():
    w = 4
    values = np.array([0, 3.5, 7.25, 12], dtype=np.float32)
    es = build_emitters(_grid(values, w, 1), _georef(w, 1), _cfg(1.0, 12.0))
    a = es.export_text(frame=0)
    b = es.export_text(frame=0)
    assert a == b
    assert '"count":3' in a


def test_emitter_view_fields():
    values = np.array([55.0], dtype=np.float32)
    es = build_emitters(_grid(values, 1, 1), _georef(1, 1), _cfg())
    e = es.emitter(0)
    assert isinstance(e, FireEmitter)
    assert e.id == 0 and e.cell == (0, 0)
    assert e.flux == 55.0
    assert 0.0 <= e.f_curved <= 1.0
    assert e.lod is None  # scheduler assigns tiers
