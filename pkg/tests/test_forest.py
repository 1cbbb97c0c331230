import numpy as np
import pytest

from emberfield.forest import (EMPTY_FOREST_DIGEST, ForestConfig, ForestSet,
                               TreeCategory, classify_fuel, forest_digest,
                               generate_forest, place_tree)
from emberfield.geodesy import GeodeticPoint, GeoReference
from emberfield.scenario import ScalarGrid

ORIGIN = GeodeticPoint(38.8, -120.5, 1200.0)

SCALE_LO = 6.0 * 0.7 * 0.8    # 3.36
SCALE_HI = 18.0 * 1.4 * 1.2   # 30.24


def _georef(w, h, spacing_deg=5e-4):
    lat = ORIGIN.lat + np.arange(h) * spacing_deg
    lon = ORIGIN.lon + np.arange(w) * spacing_deg
    elev = ORIGIN.h + np.zeros(w * h)
    return GeoReference(lat, lon, elev, ORIGIN)


def _grid(values, w, h, kind="canopy_fuel"):
    return ScalarGrid(width=w, height=h,
                      values=np.asarray(values, dtype=np.float32).ravel(), kind=kind)


def _noise_canopy(w, h, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.4, (h, w)).astype(np.float32)


def test_classify_boundaries():
    assert classify_fuel(1.6) == TreeCategory.LARGE
    assert classify_fuel(2.5) == TreeCategory.LARGE
    assert classify_fuel(0.8) == TreeCategory.MEDIUM
    assert classify_fuel(0.79) == TreeCategory.SMALL
    assert classify_fuel(1.5999) == TreeCategory.MEDIUM
    assert classify_fuel(0.011) == TreeCategory.SMALL
    assert classify_fuel(0.01) is None  # strict inequality at the floor
    assert classify_fuel(0.0) is None


def test_config_validation():
    with pytest.raises(ValueError):
        ForestConfig(canopy_floor=0.9, medium_threshold=0.8)
    with pytest.raises(ValueError):
        ForestConfig(jitter=0.5)


def test_place_tree_below_floor():
    cfg = ForestConfig(seed=1, max_fuel=2.4)
    assert place_tree(3, 4, 0.0, _georef(8, 8), cfg) is None
    assert place_tree(3, 4, 0.01, _georef(8, 8), cfg) is None


def test_place_tree_requires_resolved_max_fuel():
    with pytest.raises(ValueError, match="max_fuel"):
        place_tree(0, 0, 1.0, _georef(4, 4), ForestConfig(seed=1))


def test_place_tree_deterministic():
    cfg = ForestConfig(seed=42, max_fuel=2.4)
    g = _georef(16, 16)
    a = place_tree(5, 9, 1.7, g, cfg)
    b = place_tree(5, 9, 1.7, g, cfg)
    assert a == b
    c = place_tree(5, 9, 1.7, g, ForestConfig(seed=43, max_fuel=2.4))
    assert c != a


def test_base_scale_at_max_fuel():
    """With multiplier and variation forced to 1, scale is exactly the top of
    the base range at full fuel."""
    cfg = ForestConfig(seed=1, max_fuel=2.0,
                       scale_mult_ranges=((1.0, 1.0), (1.0, 1.0), (1.0, 1.0)),
                       variation_range=(1.0, 1.0))
    t = place_tree(2, 2, 2.0, _georef(8, 8), cfg)
    assert t.scale == 18.0
    t2 = place_tree(2, 2, 4.0, _georef(8, 8), cfg)  # clamped above max_fuel
    assert t2.scale == 18.0


def test_category_matches_classify():
    cfg = ForestConfig(seed=3, max_fuel=2.4)
    g = _georef(8, 8)
    for fuel in (0.02, 0.5, 0.8, 1.2, 1.6, 2.3):
        t = place_tree(1, 1, fuel, g, cfg)
        assert t.category == classify_fuel(fuel, cfg)


def test_model_index_within_category_count():
    cfg = ForestConfig(seed=5, max_fuel=2.4)
    g = _georef(64, 64)
    counts = {TreeCategory.LARGE: 2, TreeCategory.MEDIUM: 4, TreeCategory.SMALL: 4}
    rng = np.random.default_rng(0)
    for _ in range(300):
        x = int(rng.integers(0, 64))
        y = int(rng.integers(0, 64))
        fuel = float(rng.uniform(0.02, 2.4))
        t = place_tree(x, y, fuel, g, cfg)
        assert 0 <= t.model_index < counts[t.category]


def test_generate_counts_match_bruteforce():
    w = h = 64
    canopy = _noise_canopy(w, h, seed=11)
    surface = _noise_canopy(w, h, seed=12) * 0.6
    cfg = ForestConfig(seed=9)
    forest = generate_forest(_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"),
                             _georef(w, h), cfg)
    # brute-force cell-count oracle
    n_trees = sum(1 for v in canopy.ravel() if v > 0.01)
    n_grass = sum(1 for v in surface.ravel() if v > 0.0)
    assert forest.tree_count == n_trees
    assert forest.grass_count == n_grass
    counts = forest.counts()
    assert counts["LARGE"] == sum(1 for v in canopy.ravel() if v >= 1.6)
    assert counts["MEDIUM"] == sum(1 for v in canopy.ravel() if 0.8 <= v < 1.6)
    assert counts["SMALL"] == sum(1 for v in canopy.ravel() if 0.01 < v < 0.8)


def test_zero_surface_no_grass():
    w = h = 16
    canopy = _noise_canopy(w, h)
    forest = generate_forest(_grid(canopy, w, h),
                             _grid(np.zeros((h, w)), w, h, "surface_fuel"),
                             _georef(w, h), ForestConfig(seed=1))
    assert forest.grass_count == 0


def test_spawn_grass_flag():
    w = h = 16
    canopy = _noise_canopy(w, h)
    surface = np.ones((h, w))
    forest = generate_forest(_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"),
                             _georef(w, h), ForestConfig(seed=1, spawn_grass=False))
    assert forest.grass_count == 0


def test_grass_offset_and_scale():
    w = h = 8
    canopy = np.zeros((h, w))
    surface = np.ones((h, w))
    georef = _georef(w, h)
    forest = generate_forest(_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"),
                             georef, ForestConfig(seed=2))
    assert forest.tree_count == 0
    zs = georef.local_z()
    for i in range(forest.grass_count):
        g = forest.grass(i)
        x, y = g.cell
        ground = zs[y * w + x]
        assert g.position.z == pytest.approx(ground - 70.0)
        assert g.scale == (100.0, 100.0, 100.0)
        assert 0.0 <= g.yaw < 360.0


def test_empty_digest_constant():
    empty = ForestSet(
        tree_cell_x=np.empty(0, dtype=np.int64), tree_cell_y=np.empty(0, dtype=np.int64),
        tree_category=np.empty(0, dtype=np.int8), tree_model=np.empty(0, dtype=np.int64),
        tree_pos=np.empty((0, 3)), tree_yaw=np.empty(0), tree_scale=np.empty(0),
        grass_cell_x=np.empty(0, dtype=np.int64), grass_cell_y=np.empty(0, dtype=np.int64),
        grass_pos=np.empty((0, 3)), grass_yaw=np.empty(0))
    assert forest_digest(empty) == EMPTY_FOREST_DIGEST


def test_digest_deterministic_and_seed_sensitive():
    w = h = 32
    canopy = _noise_canopy(w, h, seed=5)
    surface = _noise_canopy(w, h, seed=6)
    args = (_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"), _georef(w, h))
    d1 = forest_digest(generate_forest(*args, ForestConfig(seed=100)))
    d2 = forest_digest(generate_forest(*args, ForestConfig(seed=100)))
    d3 = forest_digest(generate_forest(*args, ForestConfig(seed=101)))
    assert d1 == d2
    assert d1 != d3


def test_parallel_equals_sequential():
    w = h = 48
    canopy = _noise_canopy(w, h, seed=21)
    surface = _noise_canopy(w, h, seed=22)
    args = (_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"), _georef(w, h))
    seq = generate_forest(*args, ForestConfig(seed=77), parallel=False)
    par = generate_forest(*args, ForestConfig(seed=77), parallel=True)
    assert forest_digest(seq) == forest_digest(par)
    assert np.array_equal(seq.tree_scale, par.tree_scale)
    assert np.array_equal(seq.grass_pos, par.grass_pos)


def test_per_cell_locality():
    """Changing one cell's fuel only changes that cell's instances."""
    w = h = 16
    canopy = _noise_canopy(w, h, seed=31)
    canopy[canopy <= 0.011] = 0.5  # all cells spawn, keeps indices aligned
    surface = np.ones((h, w), dtype=np.float32)
    cfg = ForestConfig(seed=55, max_fuel=2.4)
    georef = _georef(w, h)
    base = generate_forest(_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"),
                           georef, cfg)
    tweaked = canopy.copy()
    tweaked[7, 3] = 2.2  # push cell (3, 7) to LARGE
    changed = generate_forest(_grid(tweaked, w, h),
                              _grid(surface, w, h, "surface_fuel"), georef, cfg)
    assert base.tree_count == changed.tree_count
    target = 7 * w + 3
    for i in range(base.tree_count):
        cell_id = int(base.tree_cell_y[i]) * w + int(base.tree_cell_x[i])
        same = (base.tree_scale[i] == changed.tree_scale[i]
                and base.tree_category[i] == changed.tree_category[i])
        if cell_id == target:
            assert not same
        else:
            assert same


def test_scale_bounds_and_large_category_sanity():
    w = h = 64
    canopy = _noise_canopy(w, h, seed=41)
    surface = np.zeros((h, w))
    forest = generate_forest(_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"),
                             _georef(w, h), ForestConfig(seed=8, max_fuel=2.4))
    assert (forest.tree_scale >= SCALE_LO).all()
    assert (forest.tree_scale <= SCALE_HI).all()
    large = forest.tree_category == int(TreeCategory.LARGE)
    cells = forest.tree_cell_y[large] * w + forest.tree_cell_x[large]
    assert (canopy.ravel()[cells] >= 1.6).all()


def test_jitter_containment():
    w = h = 24
    canopy = np.full((h, w), 1.0, dtype=np.float32)
    georef = _georef(w, h)
    forest = generate_forest(_grid(canopy, w, h),
                             _grid(np.zeros((h, w)), w, h, "surface_fuel"),
                             georef, ForestConfig(seed=13))
    xs, ys = georef.local_axes()
    sx, sy = georef.cell_spacing()
    for i in range(forest.tree_count):
        x, y = int(forest.tree_cell_x[i]), int(forest.tree_cell_y[i])
        assert abs(forest.tree_pos[i, 0] - xs[x]) < 0.5 * sx
        assert abs(forest.tree_pos[i, 1] - ys[y]) < 0.5 * sy


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="does not match"):
        generate_forest(_grid(np.ones((4, 4)), 4, 4),
                        _grid(np.ones((4, 4)), 4, 4, "surface_fuel"),
                        _georef(5, 5), ForestConfig(seed=1))


def test_export_text_shape():
    w = h = 6
    canopy = np.full((h, w), 1.0, dtype=np.float32)
    forest = generate_forest(_grid(canopy, w, h),
                             _grid(np.ones((h, w)), w, h, "surface_fuel"),
                             _georef(w, h), ForestConfig(seed=3))
    text = forest.export_text()
    lines = text.strip().split("\n")
    assert lines[0].startswith("kind\t")
    assert len(lines) == 1 + forest.tree_count + forest.grass_count


def test_backend_equivalence():
    from emberfield import kernels

    if kernels.backend_module("compiled") is None:
        pytest.skip("compiled backend not built")
    w = h = 40
    canopy = _noise_canopy(w, h, seed=51)
    surface = _noise_canopy(w, h, seed=52)
    args = (_grid(canopy, w, h), _grid(surface, w, h, "surface_fuel"), _georef(w, h))
    a = generate_forest(*args, ForestConfig(seed=5), backend="python")
    b = generate_forest(*args, ForestConfig(seed=5), backend="compiled")
    assert forest_digest(a) == forest_digest(b)
    assert np.array_equal(a.tree_pos, b.tree_pos)
