"""Fuel-driven procedural vegetation placement.

Canopy fuel classifies each cell (large/medium/small tree or bare); the
normalized fuel value drives base scale; jitter, yaw, per-category scale
multiplier, growth variation and model choice all come from a counter-based
keyed RNG hashed on (seed, cell, channel). Statelessness makes generation
order-independent and embarrassingly parallel, and editing one cell's fuel
can never move any other cell's trees.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from . import kernels
from .geodesy import LocalPoint

GRASS_SCALE = (100.0, 100.0, 100.0)
GRASS_DROP = 70.0  # scene units below cell ground

# order-independent digest accumulator seed (FNV-1a 64 offset basis);
# this is also the published digest of an empty forest
EMPTY_FOREST_DIGEST = 0xCBF29CE484222325

_MASK64 = 0xFFFFFFFFFFFFFFFF


class TreeCategory(IntEnum):
    LARGE = 0
    MEDIUM = 1
    SMALL = 2


@dataclass(frozen=True)
class ForestConfig:
    canopy_floor: float = 0.01
    medium_threshold: float = 0.8
    large_threshold: float = 1.6
    scale_mult_ranges: tuple = ((1.1, 1.4), (0.9, 1.2), (0.7, 1.0))  # LARGE, MEDIUM, SMALL
    base_scale_range: tuple = (6.0, 18.0)
    variation_range: tuple = (0.8, 1.2)
    jitter: float = 0.45  # fraction of cell spacing
    max_fuel: float = None  # None -> grid maximum at generation time
    spawn_grass: bool = True
    model_counts: tuple = (2, 4, 4)  # LARGE, MEDIUM, SMALL variants
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.canopy_floor < self.medium_threshold < self.large_threshold):
            raise ValueError("need 0 < canopy_floor < medium_threshold < large_threshold")
        if not self.jitter < 0.5:
            raise ValueError("jitter must keep instances inside their cell (< 0.5)")


@dataclass(frozen=True)
class TreeInstance:
    cell: tuple
    category: TreeCategory
    model_index: int
    position: LocalPoint
    yaw: float
    scale: float


@dataclass(frozen=True)
class GrassInstance:
    cell: tuple
    position: LocalPoint
    yaw: float
    scale: tuple = GRASS_SCALE


def classify_fuel(canopy_fuel, cfg=ForestConfig()):
    """Tree category for a canopy fuel value, or None below the spawn floor."""
    if canopy_fuel <= cfg.canopy_floor:
        return None
    if canopy_fuel >= cfg.large_threshold:
        return TreeCategory.LARGE
    if canopy_fuel >= cfg.medium_threshold:
        return TreeCategory.MEDIUM
    return TreeCategory.SMALL


class ForestSet:
    """Struct-of-arrays tree and grass instances for one scenario."""

    def __init__(self, tree_cell_x, tree_cell_y, tree_category, tree_model,
                 tree_pos, tree_yaw, tree_scale,
                 grass_cell_x, grass_cell_y, grass_pos, grass_yaw):
        self.tree_cell_x = tree_cell_x
        self.tree_cell_y = tree_cell_y
        self.tree_category = tree_category
        self.tree_model = tree_model
        self.tree_pos = tree_pos
        self.tree_yaw = tree_yaw
        self.tree_scale = tree_scale
        self.grass_cell_x = grass_cell_x
        self.grass_cell_y = grass_cell_y
        self.grass_pos = grass_pos
        self.grass_yaw = grass_yaw

    @property
    def tree_count(self):
        return self.tree_cell_x.shape[0]

    @property
    def grass_count(self):
        return self.grass_cell_x.shape[0]

    def counts(self):
        out = {cat.name: int((self.tree_category == int(cat)).sum())
               for cat in TreeCategory}
        out["GRASS"] = self.grass_count
        return out

    def tree(self, i):
        return TreeInstance(
            cell=(int(self.tree_cell_x[i]), int(self.tree_cell_y[i])),
            category=TreeCategory(int(self.tree_category[i])),
            model_index=int(self.tree_model[i]),
            position=LocalPoint(*map(float, self.tree_pos[i])),
            yaw=float(self.tree_yaw[i]),
            scale=float(self.tree_scale[i]),
        )

    def grass(self, i):
        return GrassInstance(
            cell=(int(self.grass_cell_x[i]), int(self.grass_cell_y[i])),
            position=LocalPoint(*map(float, self.grass_pos[i])),
            yaw=float(self.grass_yaw[i]),
        )

    def export_text(self):
        """Instance table: kind, cell, category, model, x, y, z, yaw, scale."""
        lines = ["kind\tcell_x\tcell_y\tcategory\tmodel\tx\ty\tz\tyaw\tscale"]
        for i in range(self.tree_count):
            lines.append("tree\t%d\t%d\t%s\t%d\t%r\t%r\t%r\t%r\t%r" % (
                int(self.tree_cell_x[i]), int(self.tree_cell_y[i]),
                TreeCategory(int(self.tree_category[i])).name,
                int(self.tree_model[i]),
                float(self.tree_pos[i, 0]), float(self.tree_pos[i, 1]),
                float(self.tree_pos[i, 2]),
                float(self.tree_yaw[i]), float(self.tree_scale[i])))
        for i in range(self.grass_count):
            lines.append("grass\t%d\t%d\t-\t-\t%r\t%r\t%r\t%r\t-" % (
                int(self.grass_cell_x[i]), int(self.grass_cell_y[i]),
                float(self.grass_pos[i, 0]), float(self.grass_pos[i, 1]),
                float(self.grass_pos[i, 2]), float(self.grass_yaw[i])))
        return "\n".join(lines) + "\n"


def _mix64_scalar(z):
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _mix64_vec(z):
    u = np.uint64
    z = (z ^ (z >> u(30))) * u(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> u(27))) * u(0x94D049BB133111EB)
    return z ^ (z >> u(31))


def _digest_records(kind_tag, cell_x, cell_y, fields):
    """Sum of per-record mixes; addition makes the digest order-independent."""
    u = np.uint64
    h = np.full(cell_x.shape[0], kind_tag, dtype=np.uint64)
    h = _mix64_vec(h ^ (cell_x.astype(np.uint64) * u(0x9E3779B97F4A7C15)))
    h = _mix64_vec(h ^ (cell_y.astype(np.uint64) * u(0xC2B2AE3D27D4EB4F)))
    for arr in fields:
        if np.issubdtype(arr.dtype, np.floating):
            bits = np.asarray(arr, dtype=np.float64).view(np.uint64)
        else:
            bits = arr.astype(np.uint64)
        h = _mix64_vec(h ^ (bits * u(0x165667B19E3779F9)))
    return int(np.sum(h, dtype=np.uint64))


def forest_digest(forest):
    """64-bit reproducibility fingerprint, independent of instance order."""
    d = EMPTY_FOREST_DIGEST
    if forest.tree_count:
        d = (d + _digest_records(
            1, forest.tree_cell_x, forest.tree_cell_y,
            (forest.tree_category, forest.tree_model,
             forest.tree_pos[:, 0], forest.tree_pos[:, 1], forest.tree_pos[:, 2],
             forest.tree_yaw, forest.tree_scale))) & _MASK64
    if forest.grass_count:
        d = (d + _digest_records(
            2, forest.grass_cell_x, forest.grass_cell_y,
            (forest.grass_pos[:, 0], forest.grass_pos[:, 1], forest.grass_pos[:, 2],
             forest.grass_yaw))) & _MASK64
    return d


def _resolve_max_fuel(cfg, canopy_values):
    if cfg.max_fuel is not None:
        return cfg
    return replace(cfg, max_fuel=float(np.asarray(canopy_values).max()))


def _sample_trees(impl, canopy_vals, cell_x, cell_y, georef, cfg, spacing):
    category, model, dx, dy, yaw, scale = impl.tree_sample(
        canopy_vals, cell_x, cell_y, cfg.seed,
        cfg.large_threshold, cfg.medium_threshold,
        [r[0] for r in cfg.scale_mult_ranges], [r[1] for r in cfg.scale_mult_ranges],
        cfg.base_scale_range[0], cfg.base_scale_range[1], cfg.max_fuel,
        cfg.variation_range[0], cfg.variation_range[1],
        list(cfg.model_counts), cfg.jitter * spacing[0], cfg.jitter * spacing[1])
    xs, ys = georef.local_axes()
    zs = georef.local_z()
    pos = np.empty((cell_x.shape[0], 3), dtype=np.float64)
    pos[:, 0] = xs[cell_x] + dx
    pos[:, 1] = ys[cell_y] + dy
    pos[:, 2] = zs[cell_y * georef.width + cell_x]
    return category, model, pos, yaw, scale


def _sample_grass(impl, cell_x, cell_y, georef, cfg, spacing):
    dx, dy, yaw = impl.grass_sample(cell_x, cell_y, cfg.seed,
                                    cfg.jitter * spacing[0], cfg.jitter * spacing[1])
    xs, ys = georef.local_axes()
    zs = georef.local_z()
    pos = np.empty((cell_x.shape[0], 3), dtype=np.float64)
    pos[:, 0] = xs[cell_x] + dx
    pos[:, 1] = ys[cell_y] + dy
    pos[:, 2] = zs[cell_y * georef.width + cell_x] - GRASS_DROP
    return pos, yaw


def place_tree(x, y, canopy_fuel, georef, cfg):
    """Single-cell tree placement; None when fuel is at or below the floor.

    cfg.max_fuel must be resolved (generate_forest resolves it from the grid;
    for direct calls pass an explicit value).
    """
    if cfg.max_fuel is None:
        raise ValueError("place_tree needs cfg.max_fuel resolved")
    if canopy_fuel <= cfg.canopy_floor:
        return None
    spacing = georef.cell_spacing()
    cell_x = np.asarray([x], dtype=np.int64)
    cell_y = np.asarray([y], dtype=np.int64)
    vals = np.asarray([canopy_fuel], dtype=np.float64)
    category, model, pos, yaw, scale = _sample_trees(
        kernels.impl, vals, cell_x, cell_y, georef, cfg, spacing)
    return TreeInstance(cell=(x, y), category=TreeCategory(int(category[0])),
                        model_index=int(model[0]),
                        position=LocalPoint(*map(float, pos[0])),
                        yaw=float(yaw[0]), scale=float(scale[0]))


def generate_forest(canopy, surface, georef, cfg=ForestConfig(),
                    parallel=False, backend=None):
    """Place trees and grass for a whole fuel grid.

    One optional tree per cell (canopy above floor) and, when enabled, one
    grass instance per cell with positive surface fuel. ``parallel`` splits
    the grid into row bands; the keyed RNG makes the merged result identical
    to sequential execution.
    """
    if (canopy.width, canopy.height) != (georef.width, georef.height):
        raise ValueError("canopy grid does not match geo-reference dimensions")
    if (surface.width, surface.height) != (canopy.width, canopy.height):
        raise ValueError("surface grid does not match canopy grid dimensions")
    impl = kernels.backend_module(backend) if backend else kernels.impl
    cfg = _resolve_max_fuel(cfg, canopy.values)
    spacing = georef.cell_spacing()
    w, h = canopy.width, canopy.height

    cvals = np.asarray(canopy.values, dtype=np.float64)
    svals = np.asarray(surface.values, dtype=np.float64)

    tree_flat = np.flatnonzero(cvals > cfg.canopy_floor).astype(np.int64)
    grass_flat = (np.flatnonzero(svals > 0.0).astype(np.int64)
                  if cfg.spawn_grass else np.empty(0, dtype=np.int64))

    def tree_band(flat):
        cx = flat % w
        cy = flat // w
        return _sample_trees(impl, cvals[flat], cx, cy, georef, cfg, spacing)

    def grass_band(flat):
        cx = flat % w
        cy = flat // w
        return (cx, cy) + _sample_grass(impl, cx, cy, georef, cfg, spacing)

    if parallel and (tree_flat.size + grass_flat.size) > 0:
        n_bands = 4
        tree_parts = np.array_split(tree_flat, n_bands)
        grass_parts = np.array_split(grass_flat, n_bands)
        with ThreadPoolExecutor(max_workers=n_bands) as ex:
            tree_res = list(ex.map(tree_band, tree_parts))
            grass_res = list(ex.map(grass_band, grass_parts))
        category = np.concatenate([r[0] for r in tree_res])
        model = np.concatenate([r[1] for r in tree_res])
        tpos = np.concatenate([r[2] for r in tree_res])
        tyaw = np.concatenate([r[3] for r in tree_res])
        tscale = np.concatenate([r[4] for r in tree_res])
        gcx = np.concatenate([r[0] for r in grass_res])
        gcy = np.concatenate([r[1] for r in grass_res])
        gpos = np.concatenate([r[2] for r in grass_res])
        gyaw = np.concatenate([r[3] for r in grass_res])
    else:
        category, model, tpos, tyaw, tscale = tree_band(tree_flat)
        gcx, gcy, gpos, gyaw = grass_band(grass_flat)

    return ForestSet(
        tree_cell_x=(tree_flat % w), tree_cell_y=(tree_flat // w),
        tree_category=category, tree_model=model,
        tree_pos=tpos, tree_yaw=tyaw, tree_scale=tscale,
        grass_cell_x=gcx, grass_cell_y=gcy, grass_pos=gpos, grass_yaw=gyaw)
