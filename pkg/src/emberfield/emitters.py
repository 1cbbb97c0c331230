"""Fire emitter field: flux grid -> positioned, scaled, color-weighted emitters.

Per positive-flux cell: normalize flux against dataset extrema (clamped
linear map), shape it with a power curve to lift low-intensity fire without
saturating the high end, then interpolate scale and color vectors between
configured endpoints. Emitter ids are the row-major cell index, so output
is independent of traversal order.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geodesy import LocalPoint

DEFAULT_EXPONENT = 1.5
DEFAULT_SCALE_MIN = (100.0, 100.0, 100.0)
DEFAULT_SCALE_MAX = (150.0, 150.0, 150.0)
DEFAULT_COLOR_MIN = (100.0, 100.0, 100.0)
DEFAULT_COLOR_MAX = (500.0, 500.0, 500.0)


@dataclass(frozen=True)
class EmitterConfig:
    f_min: float
    f_max: float
    exponent: float = DEFAULT_EXPONENT
    scale_min: tuple = DEFAULT_SCALE_MIN
    scale_max: tuple = DEFAULT_SCALE_MAX
    color_min: tuple = DEFAULT_COLOR_MIN
    color_max: tuple = DEFAULT_COLOR_MAX

    def __post_init__(self):
        if self.f_max < self.f_min:
            raise ValueError(f"f_max {self.f_max} < f_min {self.f_min}")
        if not self.exponent > 0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")
        for lo, hi, label in ((self.scale_min, self.scale_max, "scale"),
                              (self.color_min, self.color_max, "color")):
            if len(lo) != 3 or len(hi) != 3:
                raise ValueError(f"{label} bounds must be 3-vectors")
            if any(h < l for l, h in zip(lo, hi)):
                raise ValueError(f"{label}_max must be >= {label}_min componentwise")


@dataclass
class FireEmitter:
    id: int
    cell: tuple
    position: LocalPoint
    flux: float
    f_curved: float
    scale: tuple
    color_scale: tuple
    lod: int = None
    particle_mult: float = None
    active: bool = False


def normalize_flux(f, cfg):
    """Clamped linear normalization of flux to [0, 1].

    With degenerate extrema (f_max == f_min) every positive flux maps to 1.0:
    a single-intensity fire rather than an error.
    """
    if cfg.f_max <= cfg.f_min:
        return 1.0
    t = (f - cfg.f_min) / (cfg.f_max - cfg.f_min)
    return min(max(t, 0.0), 1.0)


def shape_response(f_norm, exponent=DEFAULT_EXPONENT):
    """Power-curve shaping of normalized flux."""
    if not 0.0 <= f_norm <= 1.0:
        raise ValueError(f"f_norm must be in [0, 1], got {f_norm}")
    return f_norm ** exponent


def map_scale(f_curved, lo, hi):
    """Componentwise linear interpolation between two 3-vectors."""
    return tuple(l + (h - l) * f_curved for l, h in zip(lo, hi))


def flux_extrema(frames):
    """(min, max) over the strictly positive values of all frames.

    Zero cells never spawn emitters, so they are excluded; this keeps the
    weakest burning cell above exactly-zero visual intensity.
    """
    f_min = np.inf
    f_max = -np.inf
    seen = False
    for grid in frames:
        seen = True
        pos = grid.values[grid.values > 0.0]
        if pos.size:
            f_min = min(f_min, float(pos.min()))
            f_max = max(f_max, float(pos.max()))
    if not seen:
        raise ValueError("flux_extrema needs at least one frame")
    if not np.isfinite(f_min):
        raise ValueError("no positive flux in any frame")
    return f_min, f_max


class EmitterSet:
    """Struct-of-arrays emitter collection for one frame."""

    def __init__(self, ids, cell_x, cell_y, pos, flux, f_norm, f_curved, scale, color):
        self.ids = ids
        self.cell_x = cell_x
        self.cell_y = cell_y
        self.pos = pos        # (n, 3) east/north/up meters
        self.flux = flux
        self.f_norm = f_norm
        self.f_curved = f_curved
        self.scale = scale    # (n, 3)
        self.color = color    # (n, 3)

    def __len__(self):
        return self.ids.shape[0]

    def emitter(self, i):
        """Materialize one emitter record."""
        return FireEmitter(
            id=int(self.ids[i]),
            cell=(int(self.cell_x[i]), int(self.cell_y[i])),
            position=LocalPoint(*map(float, self.pos[i])),
            flux=float(self.flux[i]),
            f_curved=float(self.f_curved[i]),
            scale=tuple(map(float, self.scale[i])),
            color_scale=tuple(map(float, self.color[i])),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self.emitter(i)

    def rows(self):
        """Canonical per-emitter rows for export and wire payloads."""
        out = []
        for i in range(len(self)):
            out.append([
                int(self.ids[i]), int(self.cell_x[i]), int(self.cell_y[i]),
                float(self.pos[i, 0]), float(self.pos[i, 1]), float(self.pos[i, 2]),
                float(self.flux[i]), float(self.f_curved[i]),
                float(self.scale[i, 0]), float(self.scale[i, 1]), float(self.scale[i, 2]),
                float(self.color[i, 0]), float(self.color[i, 1]), float(self.color[i, 2]),
            ])
        return out

    def export_text(self, frame=None):
        """Deterministic JSON dump used for golden files and wire bodies.

        Columns: id, X, Y, x, y, z, flux, f_curved, scale xyz, color xyz.
        """
        doc = {"frame": frame, "count": len(self), "emitters": self.rows()}
        return json.dumps(doc, separators=(",", ":"), sort_keys=True)


def build_emitters(flux_grid, georef, cfg, backend=None):
    """One emitter per strictly-positive flux cell; ids are row-major indices."""
    if (flux_grid.width, flux_grid.height) != (georef.width, georef.height):
        raise ValueError(
            f"flux grid {flux_grid.width}x{flux_grid.height} does not match "
            f"geo-reference {georef.width}x{georef.height}")
    impl = kernels.backend_module(backend) if backend else kernels.impl
    values = np.asarray(flux_grid.values, dtype=np.float64)
    ids = np.flatnonzero(values > 0.0).astype(np.int64)
    w = flux_grid.width
    cell_x = ids % w
    cell_y = ids // w
    flux = values[ids]

    f_norm, f_curved, scale, color = impl.emitter_math(
        flux, cfg.f_min, cfg.f_max, cfg.exponent,
        cfg.scale_min, cfg.scale_max, cfg.color_min, cfg.color_max)

    xs, ys = georef.local_axes()
    zs = georef.local_z()
    pos = np.empty((ids.shape[0], 3), dtype=np.float64)
    pos[:, 0] = xs[cell_x]
    pos[:, 1] = ys[cell_y]
    pos[:, 2] = zs[ids]

    return EmitterSet(ids=ids, cell_x=cell_x, cell_y=cell_y, pos=pos,
                      flux=flux, f_norm=f_norm, f_curved=f_curved,
                      scale=scale, color=color)
