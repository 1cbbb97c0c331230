"""Fire-station decision support: station registry, asset search, proximity
ranking, and named teleport anchors for the operator console."""

import json
import math
from dataclasses import dataclass

import numpy as np

from .geodesy import GeodeticPoint, LocalPoint, to_local
from .scheduler import CameraPose

OPERATIONAL_MODES = ("ground", "aerial", "mixed")
AVAILABILITY_STATES = ("available", "deployed", "maintenance")

FIRE_ORIGIN_ANCHOR = "fire-origin"


class StationError(ValueError):
    """Malformed station fixture record."""


@dataclass(frozen=True)
class FireAsset:
    name: str
    coverage_area: float  # hectares
    budget: float
    tonnage: float
    operational_mode: str
    availability: str
    personnel: int


@dataclass(frozen=True)
class FireStation:
    id: int
    name: str
    location: GeodeticPoint
    photo: str = None
    assets: tuple = ()


@dataclass(frozen=True)
class AssetQuery:
    min_coverage: float = None
    max_budget: float = None
    min_tonnage: float = None
    mode: str = None
    availability: str = None

    def matches(self, asset):
        if self.min_coverage is not None and asset.coverage_area < self.min_coverage:
            return False
        if self.max_budget is not None and asset.budget > self.max_budget:
            return False
        if self.min_tonnage is not None and asset.tonnage < self.min_tonnage:
            return False
        if self.mode is not None and asset.operational_mode != self.mode:
            return False
        if self.availability is not None and asset.availability != self.availability:
            return False
        return True


def _parse_asset(raw, where):
    for f in ("name", "coverage_area", "budget", "tonnage",
              "operational_mode", "availability", "personnel"):
        if f not in raw:
            raise StationError(f"{where}: asset missing field {f!r}")
    for f in ("coverage_area", "budget", "tonnage", "personnel"):
        if float(raw[f]) < 0:
            raise StationError(f"{where}: asset field {f!r} must be nonnegative")
    if raw["operational_mode"] not in OPERATIONAL_MODES:
        raise StationError(f"{where}: bad operational_mode {raw['operational_mode']!r}")
    if raw["availability"] not in AVAILABILITY_STATES:
        raise StationError(f"{where}: bad availability {raw['availability']!r}")
    return FireAsset(name=str(raw["name"]), coverage_area=float(raw["coverage_area"]),
                     budget=float(raw["budget"]), tonnage=float(raw["tonnage"]),
                     operational_mode=raw["operational_mode"],
                     availability=raw["availability"], personnel=int(raw["personnel"]))


def load_stations(path):
    """Load and validate the station fixture (JSON; see README for the format)."""
    try:
        raw = json.loads(open(path).read())
    except json.JSONDecodeError as e:
        raise StationError(f"{path}: malformed fixture: {e}") from e
    stations = []
    seen_ids = set()
    for i, rec in enumerate(raw.get("stations", [])):
        where = f"{path}: station #{i}"
        for f in ("id", "name", "lat", "lon"):
            if f not in rec:
                raise StationError(f"{where}: missing field {f!r}")
        sid = int(rec["id"])
        if sid in seen_ids:
            raise StationError(f"{where}: duplicate station id {sid}")
        seen_ids.add(sid)
        loc = GeodeticPoint(float(rec["lat"]), float(rec["lon"]),
                            float(rec.get("h", 0.0)))
        assets = tuple(_parse_asset(a, f"{where} asset #{j}")
                       for j, a in enumerate(rec.get("assets", [])))
        stations.append(FireStation(id=sid, name=str(rec["name"]), location=loc,
                                    photo=rec.get("photo"), assets=assets))
    return stations


def search_assets(stations, query=AssetQuery()):
    """Conjunction of the provided filters; an empty query returns every
    asset. Results sorted by (station id, asset name)."""
    out = []
    for st in stations:
        for asset in st.assets:
            if query.matches(asset):
                out.append((st, asset))
    out.sort(key=lambda pair: (pair[0].id, pair[1].name))
    return out


def nearest_stations(point, stations, k):
    """k stations closest to ``point`` on the local tangent plane, ascending
    distance, ties broken by station id. Returns (station, meters) pairs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = []
    for st in stations:
        v = to_local(st.location, point)
        d = math.sqrt(v.x * v.x + v.y * v.y + v.z * v.z)
        ranked.append((d, st.id, st))
    ranked.sort(key=lambda r: (r[0], r[1]))
    return [(st, d) for d, _, st in ranked[:k]]


def fire_origin_pose(flux_grid, georef, altitude=1500.0):
    """Camera above the flux-weighted centroid of frame-0 burning cells,
    looking straight down."""
    vals = flux_grid.as_2d().astype(np.float64)
    ys, xs = np.nonzero(vals > 0.0)
    if xs.size == 0:
        raise ValueError("frame has no positive flux to anchor on")
    wsum = vals[ys, xs]
    ax, ay = georef.local_axes()
    cx = float((ax[xs] * wsum).sum() / wsum.sum())
    cy = float((ay[ys] * wsum).sum() / wsum.sum())
    zs = georef.local_z().reshape(georef.height, georef.width)
    ground = float((zs[ys, xs] * wsum).sum() / wsum.sum())
    return CameraPose(position=LocalPoint(cx, cy, ground + altitude),
                      yaw=0.0, pitch=-90.0, fov=60.0)


class AnchorRegistry:
    """Named camera poses; unique names, lookups raise on unknown anchors."""

    def __init__(self):
        self._anchors = {}

    def register(self, name, pose):
        if name in self._anchors:
            raise ValueError(f"anchor {name!r} already registered")
        self._anchors[name] = pose

    def resolve(self, name):
        if name not in self._anchors:
            raise KeyError(f"unknown anchor {name!r}")
        return self._anchors[name]

    def names(self):
        return sorted(self._anchors)


def synthesize_stations(origin, extent_m, count=5, seed=0):
    """Deterministic demo fixture: stations scattered around the domain."""
    from . import kernels
    from .geodesy import to_geo

    idx = np.arange(count, dtype=np.uint64)
    zero = np.zeros(count, dtype=np.uint64)
    ux = kernels.hash_u01(seed, idx, zero, 201)
    uy = kernels.hash_u01(seed, idx, zero, 202)
    stations = []
    modes = OPERATIONAL_MODES
    avail = AVAILABILITY_STATES
    for i in range(count):
        p = to_geo(LocalPoint((ux[i] * 1.6 - 0.3) * extent_m,
                              (uy[i] * 1.6 - 0.3) * extent_m, 0.0), origin)
        n_assets = 2 + (i % 3)
        assets = []
        for j in range(n_assets):
            u = kernels.hash_u01(seed, np.asarray([i], dtype=np.uint64),
                                 np.asarray([j], dtype=np.uint64), 203)
            assets.append({
                "name": f"unit-{i}{chr(ord('a') + j)}",
                "coverage_area": round(200.0 + 4800.0 * float(u[0]), 1),
                "budget": round(50_000.0 + 950_000.0 * float(u[0] ** 2), 2),
                "tonnage": round(1.0 + 19.0 * float(1.0 - u[0]), 2),
                "operational_mode": modes[(i + j) % 3],
                "availability": avail[(i * 2 + j) % 3],
                "personnel": 3 + ((i + j * 5) % 9),
            })
        stations.append({"id": i + 1, "name": f"Station {i + 1}",
                         "lat": p.lat, "lon": p.lon, "h": p.h,
                         "photo": None, "assets": assets})
    return {"stations": stations}


def save_stations(path, doc):
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
