"""emberfield: headless wildfire digital-twin engine.

Converts gridded fire-model output into a time-stepped, LOD-managed scene of
fire emitters and procedurally generated vegetation, renders 2D multi-modal
sensor rasters, and serves interactive playback plus fire-station resource
analytics over HTTP/WebSocket.
"""

__version__ = "0.1.0"

from . import kernels
from .emitters import EmitterConfig, build_emitters, flux_extrema
from .forest import ForestConfig, forest_digest, generate_forest
from .geodesy import GeodeticPoint, LocalPoint, cell_geodetic, to_geo, to_local
from .scenario import (ScalarGrid, ScenarioManifest, generate_synthetic,
                       load_georef, load_grid, load_manifest)
from .scheduler import (CameraPose, Scheduler, SchedulerConfig,
                        lod_for_distance, particle_multiplier)
from .session import Session

__all__ = [
    "kernels", "EmitterConfig", "build_emitters", "flux_extrema",
    "ForestConfig", "forest_digest", "generate_forest",
    "GeodeticPoint", "LocalPoint", "cell_geodetic", "to_geo", "to_local",
    "ScalarGrid", "ScenarioManifest", "generate_synthetic",
    "load_georef", "load_grid", "load_manifest",
    "CameraPose", "Scheduler", "SchedulerConfig",
    "lod_for_distance", "particle_multiplier", "Session",
]
