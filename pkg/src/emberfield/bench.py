"""Benchmark harness: per-frame scheduler timing with pool counters, plus a
backend comparison (compiled kernels vs numpy fallback) over the hot paths.

Output is plain tab-separated text so regressions can be tracked by diffing
runs.
"""

import math
import time

import numpy as np

from . import kernels
from .emitters import EmitterConfig, build_emitters
from .forest import ForestConfig, generate_forest
from .geodesy import GeodeticPoint, GeoReference, LocalPoint, plane_scales
from .rasters import render_depth
from .scheduler import CameraPose, Scheduler, SchedulerConfig


def _synthetic_field(n_side, seed=11, origin=GeodeticPoint(38.8, -120.5, 1200.0),
                     spacing=250.0):
    """An all-positive flux field plus matching geo-reference, built directly
    (no disk), for benchmarking."""
    from .scenario import ScalarGrid

    k_east, k_north = plane_scales(origin)
    lon = origin.lon + np.degrees((np.arange(n_side) + 0.5) * spacing / k_east)
    lat = origin.lat + np.degrees((np.arange(n_side) + 0.5) * spacing / k_north)
    ys, xs = np.mgrid[0:n_side, 0:n_side]
    u = kernels.hash_u01(seed, xs.ravel().astype(np.uint64),
                         ys.ravel().astype(np.uint64), 7)
    elev = origin.h + 40.0 * np.sin(xs.ravel() / 9.0) * np.cos(ys.ravel() / 7.0)
    georef = GeoReference(lat, lon, elev, origin)
    flux = ScalarGrid(width=n_side, height=n_side,
                      values=(1.0 + 99.0 * u).astype(np.float32), kind="flux")
    return flux, georef


def orbit_camera(frame, n_frames, radius, center, altitude):
    a = 2.0 * math.pi * frame / n_frames
    return CameraPose(position=LocalPoint(center[0] + radius * math.cos(a),
                                          center[1] + radius * math.sin(a),
                                          altitude),
                      yaw=0.0, pitch=-45.0, fov=60.0)


def bench_schedule(n_emitters=20736, frames=120, max_active=4096,
                   backend=None, seed=11, emit=print):
    """Orbit a camera over a grid of emitters; emit one line per frame."""
    n_side = int(round(math.sqrt(n_emitters)))
    flux, georef = _synthetic_field(n_side, seed=seed)
    cfg = EmitterConfig(f_min=1.0, f_max=100.0)
    emitters = build_emitters(flux, georef, cfg, backend=backend)
    sched = Scheduler(SchedulerConfig(max_active=max_active))
    center = (float(emitters.pos[:, 0].mean()), float(emitters.pos[:, 1].mean()))
    radius = 0.35 * (emitters.pos[:, 0].max() - emitters.pos[:, 0].min())

    emit("frame\tms\tactive\tactivated\tdeactivated\treused\tfresh\tpool_fresh\tpool_reused\tpool_released")
    times = []
    for k in range(frames):
        cam = orbit_camera(k, frames, radius, center, altitude=2500.0)
        t0 = time.perf_counter()
        active = sched.schedule(emitters, cam, backend=backend)
        dt = (time.perf_counter() - t0) * 1e3
        times.append(dt)
        p = sched.pool.stats()
        s = active.stats
        emit(f"{k}\t{dt:.3f}\t{len(active)}\t{s.activated}\t{s.deactivated}"
             f"\t{s.reused_slots}\t{s.fresh_slots}\t{p.fresh}\t{p.reused}\t{p.released}")
    med = sorted(times)[len(times) // 2]
    emit(f"# schedule median_ms={med:.3f} emitters={len(emitters)} "
         f"max_active={max_active} backend={backend or kernels.BACKEND}")
    return med


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return sorted(times)[len(times) // 2]


def compare_backends(emit=print, repeats=5):
    """Median timings of each hot kernel for every available backend."""
    flux, georef = _synthetic_field(144)
    cfg = EmitterConfig(f_min=1.0, f_max=100.0)

    from .scenario import ScalarGrid

    n_forest = 720
    _, fgeoref = _synthetic_field(n_forest, spacing=50.0)
    ys, xs = np.mgrid[0:n_forest, 0:n_forest]
    u = kernels.hash_u01(3, xs.ravel().astype(np.uint64),
                         ys.ravel().astype(np.uint64), 9)
    canopy = ScalarGrid(width=n_forest, height=n_forest,
                        values=(u * 2.4).astype(np.float32), kind="canopy_fuel")
    surface = ScalarGrid(width=n_forest, height=n_forest,
                         values=(u * 1.2).astype(np.float32), kind="surface_fuel")
    cam = CameraPose(position=LocalPoint(18000.0, 18000.0, 4500.0),
                     yaw=0.0, pitch=-60.0, fov=60.0)

    emit("op\tbackend\tmedian_ms")
    results = {}
    for name in kernels.available_backends():
        emitters = build_emitters(flux, georef, cfg, backend=name)

        def run_build():
            build_emitters(flux, georef, cfg, backend=name)

        def run_schedule():
            Scheduler(SchedulerConfig()).schedule(emitters, cam, backend=name)

        def run_forest():
            generate_forest(canopy, surface, fgeoref, ForestConfig(seed=5),
                            backend=name)

        def run_depth():
            render_depth(cam, georef, resolution=(96, 96), backend=name)

        for op, fn in (("build_emitters", run_build), ("schedule", run_schedule),
                       ("generate_forest", run_forest), ("render_depth", run_depth)):
            ms = _median_time(fn, repeats)
            results[(op, name)] = ms
            emit(f"{op}\t{name}\t{ms:.3f}")
    return results
