"""Command-line interface: gen, ingest, bench, render, serve."""

import argparse
import json
import sys


def cmd_gen(args):
    from .scenario import generate_synthetic, FLUX_CELL_M
    from .stations import save_stations, synthesize_stations

    man = generate_synthetic(args.out, seed=args.seed,
                             dims=(args.width, args.height),
                             frames=args.frames,
                             wind=(args.wind_deg, args.wind_speed),
                             name=args.name)
    doc = synthesize_stations(man.origin, extent_m=args.width * FLUX_CELL_M,
                              count=args.stations, seed=args.seed)
    save_stations(man.root / "stations.json", doc)
    print(f"wrote scenario '{man.name}' to {man.root}")
    print(f"  flux grid {man.grid_flux[0]}x{man.grid_flux[1]}, "
          f"fuel grid {man.grid_fuel[0]}x{man.grid_fuel[1]}, "
          f"{man.frame_count} frames")
    return 0


def cmd_ingest(args):
    from .scenario import ensure_extrema, load_grid, load_manifest

    man = load_manifest(args.scenario)
    f_min, f_max = ensure_extrema(man)
    print(f"scenario '{man.name}': OK")
    print(f"  flux grid {man.grid_flux[0]}x{man.grid_flux[1]}, "
          f"{man.frame_count} frames @ {man.frame_interval_s}s")
    print(f"  fuel grid {man.grid_fuel[0]}x{man.grid_fuel[1]}")
    print(f"  flux extrema (positive cells, all frames): "
          f"f_min={f_min:.6g} f_max={f_max:.6g}")
    burning = [int((load_grid(man, 'flux', k).values > 0).sum())
               for k in range(man.frame_count)]
    print(f"  burning cells per frame: min={min(burning)} max={max(burning)}")
    return 0


def cmd_bench(args):
    from . import kernels
    from .bench import bench_schedule, compare_backends

    if args.compare:
        compare_backends(repeats=args.repeats)
        return 0
    backend = None if args.backend == "auto" else args.backend
    if backend == "compiled" and kernels.backend_module("compiled") is None:
        print("compiled backend unavailable (extension not built)", file=sys.stderr)
        return 1
    bench_schedule(n_emitters=args.emitters, frames=args.frames,
                   max_active=args.max_active, backend=backend)
    return 0


def cmd_render(args):
    from . import rasters
    from .scenario import ensure_extrema, load_georef, load_grid, load_manifest
    from .geodesy import LocalPoint
    from .scheduler import CameraPose

    man = load_manifest(args.scenario)
    kind = args.kind
    if kind == "depth":
        georef = load_georef(man, "flux")
        zs = georef.local_z()
        cam = CameraPose(position=LocalPoint(args.cam_x, args.cam_y,
                                             args.cam_z if args.cam_z is not None
                                             else float(zs.max()) + 1500.0),
                         yaw=args.cam_yaw, pitch=args.cam_pitch, fov=args.cam_fov)
        depth = rasters.render_depth(cam, georef, resolution=(args.width, args.height))
        if args.out.endswith(".f32"):
            rasters.write_depth_f32(args.out, depth)
        else:
            rgb = rasters.depth_to_rgb(depth)
            _write_rgb(args.out, rgb)
        print(f"wrote {args.out}")
        return 0

    if kind == "thermal":
        rgb = rasters.render_thermal(load_grid(man, "temperature", args.frame))
    elif kind == "intensity":
        rgb = rasters.render_intensity(load_grid(man, "flux", args.frame),
                                       ensure_extrema(man))
    elif kind == "fuel":
        rgb = rasters.render_fuel(load_grid(man, "canopy_fuel"))
    elif kind == "fused":
        temp = load_grid(man, "temperature", args.frame)
        base = rasters.fuel_minimap(load_grid(man, "canopy_fuel"),
                                    (temp.width, temp.height))
        rgb = rasters.blend_thermal(base, rasters.render_thermal(temp), args.alpha)
    else:
        print(f"unknown kind {kind!r}", file=sys.stderr)
        return 1
    _write_rgb(args.out, rgb)
    print(f"wrote {args.out}")
    return 0


def _write_rgb(path, rgb):
    from . import rasters

    if path.endswith(".ppm"):
        rasters.write_ppm(path, rgb)
    else:
        rasters.write_png(path, rgb)


def cmd_serve(args):
    from .service import serve

    stations = args.stations
    if stations is None:
        from pathlib import Path

        candidate = Path(args.scenario) / "stations.json"
        stations = str(candidate) if candidate.is_file() else None
    serve(args.scenario, stations_path=stations, host=args.host, port=args.port)
    return 0


def cmd_forest(args):
    from .forest import ForestConfig, forest_digest, generate_forest
    from .scenario import load_georef, load_grid, load_manifest

    man = load_manifest(args.scenario)
    forest = generate_forest(load_grid(man, "canopy_fuel"),
                             load_grid(man, "surface_fuel"),
                             load_georef(man, "fuel"),
                             ForestConfig(seed=args.seed), parallel=args.parallel)
    counts = forest.counts()
    print(f"digest: {forest_digest(forest):016x}")
    print("counts: " + json.dumps(counts, sort_keys=True))
    if args.out:
        with open(args.out, "w") as f:
            f.write(forest.export_text())
        print(f"wrote {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="emberfield",
                                description="wildfire digital-twin engine")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic scenario")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--width", type=int, default=144)
    g.add_argument("--height", type=int, default=144)
    g.add_argument("--frames", type=int, default=10)
    g.add_argument("--wind-deg", type=float, default=45.0)
    g.add_argument("--wind-speed", type=float, default=6.0)
    g.add_argument("--stations", type=int, default=5)
    g.add_argument("--name", default=None)
    g.set_defaults(fn=cmd_gen)

    i = sub.add_parser("ingest", help="validate a scenario and cache flux extrema")
    i.add_argument("--scenario", required=True)
    i.set_defaults(fn=cmd_ingest)

    b = sub.add_parser("bench", help="scheduler bench / backend comparison")
    b.add_argument("--emitters", type=int, default=20736)
    b.add_argument("--frames", type=int, default=120)
    b.add_argument("--max-active", type=int, default=4096)
    b.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    b.add_argument("--compare", action="store_true",
                   help="compare compiled vs python kernels")
    b.add_argument("--repeats", type=int, default=5)
    b.set_defaults(fn=cmd_bench)

    r = sub.add_parser("render", help="render a sensor raster")
    r.add_argument("--scenario", required=True)
    r.add_argument("--kind", required=True,
                   choices=("thermal", "intensity", "fuel", "depth", "fused"))
    r.add_argument("--frame", type=int, default=0)
    r.add_argument("--out", required=True)
    r.add_argument("--alpha", type=float, default=1.0)
    r.add_argument("--width", type=int, default=256)
    r.add_argument("--height", type=int, default=256)
    r.add_argument("--cam-x", type=float, default=0.0)
    r.add_argument("--cam-y", type=float, default=0.0)
    r.add_argument("--cam-z", type=float, default=None)
    r.add_argument("--cam-yaw", type=float, default=0.0)
    r.add_argument("--cam-pitch", type=float, default=-90.0)
    r.add_argument("--cam-fov", type=float, default=60.0)
    r.set_defaults(fn=cmd_render)

    f = sub.add_parser("forest", help="generate vegetation and print its digest")
    f.add_argument("--scenario", required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--parallel", action="store_true")
    f.add_argument("--out", default=None)
    f.set_defaults(fn=cmd_forest)

    s = sub.add_parser("serve", help="run the twin service")
    s.add_argument("--scenario", required=True)
    s.add_argument("--stations", default=None)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8710)
    s.set_defaults(fn=cmd_serve)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
