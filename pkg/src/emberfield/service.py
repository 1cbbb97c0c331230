"""HTTP/WebSocket service exposing a playback session to operator consoles.

Request/response endpoints cover scenario info, playback control, scene
queries (camera in the request body), rasters by kind/frame, station search,
and anchors; one WebSocket channel pushes SceneFrames with latest-frame
coalescing for slow consumers. Payload bodies reuse the deterministic JSON
exports defined by the domain modules, so golden-file tests double as wire
tests.
"""

import asyncio
import json

from fastapi import FastAPI, HTTPException, Response, WebSocket, WebSocketDisconnect

from . import rasters, scenario as scenario_io
from .session import Session, camera_from_payload, scene_text
from .stations import AssetQuery, load_stations, search_assets, nearest_stations
from .geodesy import GeodeticPoint

RASTER_KINDS = ("thermal", "intensity", "fuel", "fused", "depth")


def _json_response(payload):
    return Response(content=scene_text(payload), media_type="application/json")


def station_rows(pairs, origin=None):
    """Flatten (station, asset) pairs; when a scenario origin is known the
    rows also carry scene-frame x/y so clients need no geodesy."""
    from .geodesy import to_local

    rows = []
    for st, asset in pairs:
        row = {
            "station_id": st.id, "station_name": st.name,
            "lat": st.location.lat, "lon": st.location.lon,
            "asset": asset.name, "coverage_area": asset.coverage_area,
            "budget": asset.budget, "tonnage": asset.tonnage,
            "operational_mode": asset.operational_mode,
            "availability": asset.availability, "personnel": asset.personnel,
        }
        if origin is not None:
            v = to_local(st.location, origin)
            row["x"] = v.x
            row["y"] = v.y
        rows.append(row)
    return rows


def create_app(scenario_path=None, stations_path=None, session=None,
               tick_interval=0.02):
    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(app):
        task = asyncio.create_task(_tick_loop())
        try:
            yield
        finally:
            task.cancel()

    app = FastAPI(title="emberfield twin service", lifespan=lifespan)
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    state = {"session": session, "stations": []}
    if scenario_path is not None:
        state["session"] = Session(scenario_io.load_manifest(scenario_path))
    if stations_path is not None:
        state["stations"] = load_stations(stations_path)

    def need_session():
        if state["session"] is None:
            raise HTTPException(status_code=409, detail="no scenario loaded")
        return state["session"]

    @app.get("/health")
    def health():
        return {"ok": True}

    @app.post("/scenario/load")
    def scenario_load(body: dict):
        path = body.get("path")
        if not path:
            raise HTTPException(status_code=422, detail="body needs a 'path'")
        try:
            state["session"] = Session(scenario_io.load_manifest(path))
        except (scenario_io.ManifestError, scenario_io.GridError) as e:
            raise HTTPException(status_code=400, detail=str(e))
        return scenario_info()

    @app.get("/scenario")
    def scenario_info():
        ses = need_session()
        man = ses.manifest
        xs, ys = ses.georef.local_axes()
        return {
            "name": man.name,
            "grid_flux": list(man.grid_flux), "grid_fuel": list(man.grid_fuel),
            "frame_count": man.frame_count,
            "frame_interval_s": man.frame_interval_s,
            "origin": {"lat": man.origin.lat, "lon": man.origin.lon, "h": man.origin.h},
            "seed": man.seed,
            "f_min": ses.emitter_cfg.f_min, "f_max": ses.emitter_cfg.f_max,
            "lod_distances": [ses.scheduler_cfg.lod1_dist, ses.scheduler_cfg.lod2_dist],
            "max_active": ses.scheduler_cfg.max_active,
            "extent_m": {"x0": float(xs.min()), "x1": float(xs.max()),
                         "y0": float(ys.min()), "y1": float(ys.max())},
        }

    @app.get("/state")
    def playback_state():
        return need_session().state().to_payload()

    @app.post("/control")
    def control(body: dict):
        ses = need_session()
        cmd = body.get("cmd")
        try:
            st = ses.control(cmd, frame=body.get("frame"), rate=body.get("rate"))
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return st.to_payload()

    @app.post("/scene")
    def scene(body: dict):
        ses = need_session()
        camera = None
        if "camera" in body:
            try:
                camera = camera_from_payload(body["camera"])
            except (KeyError, ValueError) as e:
                raise HTTPException(status_code=422, detail=f"bad camera: {e}")
        return _json_response(ses.get_scene(camera))

    @app.get("/raster/{kind}")
    def raster(kind: str, frame: int = 0, fmt: str = "png", alpha: float = 1.0,
               width: int = 128, height: int = 128):
        ses = need_session()
        if kind not in RASTER_KINDS:
            raise HTTPException(status_code=404, detail=f"unknown raster kind {kind!r}")
        man = ses.manifest
        try:
            if kind == "thermal":
                grid = scenario_io.load_grid(man, "temperature", frame)
                rgb = rasters.render_thermal(grid)
            elif kind == "intensity":
                grid = scenario_io.load_grid(man, "flux", frame)
                rgb = rasters.render_intensity(grid, (ses.emitter_cfg.f_min,
                                                      ses.emitter_cfg.f_max))
            elif kind == "fuel":
                grid = scenario_io.load_grid(man, "canopy_fuel")
                rgb = rasters.render_fuel(grid)
            elif kind == "fused":
                temp = scenario_io.load_grid(man, "temperature", frame)
                fuel = scenario_io.load_grid(man, "canopy_fuel")
                base = rasters.fuel_minimap(fuel, (temp.width, temp.height))
                thermal = rasters.render_thermal(temp)
                rgb = rasters.blend_thermal(base, thermal, alpha)
            else:  # depth
                depth = rasters.render_depth(ses.camera, ses.georef,
                                             resolution=(width, height))
                if fmt == "f32":
                    return Response(content=depth.astype("<f4").tobytes(),
                                    media_type="application/octet-stream")
                rgb = rasters.depth_to_rgb(depth)
        except scenario_io.GridError as e:
            raise HTTPException(status_code=400, detail=str(e))
        if fmt == "ppm":
            h, w, _ = rgb.shape
            body = b"P6\n%d %d\n255\n" % (w, h) + rgb.tobytes()
            return Response(content=body, media_type="image/x-portable-pixmap")
        return Response(content=rasters.encode_png(rgb), media_type="image/png")

    @app.get("/stations")
    def stations_all():
        origin = state["session"].manifest.origin if state["session"] else None
        return {"rows": station_rows(search_assets(state["stations"]), origin)}

    @app.post("/stations/search")
    def stations_search(body: dict):
        query = AssetQuery(
            min_coverage=body.get("min_coverage"),
            max_budget=body.get("max_budget"),
            min_tonnage=body.get("min_tonnage"),
            mode=body.get("mode"),
            availability=body.get("availability"))
        if query.mode is not None and query.mode not in ("ground", "aerial", "mixed"):
            raise HTTPException(status_code=422, detail=f"bad mode {query.mode!r}")
        origin = state["session"].manifest.origin if state["session"] else None
        return {"rows": station_rows(search_assets(state["stations"], query), origin)}

    @app.get("/stations/nearest")
    def stations_nearest(lat: float, lon: float, k: int = 3):
        if not stations_available():
            return {"rows": []}
        try:
            point = GeodeticPoint(lat, lon, 0.0)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        pairs = nearest_stations(point, state["stations"], k)
        return {"rows": [{"station_id": st.id, "station_name": st.name,
                          "distance_m": d} for st, d in pairs]}

    def stations_available():
        return bool(state["stations"])

    @app.get("/anchors")
    def anchors():
        ses = need_session()
        return {"anchors": ses.anchors.names()}

    @app.get("/anchors/{name}")
    def anchor(name: str):
        ses = need_session()
        try:
            pose = ses.anchors.resolve(name)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown anchor {name!r}")
        from .session import camera_payload
        return {"name": name, "camera": camera_payload(pose)}

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        ses = state["session"]
        if ses is None:
            await ws.close(code=4000)
            return
        sub = ses.bus.subscribe()
        loop = asyncio.get_running_loop()
        try:
            while True:
                payload = await loop.run_in_executor(None, sub.take, 0.25)
                if payload is not None:
                    await ws.send_text(scene_text(payload))
                # also service camera updates sent by the client
                try:
                    msg = await asyncio.wait_for(ws.receive_text(), timeout=0.001)
                    body = json.loads(msg)
                    if "camera" in body:
                        ses.set_camera(camera_from_payload(body["camera"]))
                except asyncio.TimeoutError:
                    pass
        except WebSocketDisconnect:
            pass
        finally:
            ses.bus.unsubscribe(sub)

    async def _tick_loop():
        while True:
            ses = state["session"]
            if ses is not None:
                ses.tick()
            await asyncio.sleep(tick_interval)

    return app


def serve(scenario_path, stations_path=None, host="127.0.0.1", port=8710):
    import uvicorn

    app = create_app(scenario_path=scenario_path, stations_path=stations_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")
