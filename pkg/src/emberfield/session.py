"""Playback session binding scenario data, emitter building, and scheduling
into a live state machine the service (or a test harness) drives.

All timing flows through an injected monotonic clock, so every playback
behavior is testable with a manual clock and no sleeps. Emitter sets are
built lazily per frame and kept in a small LRU cache, making seek O(build)
once and O(1) after.
"""

import json
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass

from . import scenario as scenario_io
from .emitters import EmitterConfig, build_emitters
from .scheduler import CameraPose, Scheduler, SchedulerConfig
from .geodesy import LocalPoint
from .stations import FIRE_ORIGIN_ANCHOR, AnchorRegistry, fire_origin_pose

DEFAULT_CAMERA = CameraPose(position=LocalPoint(0.0, 0.0, 2000.0),
                            yaw=0.0, pitch=-90.0, fov=60.0)


@dataclass(frozen=True)
class PlaybackState:
    scenario: str
    frame: int
    rate: float
    status: str  # "playing" | "paused"
    camera: CameraPose

    def to_payload(self):
        return {
            "scenario": self.scenario,
            "frame": self.frame,
            "rate": self.rate,
            "status": self.status,
            "camera": camera_payload(self.camera),
        }


def camera_payload(camera):
    p = camera.position
    return {"x": p.x, "y": p.y, "z": p.z, "yaw": camera.yaw,
            "pitch": camera.pitch, "fov": camera.fov}


def camera_from_payload(raw):
    return CameraPose(
        position=LocalPoint(float(raw["x"]), float(raw["y"]), float(raw["z"])),
        yaw=float(raw.get("yaw", 0.0)), pitch=float(raw.get("pitch", 0.0)),
        fov=float(raw.get("fov", 60.0)))


class Subscription:
    """Size-one mailbox: a stalled consumer always wakes to the latest frame,
    never a backlog, and frame order is preserved."""

    def __init__(self):
        self._cond = threading.Condition()
        self._payload = None
        self._version = 0
        self._taken = 0
        self.closed = False

    def offer(self, payload):
        with self._cond:
            self._payload = payload
            self._version += 1
            self._cond.notify_all()

    def take(self, timeout=None):
        """Latest unseen payload, or None on timeout/close."""
        with self._cond:
            if self._version == self._taken:
                self._cond.wait(timeout)
            if self._version == self._taken or self.closed:
                return None
            self._taken = self._version
            return self._payload

    def close(self):
        with self._cond:
            self.closed = True
            self._cond.notify_all()


class FrameBus:
    """Fan-out of scene frames with latest-frame coalescing per subscriber."""

    def __init__(self):
        self._lock = threading.Lock()
        self._subs = []

    def subscribe(self):
        sub = Subscription()
        with self._lock:
            self._subs.append(sub)
        return sub

    def unsubscribe(self, sub):
        sub.close()
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)

    def publish(self, payload):
        with self._lock:
            subs = list(self._subs)
        for sub in subs:
            sub.offer(payload)

    def subscriber_count(self):
        with self._lock:
            return len(self._subs)


class Session:
    """One loaded scenario with playback state, camera, and scheduling."""

    def __init__(self, manifest, emitter_cfg=None, scheduler_cfg=None,
                 clock=time.monotonic, cache_frames=16):
        self.manifest = manifest
        self.clock = clock
        self.georef = scenario_io.load_georef(manifest, "flux")
        f_min, f_max = scenario_io.ensure_extrema(manifest)
        self.emitter_cfg = emitter_cfg or EmitterConfig(f_min=f_min, f_max=f_max)
        self.scheduler_cfg = scheduler_cfg or SchedulerConfig()
        self.scheduler = Scheduler(self.scheduler_cfg)
        self.bus = FrameBus()
        self.anchors = AnchorRegistry()
        self.anchors.register(FIRE_ORIGIN_ANCHOR, fire_origin_pose(
            scenario_io.load_grid(manifest, "flux", 0), self.georef))

        self._lock = threading.RLock()
        self._cache = OrderedDict()
        self._cache_frames = cache_frames
        self._status = "paused"
        self._rate = 1.0
        self._frame = 0
        self._base_frame = 0
        self._base_time = None
        self._camera = DEFAULT_CAMERA
        self._last_published = -1
        self._scene_snapshot = None  # (frame, camera) -> payload of last schedule

    # -- playback state ------------------------------------------------

    def _clamp(self, frame):
        return max(0, min(int(frame), self.manifest.frame_count - 1))

    def current_frame(self):
        with self._lock:
            if self._status == "playing":
                elapsed = self.clock() - self._base_time
                self._frame = self._clamp(self._base_frame + int(elapsed * self._rate))
            return self._frame

    def state(self):
        return PlaybackState(scenario=self.manifest.name,
                             frame=self.current_frame(), rate=self._rate,
                             status=self._status, camera=self._camera)

    def control(self, cmd, frame=None, rate=None):
        """Apply play/pause/seek/rate; returns the resulting state."""
        with self._lock:
            if cmd == "play":
                self._base_frame = self.current_frame()
                self._base_time = self.clock()
                self._status = "playing"
            elif cmd == "pause":
                self._frame = self.current_frame()
                self._status = "paused"
            elif cmd == "seek":
                if frame is None:
                    raise ValueError("seek needs a frame")
                self._frame = self._clamp(frame)
                self._base_frame = self._frame
                self._base_time = self.clock()
            elif cmd == "rate":
                if rate is None or rate <= 0:
                    raise ValueError(f"rate must be > 0, got {rate}")
                self._base_frame = self.current_frame()
                self._base_time = self.clock()
                self._rate = float(rate)
            else:
                raise ValueError(f"unknown command {cmd!r}")
        return self.state()

    def set_camera(self, camera):
        with self._lock:
            self._camera = camera

    @property
    def camera(self):
        return self._camera

    # -- scene assembly -------------------------------------------------

    def emitters_for(self, frame):
        with self._lock:
            if frame in self._cache:
                self._cache.move_to_end(frame)
                return self._cache[frame]
        grid = scenario_io.load_grid(self.manifest, "flux", frame)
        built = build_emitters(grid, self.georef, self.emitter_cfg)
        with self._lock:
            self._cache[frame] = built
            while len(self._cache) > self._cache_frames:
                self._cache.popitem(last=False)
        return built

    def get_scene(self, camera=None):
        """Scheduled scene for the current frame; a consistent snapshot.

        Repeated queries with an unchanged (frame, camera) return the same
        snapshot rather than re-scheduling, so paused sessions are frozen.
        """
        with self._lock:
            if camera is not None:
                self._camera = camera
            cam = self._camera
            frame = self.current_frame()
            if self._scene_snapshot is not None:
                key, payload = self._scene_snapshot
                if key == (frame, cam):
                    return payload
            emitters = self.emitters_for(frame)
            active = self.scheduler.schedule(emitters, cam)
            payload = scene_payload(frame, emitters, active, self.scheduler.pool)
            self._scene_snapshot = ((frame, cam), payload)
            return payload

    def tick(self):
        """Publish a SceneFrame when playback has advanced; returns the
        payload when one was published."""
        with self._lock:
            if self._status != "playing":
                return None
            frame = self.current_frame()
            if frame == self._last_published:
                return None
            payload = self.get_scene()
            self._last_published = frame
        self.bus.publish(payload)
        return payload


def scene_payload(frame, emitters, active, pool):
    """Canonical SceneFrame document (wire body and golden-file format)."""
    idx_of = {int(eid): i for i, eid in enumerate(emitters.ids)}
    entries = []
    for i in range(len(active)):
        eid = int(active.ids[i])
        j = idx_of[eid]
        entries.append([
            eid, int(emitters.cell_x[j]), int(emitters.cell_y[j]),
            float(emitters.pos[j, 0]), float(emitters.pos[j, 1]), float(emitters.pos[j, 2]),
            float(emitters.scale[j, 0]), float(emitters.scale[j, 1]), float(emitters.scale[j, 2]),
            float(emitters.color[j, 0]), float(emitters.color[j, 1]), float(emitters.color[j, 2]),
            int(active.lod[i]), float(active.mult[i]), int(active.slot[i]),
            float(active.dist[i]),
        ])
    stats = active.stats
    pstats = pool.stats()
    return {
        "frame": int(frame),
        "total_emitters": len(emitters),
        "active_count": len(active),
        "stats": {"activated": stats.activated, "deactivated": stats.deactivated,
                  "retained_slots": stats.retained_slots,
                  "reused_slots": stats.reused_slots, "fresh_slots": stats.fresh_slots},
        "pool": {"fresh": pstats.fresh, "reused": pstats.reused,
                 "released": pstats.released, "capacity": pool.capacity},
        "entries": entries,
    }


def scene_text(payload):
    """Deterministic serialization used by golden tests and the wire."""
    return json.dumps(payload, separators=(",", ":"), sort_keys=True)
