"""Camera-relative emitter scheduling: LOD tiers, nearest-first active-set
selection under a cap, and slot pooling.

Selection orders emitters by (squared camera distance, id) so results are
deterministic and cross-backend identical even under exact distance ties.
Emitters that stay active keep their pool slot across frames; released slots
are recycled before any fresh slot is allocated, which bounds total
allocations by the pool capacity for the lifetime of a session.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geodesy import LocalPoint

LOD1_DIST = 1500.0
LOD2_DIST = 3500.0
PARTICLE_MULT = (1.0, 0.7, 0.4)


@dataclass(frozen=True)
class CameraPose:
    position: LocalPoint
    yaw: float = 0.0
    pitch: float = 0.0
    fov: float = 60.0

    def __post_init__(self):
        if not (math.isfinite(self.yaw) and math.isfinite(self.pitch)):
            raise ValueError("camera angles must be finite")
        if not (10.0 < self.fov < 170.0):
            raise ValueError(f"fov must be in (10, 170), got {self.fov}")


@dataclass(frozen=True)
class SchedulerConfig:
    lod1_dist: float = LOD1_DIST
    lod2_dist: float = LOD2_DIST
    max_active: int = 4096
    pool_capacity: int = None

    def __post_init__(self):
        if not self.lod1_dist < self.lod2_dist:
            raise ValueError("lod1_dist must be < lod2_dist")
        cap = self.pool_capacity if self.pool_capacity is not None else self.max_active
        object.__setattr__(self, "pool_capacity", cap)
        if cap < self.max_active:
            raise ValueError("pool_capacity must be >= max_active")


def lod_for_distance(d, cfg=SchedulerConfig()):
    """Distance -> LOD tier: 0 near (inclusive), 1 mid (inclusive), 2 far."""
    if d <= cfg.lod1_dist:
        return 0
    if d <= cfg.lod2_dist:
        return 1
    return 2


def particle_multiplier(tier):
    """Per-tier particle density multiplier."""
    if tier not in (0, 1, 2):
        raise ValueError(f"invalid LOD tier {tier!r}")
    return PARTICLE_MULT[tier]


@dataclass(frozen=True)
class PoolStats:
    fresh: int = 0
    reused: int = 0
    released: int = 0


@dataclass(frozen=True)
class FrameStats:
    activated: int = 0
    deactivated: int = 0
    retained_slots: int = 0
    reused_slots: int = 0
    fresh_slots: int = 0


class SlotPool:
    """Fixed-capacity slot recycler. The free list is LIFO; fresh slots are
    handed out in increasing order and never exceed capacity."""

    def __init__(self, capacity):
        if capacity < 1:
            raise ValueError("pool capacity must be >= 1")
        self.capacity = int(capacity)
        self._free = []
        self._next_fresh = 0
        self._fresh = 0
        self._reused = 0
        self._released = 0

    def acquire(self):
        if self._free:
            self._reused += 1
            return self._free.pop()
        if self._next_fresh >= self.capacity:
            raise RuntimeError("slot pool exhausted")
        slot = self._next_fresh
        self._next_fresh += 1
        self._fresh += 1
        return slot

    def acquire_many(self, m):
        """m slots in the order m scalar acquire() calls would return them:
        free list popped LIFO, then fresh ascending."""
        take = min(m, len(self._free))
        out = np.empty(m, dtype=np.int64)
        if take:
            out[:take] = self._free[len(self._free) - take:][::-1]
            del self._free[len(self._free) - take:]
            self._reused += take
        fresh_n = m - take
        if fresh_n:
            if self._next_fresh + fresh_n > self.capacity:
                raise RuntimeError("slot pool exhausted")
            out[take:] = np.arange(self._next_fresh, self._next_fresh + fresh_n)
            self._next_fresh += fresh_n
            self._fresh += fresh_n
        return out, take, fresh_n

    def release(self, slot):
        self._released += 1
        self._free.append(slot)

    def release_many(self, slots):
        self._released += len(slots)
        self._free.extend(int(s) for s in slots)

    def stats(self):
        return PoolStats(fresh=self._fresh, reused=self._reused,
                         released=self._released)


def pool_stats(pool):
    """Cumulative (fresh, reused, released) counters of a pool."""
    return pool.stats()


class ActiveSet:
    """Scheduled emitters for one frame, sorted by camera distance."""

    def __init__(self, ids, dist, lod, mult, slot, stats):
        self.ids = ids
        self.dist = dist
        self.lod = lod
        self.mult = mult
        self.slot = slot
        self.stats = stats

    def __len__(self):
        return self.ids.shape[0]

    def entries(self):
        for i in range(len(self)):
            yield (int(self.ids[i]), int(self.lod[i]), float(self.mult[i]),
                   int(self.slot[i]))


class Scheduler:
    """Per-session scheduler owning the slot pool and previous assignment."""

    def __init__(self, cfg=None):
        self.cfg = cfg or SchedulerConfig()
        self.pool = SlotPool(self.cfg.pool_capacity)
        self._slot_map = np.empty(0, dtype=np.int64)  # emitter id -> slot or -1
        self._prev_ids = np.empty(0, dtype=np.int64)  # sorted active ids

    def _ensure_map(self, max_id):
        if max_id >= self._slot_map.shape[0]:
            grown = np.full(max_id + 1, -1, dtype=np.int64)
            grown[:self._slot_map.shape[0]] = self._slot_map
            self._slot_map = grown

    def schedule(self, emitters, camera, backend=None):
        impl = kernels.backend_module(backend) if backend else kernels.impl
        cam = camera.position
        order, dist = impl.nearest_select(
            emitters.pos[:, 0], emitters.pos[:, 1], emitters.pos[:, 2],
            cam.x, cam.y, cam.z, self.cfg.max_active)
        sel_ids = emitters.ids[order]

        lod = np.full(sel_ids.shape[0], 2, dtype=np.int8)
        lod[dist <= self.cfg.lod2_dist] = 1
        lod[dist <= self.cfg.lod1_dist] = 0
        mult = np.asarray(PARTICLE_MULT, dtype=np.float64)[lod]

        if sel_ids.size:
            self._ensure_map(int(sel_ids.max()))
        sorted_sel = np.sort(sel_ids)
        # deactivated emitters release their slots in ascending id order
        leavers = np.setdiff1d(self._prev_ids, sorted_sel, assume_unique=True)
        if leavers.size:
            self.pool.release_many(self._slot_map[leavers])
            self._slot_map[leavers] = -1
        # newcomers take recycled slots before fresh ones, in selection
        # (distance) order
        new_mask = self._slot_map[sel_ids] == -1
        newcomer_ids = sel_ids[new_mask]
        reused = fresh = 0
        if newcomer_ids.size:
            slots, reused, fresh = self.pool.acquire_many(newcomer_ids.size)
            self._slot_map[newcomer_ids] = slots
        slot = self._slot_map[sel_ids]
        self._prev_ids = sorted_sel

        stats = FrameStats(activated=int(newcomer_ids.size),
                           deactivated=int(leavers.size),
                           retained_slots=int(sel_ids.size - newcomer_ids.size),
                           reused_slots=int(reused), fresh_slots=int(fresh))
        return ActiveSet(ids=sel_ids, dist=dist, lod=lod, mult=mult,
                         slot=slot, stats=stats)
