// Wire types mirroring the twin-service payloads. The console never derives
// domain numbers itself; everything rendered comes from these bodies.

export interface CameraPayload {
  x: number;
  y: number;
  z: number;
  yaw: number;
  pitch: number;
  fov: number;
}

export interface ScenarioInfo {
  name: string;
  grid_flux: [number, number];
  grid_fuel: [number, number];
  frame_count: number;
  frame_interval_s: number;
  origin: { lat: number; lon: number; h: number };
  seed: number;
  f_min: number;
  f_max: number;
  lod_distances: [number, number];
  max_active: number;
  extent_m: { x0: number; x1: number; y0: number; y1: number };
}

export interface PlaybackState {
  scenario: string;
  frame: number;
  rate: number;
  status: "playing" | "paused";
  camera: CameraPayload;
}

// [id, cellX, cellY, x, y, z, sx, sy, sz, cr, cg, cb, lod, mult, slot, dist]
export type SceneEntry = [
  number, number, number,
  number, number, number,
  number, number, number,
  number, number, number,
  number, number, number, number,
];

export interface SceneFrame {
  frame: number;
  total_emitters: number;
  active_count: number;
  stats: {
    activated: number;
    deactivated: number;
    retained_slots: number;
    reused_slots: number;
    fresh_slots: number;
  };
  pool: { fresh: number; reused: number; released: number; capacity: number };
  entries: SceneEntry[];
}

export interface AssetRow {
  station_id: number;
  station_name: string;
  lat: number;
  lon: number;
  asset: string;
  coverage_area: number;
  budget: number;
  tonnage: number;
  operational_mode: string;
  availability: string;
  personnel: number;
}

export interface AssetFilters {
  min_coverage?: number;
  max_budget?: number;
  min_tonnage?: number;
  mode?: string;
  availability?: string;
}

export const OVERLAYS = ["intensity", "thermal", "fuel", "fused", "depth"] as const;
export type OverlayKind = (typeof OVERLAYS)[number];
