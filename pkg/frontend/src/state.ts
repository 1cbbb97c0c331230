// ViewState and its pure transitions. The console holds no domain math:
// the camera it stores is what it sent or received, the timeline mirrors
// server frames, and table rows are server payloads verbatim.

import type { CameraPayload, OverlayKind, PlaybackState } from "./types.js";
import { OVERLAYS } from "./types.js";

export interface ViewState {
  camera: CameraPayload;
  overlay: OverlayKind;
  timeline: number; // current frame position
  frameCount: number;
  status: "playing" | "paused" | "disconnected";
  selectedStation: number | null;
}

export const DEFAULT_CAMERA: CameraPayload = {
  x: 0, y: 0, z: 2000, yaw: 0, pitch: -90, fov: 60,
};

export function initialState(frameCount: number): ViewState {
  return {
    camera: DEFAULT_CAMERA,
    overlay: "intensity",
    timeline: 0,
    frameCount,
    status: "paused",
    selectedStation: null,
  };
}

export function selectOverlay(state: ViewState, overlay: string): ViewState {
  if (!(OVERLAYS as readonly string[]).includes(overlay)) {
    throw new Error(`unknown overlay ${overlay}`);
  }
  return { ...state, overlay: overlay as OverlayKind };
}

/** Clamp a requested scrub position to the scenario's frame range,
 * mirroring the server's seek clamp. */
export function scrubTarget(state: ViewState, frame: number): number {
  const n = Math.max(1, state.frameCount);
  return Math.max(0, Math.min(Math.round(frame), n - 1));
}

/** Fold a server playback-state response into the view. The server is the
 * source of truth for frame, status, and last-reported camera. */
export function applyServerState(state: ViewState, server: PlaybackState): ViewState {
  return {
    ...state,
    timeline: server.frame,
    status: server.status,
  };
}

export function setCamera(state: ViewState, camera: CameraPayload): ViewState {
  return { ...state, camera };
}

export function moveCamera(state: ViewState,
                           delta: Partial<CameraPayload>): ViewState {
  return { ...state, camera: { ...state.camera, ...delta } };
}

export function selectStation(state: ViewState, id: number | null): ViewState {
  return { ...state, selectedStation: id };
}

export function markDisconnected(state: ViewState): ViewState {
  return { ...state, status: "disconnected" };
}

/** Serialize the active filter controls into the search request body,
 * dropping blanks so the server sees only provided filters. */
export function filtersFromControls(raw: {
  minCoverage?: string;
  maxBudget?: string;
  minTonnage?: string;
  mode?: string;
  availability?: string;
}): Record<string, number | string> {
  const out: Record<string, number | string> = {};
  if (raw.minCoverage) out.min_coverage = Number(raw.minCoverage);
  if (raw.maxBudget) out.max_budget = Number(raw.maxBudget);
  if (raw.minTonnage) out.min_tonnage = Number(raw.minTonnage);
  if (raw.mode) out.mode = raw.mode;
  if (raw.availability) out.availability = raw.availability;
  return out;
}
