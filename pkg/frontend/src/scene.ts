// Top-down map rendering of a SceneFrame onto a canvas. All domain numbers
// (positions, scale, color, lod, mult) come from the server; this module
// only maps them into pixels.

import type { AssetRow, SceneEntry, SceneFrame } from "./types.js";

export interface Extent {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export interface Viewport {
  width: number;
  height: number;
  extent: Extent;
}

/** World meters -> canvas pixels (y axis flipped: north up). */
export function project(v: Viewport, x: number, y: number): [number, number] {
  const sx = (x - v.extent.x0) / (v.extent.x1 - v.extent.x0);
  const sy = (y - v.extent.y0) / (v.extent.y1 - v.extent.y0);
  return [sx * v.width, (1 - sy) * v.height];
}

/** Marker radius in pixels: proportional to the server-side scale vector and
 * particle multiplier so LOD 0 fires read visibly larger than LOD 2. */
export function markerRadius(entry: SceneEntry, v: Viewport): number {
  const scaleX = entry[6];
  const mult = entry[13];
  const base = Math.max(3, v.width / 160);
  return base * (scaleX / 100) * (0.5 + 0.5 * mult);
}

/** Marker tint from the server color vector (components 100..500). */
export function markerColor(entry: SceneEntry): string {
  const c = entry[9];
  const t = Math.max(0, Math.min(1, (c - 100) / 400));
  const g = Math.round(120 + 110 * t);
  return `rgb(255, ${g}, ${Math.round(40 * (1 - t))})`;
}

const LOD_RING = ["#ffffff", "#c0c0c0", "#606060"];

export function drawScene(ctx: CanvasRenderingContext2D, v: Viewport,
                          scene: SceneFrame, overlay: HTMLImageElement | null): void {
  ctx.clearRect(0, 0, v.width, v.height);
  if (overlay) {
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(overlay, 0, 0, v.width, v.height);
  } else {
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, v.width, v.height);
  }
  for (const e of scene.entries) {
    const [px, py] = project(v, e[3], e[4]);
    const r = markerRadius(e, v);
    ctx.beginPath();
    ctx.arc(px, py, r, 0, Math.PI * 2);
    ctx.fillStyle = markerColor(e);
    ctx.globalAlpha = 0.85;
    ctx.fill();
    ctx.globalAlpha = 1.0;
    ctx.lineWidth = e[12] === 0 ? 2 : 1;
    ctx.strokeStyle = LOD_RING[e[12]] ?? "#606060";
    ctx.stroke();
  }
}

export interface StationMarker {
  id: number;
  name: string;
  px: number;
  py: number;
}

/** Place one marker per distinct station (rows are per asset). */
export function stationMarkers(rows: AssetRow[], v: Viewport): StationMarker[] {
  const seen = new Map<number, StationMarker>();
  for (const r of rows) {
    if (seen.has(r.station_id)) continue;
    const x = (r as unknown as { x?: number }).x;
    const y = (r as unknown as { y?: number }).y;
    if (x === undefined || y === undefined) continue;
    const [px, py] = project(v, x, y);
    seen.set(r.station_id, { id: r.station_id, name: r.station_name, px, py });
  }
  return [...seen.values()];
}

export function drawStations(ctx: CanvasRenderingContext2D,
                             markers: StationMarker[],
                             selected: number | null): void {
  for (const m of markers) {
    ctx.beginPath();
    ctx.rect(m.px - 5, m.py - 5, 10, 10);
    ctx.fillStyle = m.id === selected ? "#3fa7ff" : "#1c6dd0";
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 1;
    ctx.stroke();
    ctx.fillStyle = "#d8e6f5";
    ctx.font = "11px sans-serif";
    ctx.fillText(m.name, m.px + 8, m.py + 4);
  }
}

/** Hit-test helper for station clicks. */
export function stationAt(markers: StationMarker[], px: number,
                          py: number): StationMarker | null {
  for (const m of markers) {
    if (Math.abs(m.px - px) <= 7 && Math.abs(m.py - py) <= 7) return m;
  }
  return null;
}
