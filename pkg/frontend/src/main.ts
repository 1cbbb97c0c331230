// Operator console wiring: one event loop, one stream subscription, control
// messages fire-and-forget with state reconciled from responses.

import { ApiError, TwinClient } from "./api.js";
import {
  drawScene, drawStations, stationAt, stationMarkers, type Viewport,
} from "./scene.js";
import {
  applyServerState, filtersFromControls, initialState, markDisconnected,
  moveCamera, scrubTarget, selectOverlay, selectStation, setCamera,
  type ViewState,
} from "./state.js";
import { emptyMessage, TABLE_COLUMNS, tableRows } from "./table.js";
import type { AssetRow, SceneFrame } from "./types.js";

const params = new URLSearchParams(location.search);
const api = new TwinClient(params.get("api") ?? "http://127.0.0.1:8710");

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("map");
const ctx = canvas.getContext("2d");
if (!ctx) throw new Error("canvas 2d context unavailable");

let state: ViewState = initialState(1);
let scene: SceneFrame | null = null;
let overlayImg: HTMLImageElement | null = null;
let stationsCache: AssetRow[] = [];
let viewport: Viewport = {
  width: canvas.width, height: canvas.height,
  extent: { x0: 0, x1: 1, y0: 0, y1: 1 },
};

function redraw(): void {
  if (!ctx) return;
  if (scene) drawScene(ctx, viewport, scene, overlayImg);
  drawStations(ctx, stationMarkers(stationsCache, viewport), state.selectedStation);
  $("frame-label").textContent =
    `frame ${state.timeline} / ${state.frameCount - 1} (${state.status})`;
  const banner = $("banner");
  banner.style.display = state.status === "disconnected" ? "block" : "none";
  const slider = $<HTMLInputElement>("timeline");
  if (document.activeElement !== slider) slider.value = String(state.timeline);
}

function loadOverlay(): void {
  const img = new Image();
  img.crossOrigin = "anonymous";
  img.onload = () => { overlayImg = img; redraw(); };
  img.src = api.rasterUrl(state.overlay, state.timeline);
}

async function refreshScene(): Promise<void> {
  try {
    scene = await api.scene(state.camera);
    $("scene-stats").textContent =
      `${scene.active_count}/${scene.total_emitters} active · pool fresh ${scene.pool.fresh}`
      + ` · lod counts ${countLods(scene)}`;
    redraw();
  } catch (e) {
    reportError(e);
  }
}

function countLods(s: SceneFrame): string {
  const n = [0, 0, 0];
  for (const e of s.entries) n[e[12]] += 1;
  return `0:${n[0]} 1:${n[1]} 2:${n[2]}`;
}

function reportError(e: unknown): void {
  $("error-line").textContent = e instanceof ApiError ? e.message : String(e);
}

async function refreshTable(): Promise<void> {
  const raw = filtersFromControls({
    minCoverage: $<HTMLInputElement>("f-coverage").value,
    maxBudget: $<HTMLInputElement>("f-budget").value,
    minTonnage: $<HTMLInputElement>("f-tonnage").value,
    mode: $<HTMLSelectElement>("f-mode").value,
    availability: $<HTMLSelectElement>("f-availability").value,
  });
  try {
    const rows = await api.searchAssets(raw);
    stationsCache = rows.length ? rows : stationsCache;
    renderTable(rows);
    $("error-line").textContent = "";
    redraw();
  } catch (e) {
    reportError(e);
  }
}

function renderTable(rows: AssetRow[]): void {
  const table = $<HTMLTableElement>("assets");
  table.innerHTML = "";
  const head = table.createTHead().insertRow();
  for (const col of TABLE_COLUMNS) {
    const th = document.createElement("th");
    th.textContent = col;
    head.appendChild(th);
  }
  const tbody = table.createTBody();
  for (const cells of tableRows(rows)) {
    const tr = tbody.insertRow();
    for (const cell of cells) tr.insertCell().textContent = String(cell);
  }
  const msg = emptyMessage(rows);
  $("table-empty").textContent = msg ?? "";
}

function connectStream(): void {
  const ws = new WebSocket(api.streamUrl());
  ws.onmessage = (ev) => {
    scene = JSON.parse(ev.data as string) as SceneFrame;
    state = { ...state, timeline: scene.frame };
    if (state.status === "disconnected") state = { ...state, status: "playing" };
    redraw();
  };
  ws.onclose = () => {
    state = markDisconnected(state);
    redraw();
    setTimeout(connectStream, 1500);
  };
}

async function teleport(name: string): Promise<void> {
  const camera = await api.anchor(name);
  state = setCamera(state, camera);
  syncCameraControls();
  await refreshScene();
}

function syncCameraControls(): void {
  $<HTMLInputElement>("cam-x").value = String(state.camera.x);
  $<HTMLInputElement>("cam-y").value = String(state.camera.y);
  $<HTMLInputElement>("cam-alt").value = String(state.camera.z);
}

async function boot(): Promise<void> {
  const info = await api.scenario();
  state = initialState(info.frame_count);
  viewport = {
    width: canvas.width, height: canvas.height,
    extent: info.extent_m as Viewport["extent"],
  };
  $<HTMLInputElement>("timeline").max = String(info.frame_count - 1);
  $("scenario-label").textContent =
    `${info.name} · ${info.grid_flux[0]}x${info.grid_flux[1]} · lod @ ${info.lod_distances.join("/")} m`;

  for (const name of await api.anchors()) {
    const btn = document.createElement("button");
    btn.textContent = `teleport: ${name}`;
    btn.onclick = () => void teleport(name);
    $("anchors").appendChild(btn);
  }

  $<HTMLSelectElement>("overlay").onchange = (ev) => {
    state = selectOverlay(state, (ev.target as HTMLSelectElement).value);
    loadOverlay();
  };
  $<HTMLInputElement>("timeline").oninput = async (ev) => {
    const frame = scrubTarget(state, Number((ev.target as HTMLInputElement).value));
    state = applyServerState(state, await api.control("seek", { frame }));
    loadOverlay();
    await refreshScene();
  };
  $("play").onclick = async () => {
    state = applyServerState(state, await api.control("play"));
    redraw();
  };
  $("pause").onclick = async () => {
    state = applyServerState(state, await api.control("pause"));
    redraw();
  };
  $<HTMLInputElement>("rate").onchange = async (ev) => {
    const rate = Number((ev.target as HTMLInputElement).value);
    if (rate > 0) state = applyServerState(state, await api.control("rate", { rate }));
  };

  for (const [id, key] of [["cam-x", "x"], ["cam-y", "y"], ["cam-alt", "z"]] as const) {
    $<HTMLInputElement>(id).oninput = async (ev) => {
      state = moveCamera(state, { [key]: Number((ev.target as HTMLInputElement).value) });
      await refreshScene();
    };
  }

  canvas.onclick = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const hit = stationAt(stationMarkers(stationsCache, viewport),
                          ev.clientX - rect.left, ev.clientY - rect.top);
    state = selectStation(state, hit ? hit.id : null);
    redraw();
  };

  $("search").onclick = () => void refreshTable();

  syncCameraControls();
  loadOverlay();
  await refreshTable();
  await refreshScene();
  connectStream();
}

void boot().catch(reportError);
