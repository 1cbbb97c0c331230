// Thin fetch client for the twin service. Control messages are
// fire-and-forget from the UI's perspective; state is always reconciled from
// the response body.

import type {
  AssetFilters,
  AssetRow,
  CameraPayload,
  PlaybackState,
  ScenarioInfo,
  SceneFrame,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`api ${status}: ${detail}`);
  }
}

async function body<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const doc = (await res.json()) as { detail?: string };
      if (doc.detail) detail = doc.detail;
    } catch {
      // non-json error body; keep statusText
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class TwinClient {
  constructor(readonly baseUrl: string) {}

  scenario(): Promise<ScenarioInfo> {
    return fetch(`${this.baseUrl}/scenario`).then((r) => body<ScenarioInfo>(r));
  }

  state(): Promise<PlaybackState> {
    return fetch(`${this.baseUrl}/state`).then((r) => body<PlaybackState>(r));
  }

  control(cmd: "play" | "pause" | "seek" | "rate", args: { frame?: number; rate?: number } = {}):
      Promise<PlaybackState> {
    return fetch(`${this.baseUrl}/control`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ cmd, ...args }),
    }).then((r) => body<PlaybackState>(r));
  }

  scene(camera: CameraPayload): Promise<SceneFrame> {
    return fetch(`${this.baseUrl}/scene`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ camera }),
    }).then((r) => body<SceneFrame>(r));
  }

  searchAssets(filters: AssetFilters): Promise<AssetRow[]> {
    return fetch(`${this.baseUrl}/stations/search`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(filters),
    })
      .then((r) => body<{ rows: AssetRow[] }>(r))
      .then((doc) => doc.rows);
  }

  allAssets(): Promise<AssetRow[]> {
    return fetch(`${this.baseUrl}/stations`)
      .then((r) => body<{ rows: AssetRow[] }>(r))
      .then((doc) => doc.rows);
  }

  anchors(): Promise<string[]> {
    return fetch(`${this.baseUrl}/anchors`)
      .then((r) => body<{ anchors: string[] }>(r))
      .then((doc) => doc.anchors);
  }

  anchor(name: string): Promise<CameraPayload> {
    return fetch(`${this.baseUrl}/anchors/${encodeURIComponent(name)}`)
      .then((r) => body<{ name: string; camera: CameraPayload }>(r))
      .then((doc) => doc.camera);
  }

  rasterUrl(kind: string, frame: number): string {
    return `${this.baseUrl}/raster/${kind}?frame=${frame}`;
  }

  streamUrl(): string {
    return this.baseUrl.replace(/^http/, "ws") + "/stream";
  }
}
