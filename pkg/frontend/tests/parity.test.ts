// Console/API parity: what the console would display must equal what the
// service returns directly. Runs against the live twin service spawned by
// server.setup.ts.

import { beforeAll, describe, expect, it } from "vitest";

import { TwinClient } from "../src/api.js";
import { applyServerState, initialState, scrubTarget, setCamera } from "../src/state.js";
import { tableRows } from "../src/table.js";
import type { AssetFilters } from "../src/types.js";
import { BASE } from "./server.setup.js";

const api = new TwinClient(BASE);

// deterministic xorshift so failures reproduce
function rng(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s ^= s << 13; s >>>= 0;
    s ^= s >> 17;
    s ^= s << 5; s >>>= 0;
    return s / 0xffffffff;
  };
}

beforeAll(async () => {
  await api.control("pause");
  await api.control("seek", { frame: 0 });
});

describe("asset search parity", () => {
  it("table rows equal direct API rows for 20 random filter combinations", async () => {
    const rand = rng(0xf1e1d);
    const modes = [undefined, "ground", "aerial", "mixed"];
    const avail = [undefined, "available", "deployed", "maintenance"];
    for (let trial = 0; trial < 20; trial++) {
      const filters: AssetFilters = {};
      if (rand() > 0.5) filters.min_coverage = Math.floor(rand() * 5000);
      if (rand() > 0.5) filters.max_budget = Math.floor(rand() * 1_000_000);
      if (rand() > 0.5) filters.min_tonnage = rand() * 20;
      const m = modes[Math.floor(rand() * modes.length)];
      if (m) filters.mode = m;
      const a = avail[Math.floor(rand() * avail.length)];
      if (a) filters.availability = a;

      // what the console renders
      const uiCells = tableRows(await api.searchAssets(filters));
      // raw wire payload
      const res = await fetch(`${BASE}/stations/search`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(filters),
      });
      const raw = (await res.json()) as { rows: Record<string, unknown>[] };
      expect(uiCells.length).toBe(raw.rows.length);
      raw.rows.forEach((row, i) => {
        expect(uiCells[i]).toEqual([
          row.station_name, row.asset, row.coverage_area, row.budget,
          row.tonnage, row.operational_mode, row.availability, row.personnel,
        ]);
      });
    }
  });

  it("empty filters mirror the full station listing", async () => {
    const all = await api.allAssets();
    const searched = await api.searchAssets({});
    expect(searched).toEqual(all);
  });
});

describe("teleport parity", () => {
  it("sets the view camera exactly to the /anchors payload", async () => {
    const names = await api.anchors();
    expect(names).toContain("fire-origin");
    const payload = await api.anchor("fire-origin");
    let view = initialState(12);
    view = setCamera(view, payload);
    expect(view.camera).toEqual(payload);

    // and the scene queried with that camera is the same the server returns
    // for the same camera (no console-side math in between)
    const a = await api.scene(view.camera);
    const b = await api.scene(payload);
    expect(a).toEqual(b);
  });
});

describe("timeline parity", () => {
  it("scrub mirrors server seek, including the clamp", async () => {
    const info = await api.scenario();
    let view = initialState(info.frame_count);
    for (const target of [3, 7, 0, 11, 500, -4]) {
      const frame = scrubTarget(view, target);
      view = applyServerState(view, await api.control("seek", { frame }));
      const server = await api.state();
      expect(view.timeline).toBe(server.frame);
      expect(server.frame).toBe(Math.max(0, Math.min(target, info.frame_count - 1)));
    }
  });

  it("scrub-then-play walks the same frame sequence as server seek-then-play", async () => {
    const observe = async (): Promise<number[]> => {
      const seen: number[] = [];
      const deadline = Date.now() + 6000;
      while (Date.now() < deadline && seen.length < 4) {
        const f = (await api.state()).frame;
        if (seen.length === 0 || f !== seen[seen.length - 1]) seen.push(f);
        await new Promise((r) => setTimeout(r, 20));
      }
      return seen;
    };

    await api.control("rate", { rate: 5 });

    // console path: scrub to 2, then play
    let view = initialState(12);
    view = applyServerState(view, await api.control("seek", { frame: scrubTarget(view, 2) }));
    await api.control("play");
    const uiSeq = await observe();
    await api.control("pause");

    // direct server path: seek(2) + play
    await api.control("seek", { frame: 2 });
    await api.control("play");
    const serverSeq = await observe();
    await api.control("pause");

    expect(uiSeq).toEqual(serverSeq);
    expect(uiSeq[0]).toBe(2);
    for (let i = 1; i < uiSeq.length; i++) expect(uiSeq[i]).toBe(uiSeq[i - 1] + 1);
  });
});

describe("lod visibility parity", () => {
  it("near and far cameras return different server-assigned tiers", async () => {
    await api.control("seek", { frame: 5 });
    const anchor = await api.anchor("fire-origin");
    const near = await api.scene({ ...anchor, z: anchor.z - 700 });
    const far = await api.scene({ x: -400_000, y: -400_000, z: 60_000,
                                  yaw: 0, pitch: -90, fov: 60 });
    const nearLods = new Set(near.entries.map((e) => e[12]));
    const farLods = new Set(far.entries.map((e) => e[12]));
    expect(nearLods.has(0)).toBe(true);
    expect([...farLods]).toEqual([2]);
    // multiplier shown for far emitters is the server's 0.4, untouched
    expect(new Set(far.entries.map((e) => e[13]))).toEqual(new Set([0.4]));
  });
});
