// Spawns the twin service against a freshly generated scenario so parity
// tests compare the console against the real API.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const PORT = 8741;
export const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let scenarioDir = "";

async function waitForHealth(deadlineMs: number): Promise<void> {
  const deadline = Date.now() + deadlineMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("twin service did not come up");
}

export default async function setup(): Promise<() => void> {
  scenarioDir = mkdtempSync(join(tmpdir(), "emberfield-console-"));
  const gen = spawnSync("python3", [
    "-m", "emberfield", "gen", "--out", scenarioDir,
    "--seed", "7", "--width", "48", "--height", "48", "--frames", "12",
    "--wind-deg", "45", "--wind-speed", "6", "--stations", "5",
  ], { stdio: "inherit" });
  if (gen.status !== 0) throw new Error("scenario generation failed");

  server = spawn("python3", [
    "-m", "emberfield", "serve", "--scenario", scenarioDir,
    "--port", String(PORT),
  ], { stdio: ["ignore", "inherit", "inherit"] });
  await waitForHealth(30_000);

  return () => {
    server?.kill("SIGTERM");
    rmSync(scenarioDir, { recursive: true, force: true });
  };
}
