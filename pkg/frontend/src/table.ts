// Asset search table: server rows in, display cells out, values verbatim.

import type { AssetRow } from "./types.js";

export const TABLE_COLUMNS = [
  "station", "asset", "coverage (ha)", "budget", "tonnage",
  "mode", "availability", "personnel",
] as const;

export type TableCells = [string, string, number, number, number, string, string, number];

/** One display row per server row, same order, numbers untouched. */
export function tableRows(rows: AssetRow[]): TableCells[] {
  return rows.map((r) => [
    r.station_name,
    r.asset,
    r.coverage_area,
    r.budget,
    r.tonnage,
    r.operational_mode,
    r.availability,
    r.personnel,
  ]);
}

export function emptyMessage(rows: AssetRow[]): string | null {
  return rows.length === 0 ? "no matches" : null;
}
