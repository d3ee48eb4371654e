/** Run summaries are flat `key = value` text files; numbers parse as
 * floats, everything else stays a string. */

import { readFileSync } from "fs";

export type Summary = Map<string, string>;

export function parseSummary(text: string): Summary {
  const out: Summary = new Map();
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const eq = line.indexOf("=");
    if (eq < 0) continue;
    out.set(line.slice(0, eq).trim(), line.slice(eq + 1).trim());
  }
  return out;
}

export function readSummary(path: string): Summary {
  return parseSummary(readFileSync(path, "utf8"));
}

export function summaryNumber(summary: Summary, key: string): number | undefined {
  const raw = summary.get(key);
  if (raw === undefined) return undefined;
  const val = Number(raw);
  return Number.isFinite(val) ? val : undefined;
}
