import { mkdtempSync, readFileSync, statSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { parseCsv, requireColumns } from "../src/csv";
import { leastSquares } from "../src/fit";
import { runJob } from "../src/jobs";

const FIXTURES = join(__dirname, "fixtures");
const TRACE = join(FIXTURES, "linear_pair", "trace.csv");
const SUMMARY = join(FIXTURES, "linear_pair", "summary.txt");

// scalar recurrence rate of the fixture run: the squared energy distance of
// the first-eigenmode pair contracts by (1 + dt*k*mu)^2 per step, with
// mu = 8*(n+1)^2*sin(pi/(2(n+1)))^2 for n = 63, dt = 1e-3, k = 1
const EXPECTED_RATE = (() => {
  const n1 = 64;
  const mu = 2 * 4 * n1 * n1 * Math.sin(Math.PI / (2 * n1)) ** 2;
  return (2 * Math.log(1 + 1e-3 * mu)) / 1e-3;
})();

function outPath(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "plot-")), name);
}

describe("trace_decay", () => {
  it("writes a nonempty image whose fit matches the recurrence rate within 5%", () => {
    const out = outPath("trace.svg");
    const result = runJob({ kind: "trace_decay", inputs: [TRACE], summary: SUMMARY, output: out });
    expect(statSync(out).size).toBeGreaterThan(0);
    expect(result.slope).toBeDefined();
    expect(Math.abs(-result.slope! / EXPECTED_RATE - 1)).toBeLessThan(0.05);
  });

  it("caption slope equals an independent least-squares on the same rows to 1e-9", () => {
    const out = outPath("trace.svg");
    runJob({ kind: "trace_decay", inputs: [TRACE], summary: SUMMARY, output: out });
    const svg = readFileSync(out, "utf8");
    const match = svg.match(/log-slope fit: (-?[\d.eE+-]+) per unit time/);
    expect(match).not.toBeNull();
    const captionSlope = Number(match![1]);

    // independent recomputation on the same row selection
    const table = parseCsv(readFileSync(TRACE, "utf8"));
    const [t, w] = requireColumns(table, ["t", "w_a_sq"]);
    const wMax = Math.max(...w);
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < w.length; i++) {
      if (w[i] > 1e-12 * wMax) {
        xs.push(t[i]);
        ys.push(Math.log(w[i]));
      }
    }
    const { slope } = leastSquares(xs, ys);
    expect(Math.abs(slope - captionSlope)).toBeLessThan(1e-9);
  });

  it("does not modify its inputs", () => {
    const before = readFileSync(TRACE);
    runJob({ kind: "trace_decay", inputs: [TRACE], summary: SUMMARY, output: outPath("t.svg") });
    expect(readFileSync(TRACE).equals(before)).toBe(true);
  });

  it("fails loudly when a required column is missing", () => {
    const dir = mkdtempSync(join(tmpdir(), "plot-"));
    const broken = join(dir, "broken.csv");
    const lines = readFileSync(TRACE, "utf8").split("\n");
    // drop the w_a_sq column
    const doctored = lines
      .filter((l) => l.trim() !== "")
      .map((l) => l.split(",").filter((_, i) => i !== 1).join(","))
      .join("\n");
    writeFileSync(broken, doctored + "\n");
    expect(() =>
      runJob({ kind: "trace_decay", inputs: [broken], output: join(dir, "x.svg") }),
    ).toThrow(/'w_a_sq'/);
  });

  it("rejects an empty CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "plot-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "t,w_a_sq\n");
    expect(() =>
      runJob({ kind: "trace_decay", inputs: [empty], output: join(dir, "x.svg") }),
    ).toThrow(/no data rows/);
  });
});

describe("sweep", () => {
  it("renders the fixture sweep with its threshold marker", () => {
    const out = outPath("sweep.svg");
    const result = runJob({
      kind: "sweep",
      inputs: [join(FIXTURES, "sweep", "sweep.csv")],
      summary: join(FIXTURES, "sweep", "summary.txt"),
      output: out,
    });
    expect(result.rows).toBeGreaterThan(0);
    expect(statSync(out).size).toBeGreaterThan(0);
  });
});

describe("ratio_histogram", () => {
  it("renders the lemma-check ratios", () => {
    const out = outPath("ratios.svg");
    const result = runJob({
      kind: "ratio_histogram",
      inputs: [join(FIXTURES, "lemmas", "lemma_checks.csv")],
      output: out,
    });
    expect(result.rows).toBeGreaterThan(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("<rect");
  });
});

describe("cli", () => {
  it("exits 0 on success", () => {
    const out = outPath("cli.svg");
    const code = main(["trace_decay", "--in", TRACE, "--summary", SUMMARY, "--out", out]);
    expect(code).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
  });

  it("exits 2 on usage errors", () => {
    expect(main(["nonsense_kind", "--in", TRACE, "--out", "x.svg"])).toBe(2);
    expect(main(["trace_decay"])).toBe(2);
  });

  it("exits 1 and names the column on bad input", () => {
    const dir = mkdtempSync(join(tmpdir(), "plot-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "t,nope\n0,1\n1,2\n");
    const code = main(["trace_decay", "--in", bad, "--out", join(dir, "x.svg")]);
    expect(code).toBe(1);
  });
});
