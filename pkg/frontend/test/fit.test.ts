import { describe, expect, it } from "vitest";

import { leastSquares, logSlopeFit } from "../src/fit";

describe("leastSquares", () => {
  it("recovers an exact line", () => {
    const x = [0, 1, 2, 3, 4];
    const y = x.map((v) => 2.5 * v - 1.25);
    const { slope, intercept } = leastSquares(x, y);
    expect(slope).toBeCloseTo(2.5, 12);
    expect(intercept).toBeCloseTo(-1.25, 12);
  });

  it("rejects degenerate input", () => {
    expect(() => leastSquares([1], [1])).toThrow();
    expect(() => leastSquares([2, 2, 2], [1, 2, 3])).toThrow(/degenerate/);
  });
});

describe("logSlopeFit", () => {
  it("recovers an exact exponential rate", () => {
    const t = Array.from({ length: 40 }, (_, i) => i * 0.05);
    const w = t.map((ti) => 3.0 * Math.exp(-7.25 * ti));
    const fit = logSlopeFit(t, w);
    expect(fit.slope).toBeCloseTo(-7.25, 10);
    expect(fit.rowsUsed).toBe(40);
  });

  it("drops rows below the rounding floor", () => {
    const t = [0, 1, 2, 3];
    const w = [1, 1e-3, 1e-20, 1e-20]; // last two are noise-floor rows
    const fit = logSlopeFit(t, w, 1e-12);
    expect(fit.rowsUsed).toBe(2);
  });

  it("needs a positive value somewhere", () => {
    expect(() => logSlopeFit([0, 1], [0, 0])).toThrow(/positive/);
  });
});
