/** Least-squares log-slope of a decaying positive series. */

export interface LogSlopeFit {
  slope: number;
  intercept: number;
  rowsUsed: number;
}

/** Ordinary least squares of y against x. */
export function leastSquares(x: number[], y: number[]): { slope: number; intercept: number } {
  const n = x.length;
  if (n < 2) {
    throw new Error(`need at least 2 points for a least-squares fit, got ${n}`);
  }
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx === 0) {
    throw new Error("degenerate fit: all abscissae equal");
  }
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}

/** Fit log(values) ~ slope * t + c over the rows above the rounding floor
 * (a relative cutoff of the series maximum), mirroring the solver's own
 * treatment of decayed-to-noise tails. */
export function logSlopeFit(times: number[], values: number[], relFloor = 1e-12): LogSlopeFit {
  const vmax = Math.max(...values);
  if (!(vmax > 0)) {
    throw new Error("log-slope fit needs at least one positive value");
  }
  const t: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < values.length; i++) {
    if (values[i] > relFloor * vmax) {
      t.push(times[i]);
      ly.push(Math.log(values[i]));
    }
  }
  const { slope, intercept } = leastSquares(t, ly);
  return { slope, intercept, rowsUsed: t.length };
}
