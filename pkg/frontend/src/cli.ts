#!/usr/bin/env node
/** plot JOB_KIND --in CSV[,CSV...] --summary FILE --out IMAGE
 *
 * Renders one figure per invocation from detnodes CSV outputs. Exit 0 on a
 * written image, 2 on a usage error, 1 on bad inputs (missing columns,
 * empty CSVs, unreadable files).
 */

import { CsvError } from "./csv";
import { JOB_KINDS, JobKind, runJob } from "./jobs";

const USAGE = `usage: plot {${JOB_KINDS.join("|")}} --in CSV[,CSV...] [--summary FILE] --out IMAGE`;

export function main(argv: string[]): number {
  const args = [...argv];
  const kind = args.shift();
  if (kind === undefined || kind === "-h" || kind === "--help") {
    console.error(USAGE);
    return 2;
  }
  if (!(JOB_KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown job kind '${kind}'\n${USAGE}`);
    return 2;
  }
  let inputs: string[] = [];
  let summary: string | undefined;
  let output: string | undefined;
  while (args.length > 0) {
    const flag = args.shift()!;
    const value = args.shift();
    if (value === undefined) {
      console.error(`flag ${flag} needs a value\n${USAGE}`);
      return 2;
    }
    if (flag === "--in") inputs = value.split(",").filter((s) => s.length > 0);
    else if (flag === "--summary") summary = value;
    else if (flag === "--out") output = value;
    else {
      console.error(`unknown flag ${flag}\n${USAGE}`);
      return 2;
    }
  }
  if (inputs.length === 0 || output === undefined) {
    console.error(`--in and --out are required\n${USAGE}`);
    return 2;
  }
  try {
    const result = runJob({ kind: kind as JobKind, inputs, summary, output });
    const slope = result.slope !== undefined ? `, log-slope ${result.slope.toPrecision(8)}` : "";
    console.log(`wrote ${result.output} (${result.rows} rows${slope})`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError || err instanceof Error) {
      console.error(`plot failed: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
