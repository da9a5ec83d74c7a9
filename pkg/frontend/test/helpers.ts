import { writeFileSync } from "fs";

import { TRACE_COLUMNS } from "../src/csv";

/** Trace whose energy is exactly t^-alpha on t = 1..100 (t = 0 row dropped
 * by the decay figure's positivity filter). */
export function syntheticTrace(path: string, alpha = 2): void {
  const lines = [TRACE_COLUMNS.join(",")];
  for (let t = 0; t <= 100; t++) {
    const e = t === 0 ? 1 : Math.pow(t, -alpha);
    lines.push([t, e, 0, 0, 0.5, 0, 0, 0, 0, 1].join(","));
  }
  writeFileSync(path, lines.join("\n") + "\n");
}
