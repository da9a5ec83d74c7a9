import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { SchemaError, SWEEP_COLUMNS, TRACE_COLUMNS } from "../src/csv";
import { decayOption, heatmapOption, sweepOption } from "../src/figures";
import { syntheticTrace } from "./helpers";

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "plotkit-"));
}

describe("decayOption", () => {
  it("builds log-log axes with one guide per slope", () => {
    const path = join(tempDir(), "trace.csv");
    syntheticTrace(path);
    const option = decayOption([path], [-2, -1]);
    expect((option.xAxis as { type: string }).type).toBe("log");
    expect((option.yAxis as { type: string }).type).toBe("log");
    expect(option.series).toHaveLength(3);
  });

  it("guide with the matching slope is parallel to a pure power law", () => {
    const path = join(tempDir(), "trace.csv");
    syntheticTrace(path, 2);
    const option = decayOption([path], [-2]);
    const [curve, guide] = option.series as { data: [number, number][] }[];
    const ratioAt = (pts: [number, number][], i: number) => pts[i][1] / pts[0][1];
    const last = curve.data.length - 1;
    // both fall by the same factor across the window
    expect(ratioAt(curve.data, last)).toBeCloseTo(
      ratioAt(guide.data, guide.data.length - 1),
      6
    );
  });

  it("rejects an empty input list and an all-zero trace", () => {
    expect(() => decayOption([], [-2])).toThrow(SchemaError);
    const path = join(tempDir(), "zero.csv");
    writeFileSync(
      path,
      TRACE_COLUMNS.join(",") + "\n" + [0, 0, 0, 0, 0, 0, 0, 0, 0, 0].join(",") + "\n"
    );
    expect(() => decayOption([path], [-2])).toThrow(/no plottable samples/);
  });
});

describe("heatmapOption", () => {
  it("maps a rectangular grid to category axes", () => {
    const path = join(tempDir(), "grid.csv");
    const lines = ["t,x,cond_iii,cond_iv"];
    for (const t of [1, 10]) {
      for (const x of [0, 1, 2]) {
        lines.push([t, x, t - x, t + x].join(","));
      }
    }
    writeFileSync(path, lines.join("\n") + "\n");
    const option = heatmapOption(path);
    expect((option.xAxis as { data: string[] }).data).toHaveLength(3);
    expect((option.yAxis as { data: string[] }).data).toHaveLength(2);
    const series = (option.series as { data: unknown[] }[])[0];
    expect(series.data).toHaveLength(6);
  });

  it("rejects an empty grid", () => {
    const path = join(tempDir(), "grid.csv");
    writeFileSync(path, "t,x,cond_iii,cond_iv\n");
    expect(() => heatmapOption(path)).toThrow(/empty condition grid/);
  });
});

describe("sweepOption", () => {
  it("plots fitted rows sorted by value and skips error rows", () => {
    const path = join(tempDir(), "sweep.csv");
    writeFileSync(
      path,
      SWEEP_COLUMNS.join(",") +
        "\nV0,6.0,2.9,True,True,ok" +
        "\nV0,-1.0,nan,False,False,error: amplitude" +
        "\nV0,1.0,1.0,True,True,ok\n"
    );
    const option = sweepOption(path);
    const series = (option.series as { data: [number, number][] }[])[0];
    expect(series.data).toEqual([
      [1.0, 1.0],
      [6.0, 2.9],
    ]);
  });

  it("rejects a sweep with no fitted rows", () => {
    const path = join(tempDir(), "sweep.csv");
    writeFileSync(path, SWEEP_COLUMNS.join(",") + "\nV0,-1.0,nan,False,False,error: x\n");
    expect(() => sweepOption(path)).toThrow(SchemaError);
  });
});
