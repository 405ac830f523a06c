import { mkdtempSync, readFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { render, type FigureKind } from "../src/figures.js";

const SAMPLES = join(__dirname, "..", "samples");
const OUT = mkdtempSync(join(tmpdir(), "polarslice-figs-"));

function renderKind(kind: FigureKind, inputs: string[], name: string): string {
  const output = join(OUT, name);
  render({ kind, inputs: inputs.map((f) => join(SAMPLES, f)), output });
  return output;
}

describe("figure rendering from shipped sample CSVs", () => {
  it("renders the projection overlay", () => {
    const path = renderKind("overlay", ["overlay.csv"], "overlay.svg");
    const svg = readFileSync(path, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    // reference + value + thresholded series
    expect(svg.match(/<polyline/g)?.length).toBeGreaterThanOrEqual(3);
  });

  it("renders the error-versus-angle sweep", () => {
    const path = renderKind("sweep", ["angles.csv"], "sweep.svg");
    const svg = readFileSync(path, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<polyline/g)?.length).toBeGreaterThanOrEqual(3);
  });

  it("renders the threshold sweep panels", () => {
    const path = renderKind("threshold", ["sweep.csv"], "threshold.svg");
    const svg = readFileSync(path, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<polyline/g)?.length).toBeGreaterThanOrEqual(4);
  });

  it("renders the reconstruction heatmap with error panel", () => {
    const path = renderKind(
      "heatmap",
      ["reconstruction.csv", "reconstruction_error.csv"],
      "heatmap.svg",
    );
    const svg = readFileSync(path, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<rect/g)?.length).toBeGreaterThan(500);
    expect(existsSync(path)).toBe(true);
  });

  it("rejects unknown figure kinds", () => {
    expect(() =>
      render({ kind: "pie" as FigureKind, inputs: [join(SAMPLES, "sweep.csv")], output: join(OUT, "x.svg") }),
    ).toThrow(/unknown figure kind/);
  });

  it("rejects missing inputs", () => {
    expect(() =>
      render({ kind: "sweep", inputs: [join(SAMPLES, "does-not-exist.csv")], output: join(OUT, "x.svg") }),
    ).toThrow(/not found/);
  });

  it("rejects tables with missing columns", () => {
    expect(() =>
      render({ kind: "sweep", inputs: [join(SAMPLES, "overlay.csv")], output: join(OUT, "x.svg") }),
    ).toThrow(/column/);
  });
});
