import { beforeEach, describe, expect, it } from "vitest";

import type { ConvergenceData } from "../src/api";
import { renderConvergencePanel } from "../src/convergence";
import convergenceFixture from "./fixtures/convergence.json";

const data = convergenceFixture as unknown as ConvergenceData;

let container: HTMLElement;

beforeEach(() => {
  container = document.createElement("div");
  document.body.replaceChildren(container);
});

function point(series: string, n: number): SVGCircleElement {
  const node = container.querySelector<SVGCircleElement>(
    `.series-point.series-${series}[data-n="${n}"]`,
  );
  expect(node, `point ${series} @ n=${n}`).not.toBeNull();
  return node!;
}

function valueOf(series: string, n: number): number {
  return parseFloat(point(series, n).getAttribute("data-value") ?? "");
}

function pixelYOf(series: string, n: number): number {
  return parseFloat(point(series, n).getAttribute("cy") ?? "");
}

describe("renderConvergencePanel", () => {
  it("plots exactly the values the service reported", () => {
    renderConvergencePanel(container, data.rows);
    for (const row of data.rows) {
      expect(Object.is(valueOf("mean_en_err", row.n), row.mean_en_err)).toBe(
        true,
      );
      expect(Object.is(valueOf("max_en_err", row.n), row.max_en_err)).toBe(
        true,
      );
      expect(Object.is(valueOf("mean_eta", row.n), row.mean_eta)).toBe(true);
    }
  });

  it("keeps the certified bound above the error at every basis size", () => {
    renderConvergencePanel(container, data.rows);
    for (const row of data.rows) {
      // In value space the bound dominates...
      expect(valueOf("mean_eta", row.n)).toBeGreaterThanOrEqual(
        valueOf("mean_en_err", row.n),
      );
      // ...and on the log-scale chart its marker sits at or above the
      // error marker (smaller y pixel = higher on screen).
      expect(pixelYOf("mean_eta", row.n)).toBeLessThanOrEqual(
        pixelYOf("mean_en_err", row.n),
      );
    }
  });

  it("draws one path and one point per row for each series", () => {
    renderConvergencePanel(container, data.rows);
    for (const series of ["mean_en_err", "max_en_err", "mean_eta"]) {
      expect(
        container.querySelectorAll(`.series-path.series-${series}`),
      ).toHaveLength(1);
      expect(
        container.querySelectorAll(`.series-point.series-${series}`),
      ).toHaveLength(data.rows.length);
    }
  });

  it("re-renders idempotently", () => {
    renderConvergencePanel(container, data.rows);
    renderConvergencePanel(container, data.rows);
    expect(container.querySelectorAll("svg")).toHaveLength(1);
  });

  it("shows a banner when there is nothing to plot", () => {
    renderConvergencePanel(container, []);
    expect(container.querySelector(".error-banner")).not.toBeNull();
    expect(container.querySelector("svg")).toBeNull();
  });
});
