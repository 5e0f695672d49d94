import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { DEFAULT_DEBOUNCE_MS } from "../src/debounce";
import { startExplorer } from "../src/main";
import {
  MODEL_ID,
  MockServer,
  RecordedCall,
  createMockServer,
  flushMicrotasks,
} from "./mockServer";
import solveCompare from "./fixtures/solve_rb_compare.json";
import solvePodRbf from "./fixtures/solve_pod_rbf.json";

let server: MockServer;
let root: HTMLElement;

beforeEach(() => {
  vi.useFakeTimers();
  server = createMockServer();
  server.install();
  root = document.createElement("div");
  document.body.replaceChildren(root);
});

afterEach(() => {
  server.restore();
  vi.useRealTimers();
});

function solveCalls(): RecordedCall[] {
  return server.calls.filter((call) => call.url.endsWith("/solve"));
}

async function settle(): Promise<void> {
  vi.advanceTimersByTime(DEFAULT_DEBOUNCE_MS);
  await flushMicrotasks();
}

async function boot(): Promise<void> {
  await startExplorer(root);
  await settle();
}

function markerValue(index: number): number {
  const marker = root.querySelector(
    `.node-marker[data-node-index="${index}"]`,
  );
  expect(marker, `marker ${index}`).not.toBeNull();
  return parseFloat(marker!.getAttribute("data-value") ?? "");
}

describe("explorer app", () => {
  it("boots, solves once, and renders the response field", async () => {
    await boot();
    expect(root.querySelector(".model-picker")?.textContent).toContain(
      MODEL_ID,
    );
    const calls = solveCalls();
    expect(calls).toHaveLength(1);
    const body = calls[0].body as { mu: [number, number]; n: number };
    // Defaults: log-midpoint conductivity, midpoint flux, full basis.
    expect(body.mu[0]).toBe(1);
    expect(body.mu[1]).toBe(0);
    expect(body.n).toBe(5);
    // Zero flux => uniform zero field straight from the response.
    expect(root.querySelectorAll(".node-marker")).toHaveLength(81);
    expect(markerValue(0)).toBe(0);
    expect(markerValue(40)).toBe(0);
    const sRow = root.querySelector('[data-key="output-s"] .number-value');
    expect(parseFloat(sRow?.textContent ?? "")).toBe(0);
  });

  it("collapses a flux-slider scrub into one request and shows the result", async () => {
    await boot();
    const slider = root.querySelector<HTMLInputElement>(".mu1-slider")!;
    for (const value of ["-0.2", "-0.4", "-0.6", "-0.8", "-1"]) {
      slider.value = value;
      slider.dispatchEvent(new Event("input"));
    }
    expect(solveCalls()).toHaveLength(1); // nothing sent mid-scrub
    await settle();
    const calls = solveCalls();
    expect(calls).toHaveLength(2);
    const body = calls[1].body as { mu: [number, number] };
    expect(body.mu[1]).toBe(-1);

    // Rendered nodal values equal the recorded response at probe nodes.
    for (const index of [0, 8, 40, 72, 80]) {
      expect(
        Object.is(markerValue(index), solveCompare.field[index]),
      ).toBe(true);
    }
    // The certified bound is displayed for the reduced-basis method.
    const etaRow = root.querySelector('[data-key="eta"]');
    expect(etaRow).not.toBeNull();
  });

  it("maps the conductivity slider logarithmically", async () => {
    await boot();
    const slider = root.querySelector<HTMLInputElement>(".mu0-slider")!;
    slider.value = "1000"; // far right = upper bound
    slider.dispatchEvent(new Event("input"));
    await settle();
    const calls = solveCalls();
    const body = calls[calls.length - 1].body as { mu: [number, number] };
    expect(body.mu[0]).toBeCloseTo(10, 12);
    slider.value = "500"; // halfway = log midpoint
    slider.dispatchEvent(new Event("input"));
    await settle();
    const mid = solveCalls();
    const midBody = mid[mid.length - 1].body as { mu: [number, number] };
    expect(midBody.mu[0]).toBeCloseTo(1, 12);
  });

  it("adds the comparison panel when compare is toggled", async () => {
    await boot();
    const slider = root.querySelector<HTMLInputElement>(".mu1-slider")!;
    slider.value = "-1";
    slider.dispatchEvent(new Event("input"));
    await settle();
    expect(root.querySelector('[data-key="effectivity"]')).toBeNull();

    const toggle = root.querySelector<HTMLInputElement>(".compare-toggle")!;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));
    await settle();
    const calls = solveCalls();
    const body = calls[calls.length - 1].body as { compare_fom: boolean };
    expect(body.compare_fom).toBe(true);
    const effRow = root.querySelector('[data-key="effectivity"]');
    expect(effRow).not.toBeNull();
    expect(
      parseFloat(effRow!.querySelector(".number-value")!.textContent ?? ""),
    ).toBeCloseTo(solveCompare.effectivity, 5);
    expect(
      root.querySelector('[data-key="fom-time"]'),
    ).not.toBeNull();
  });

  it("switches to a surrogate method and drops the bound display", async () => {
    await boot();
    const method = root.querySelector<HTMLSelectElement>(".method-select")!;
    method.value = "pod-rbf";
    method.dispatchEvent(new Event("change"));
    await settle();
    const calls = solveCalls();
    const body = calls[calls.length - 1].body as {
      method: string;
      n?: number;
    };
    expect(body.method).toBe("pod-rbf");
    expect(body.n).toBeUndefined();
    expect(root.querySelector('[data-key="eta"]')).toBeNull();
    expect(markerValue(40)).toBe(solvePodRbf.field[40]);
  });

  it("renders the convergence chart from the service payload", async () => {
    await boot();
    const panel = root.querySelector(".convergence-container")!;
    expect(panel.querySelectorAll(".series-path")).toHaveLength(3);
    expect(
      panel.querySelectorAll(".series-point.series-mean_eta").length,
    ).toBeGreaterThan(0);
  });
});
