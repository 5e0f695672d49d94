/** Explorer state and the clamping rules tying controls to model
 * metadata. The conductivity slider works in log coordinates (the
 * parameter spans two decades); the flux slider is linear. */

import type { ModelMetadata, SolveResponse } from "./api";

export interface ExplorerState {
  modelId: string;
  mu0: number;
  mu1: number;
  n: number;
  method: string;
  compareFom: boolean;
  lastResponse: SolveResponse | null;
  inFlight: boolean;
}

export function initialState(meta: ModelMetadata): ExplorerState {
  const [lo0, hi0] = meta.parameter_box.mu0;
  const [lo1, hi1] = meta.parameter_box.mu1;
  return {
    modelId: meta.id,
    mu0: Math.sqrt(lo0 * hi0),
    mu1: (lo1 + hi1) / 2,
    n: meta.n,
    method: meta.methods.includes("rb") ? "rb" : meta.methods[0],
    compareFom: false,
    lastResponse: null,
    inFlight: false,
  };
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

/** Force every control into the bounds the model metadata allows. */
export function clampToModel(
  state: ExplorerState,
  meta: ModelMetadata,
): ExplorerState {
  const [lo0, hi0] = meta.parameter_box.mu0;
  const [lo1, hi1] = meta.parameter_box.mu1;
  return {
    ...state,
    mu0: clamp(state.mu0, lo0, hi0),
    mu1: clamp(state.mu1, lo1, hi1),
    n: Math.round(clamp(state.n, 1, meta.n)),
    method: meta.methods.includes(state.method) ? state.method : "rb",
  };
}

/** Map a slider position t in [0, 1] to a conductivity in [lo, hi]
 * uniformly in log space. */
export function sliderToMu0(t: number, lo: number, hi: number): number {
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  return Math.pow(10, la + clamp(t, 0, 1) * (lb - la));
}

/** Inverse of sliderToMu0. */
export function mu0ToSlider(mu0: number, lo: number, hi: number): number {
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  return clamp((Math.log10(mu0) - la) / (lb - la), 0, 1);
}
