/** Debounced solve pipeline with sequence-numbered responses.
 *
 * Slider scrubbing is collapsed to at most one request per debounce
 * window. Every dispatched request gets an increasing sequence
 * number; a settled response is applied only when it is the latest
 * one, so a slow early response can never overwrite a fresh one.
 */

import { ApiClient, ApiError, SolveRequest, SolveResponse } from "./api";

export interface SolveFailure {
  kind: "http" | "network";
  status: number | null;
  field: string | null;
  message: string;
  /** Re-issues the failed request immediately (no debounce). */
  retry: () => void;
}

export interface SolveControllerOptions {
  api: ApiClient;
  modelId: string;
  debounceMs?: number;
  onResult: (response: SolveResponse, request: SolveRequest) => void;
  onFailure: (failure: SolveFailure) => void;
  onInFlight: (inFlight: boolean) => void;
}

export interface SolveController {
  /** Schedule a solve for this request, debounced. */
  request(request: SolveRequest): void;
  /** Number of requests actually dispatched (for diagnostics). */
  dispatched(): number;
  dispose(): void;
}

export const DEFAULT_DEBOUNCE_MS = 150;

export function createSolveController(
  options: SolveControllerOptions,
): SolveController {
  const debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
  let timer: ReturnType<typeof setTimeout> | null = null;
  let pending: SolveRequest | null = null;
  let latestSeq = 0;
  let dispatchedCount = 0;
  let disposed = false;

  function dispatch(request: SolveRequest): void {
    const seq = ++latestSeq;
    dispatchedCount += 1;
    options.onInFlight(true);
    options.api
      .solve(options.modelId, request)
      .then((response) => {
        if (disposed || seq !== latestSeq) {
          return; // superseded: never rendered
        }
        options.onInFlight(false);
        options.onResult(response, request);
      })
      .catch((error: unknown) => {
        if (disposed || seq !== latestSeq) {
          return;
        }
        options.onInFlight(false);
        if (error instanceof ApiError) {
          options.onFailure({
            kind: "http",
            status: error.status,
            field: error.field,
            message: error.message,
            retry: () => dispatch(request),
          });
        } else {
          options.onFailure({
            kind: "network",
            status: null,
            field: null,
            message: error instanceof Error ? error.message : String(error),
            retry: () => dispatch(request),
          });
        }
      });
  }

  return {
    request(request: SolveRequest): void {
      pending = request;
      if (timer !== null) {
        clearTimeout(timer);
      }
      timer = setTimeout(() => {
        timer = null;
        if (pending !== null && !disposed) {
          const next = pending;
          pending = null;
          dispatch(next);
        }
      }, debounceMs);
    },
    dispatched(): number {
      return dispatchedCount;
    },
    dispose(): void {
      disposed = true;
      if (timer !== null) {
        clearTimeout(timer);
        timer = null;
      }
    },
  };
}
