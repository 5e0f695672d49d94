/** Typed client for the reduced-order model service.
 *
 * Every number shown in the UI originates from these responses; the
 * client never computes physics on its own.
 */

export interface ParameterBox {
  mu0: [number, number];
  mu1: [number, number];
}

export interface ModelMetadata {
  id: string;
  n: number;
  parameter_box: ParameterBox;
  mesh: { refine: number; n_nodes: number; [key: string]: number };
  methods: string[];
}

export interface MeshJson {
  refine: number;
  nodes: [number, number][];
  triangles: [number, number, number][];
  subdomain: number[];
  boundary: {
    base: [number, number][];
    side: [number, number][];
    top: [number, number][];
  };
}

export interface SolveRequest {
  mu: [number, number];
  n?: number;
  method?: string;
  compare_fom?: boolean;
}

export interface SolveResponse {
  field: number[];
  s: number;
  s_average: number;
  eta_en?: number;
  effectivity?: number | null;
  online_ms: number;
  fom_ms?: number;
  warnings: string[];
}

export interface ConvergenceRow {
  n: number;
  mean_en_err: number;
  max_en_err: number;
  mean_eta: number;
  max_eta: number;
  mean_effectivity: number | null;
  mean_s_err: number;
}

export interface ConvergenceData {
  grid: string;
  rows: ConvergenceRow[];
}

/** Error raised for any non-2xx response, carrying the named field
 * when the service identified the offending part of the request. */
export class ApiError extends Error {
  status: number;
  field: string | null;

  constructor(status: number, message: string, field: string | null = null) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let message = `${response.status} ${response.statusText}`;
  let field: string | null = null;
  try {
    const body = await response.json();
    const detail = body.detail;
    if (typeof detail === "string") {
      message = detail;
    } else if (detail && typeof detail === "object") {
      message = detail.message ?? message;
      field = detail.field ?? null;
    }
  } catch {
    /* non-JSON body: keep the status line */
  }
  return new ApiError(response.status, message, field);
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw await parseError(response);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  listModels(): Promise<ModelMetadata[]> {
    return fetch(`${this.base}/api/models`).then((r) =>
      asJson<ModelMetadata[]>(r),
    );
  }

  model(id: string): Promise<ModelMetadata> {
    return fetch(`${this.base}/api/models/${id}`).then((r) =>
      asJson<ModelMetadata>(r),
    );
  }

  mesh(id: string): Promise<MeshJson> {
    return fetch(`${this.base}/api/models/${id}/mesh`).then((r) =>
      asJson<MeshJson>(r),
    );
  }

  solve(id: string, request: SolveRequest): Promise<SolveResponse> {
    return fetch(`${this.base}/api/models/${id}/solve`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    }).then((r) => asJson<SolveResponse>(r));
  }

  convergence(id: string, grid: string): Promise<ConvergenceData> {
    return fetch(
      `${this.base}/api/models/${id}/convergence?grid=${encodeURIComponent(grid)}`,
    ).then((r) => asJson<ConvergenceData>(r));
  }
}
