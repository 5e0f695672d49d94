/** Wires the explorer together: model picker, parameter sliders, the
 * field view, the numbers panel, and the convergence chart. All
 * displayed numbers come from service responses. */

import {
  ApiClient,
  MeshJson,
  ModelMetadata,
  SolveRequest,
  SolveResponse,
} from "./api";
import { createSolveController, SolveFailure } from "./debounce";
import { renderField } from "./field";
import { renderConvergencePanel } from "./convergence";
import {
  ExplorerState,
  clampToModel,
  initialState,
  mu0ToSlider,
  sliderToMu0,
} from "./state";

const SLIDER_STEPS = 1000;

function element<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

function formatNumber(value: number): string {
  return Math.abs(value) >= 1e-3 || value === 0
    ? value.toPrecision(6)
    : value.toExponential(4);
}

function solveRequestFor(state: ExplorerState): SolveRequest {
  return {
    mu: [state.mu0, state.mu1],
    n: state.method === "rb" ? state.n : undefined,
    method: state.method,
    compare_fom: state.compareFom,
  };
}

export async function startExplorer(root: HTMLElement): Promise<void> {
  const api = new ApiClient("");
  root.replaceChildren();
  const heading = element("h1", "app-title", "Thermal block explorer");
  root.appendChild(heading);

  let models: ModelMetadata[];
  try {
    models = await api.listModels();
  } catch (error) {
    const banner = element(
      "div",
      "error-banner",
      `cannot reach the model service: ${String(error)}`,
    );
    const retry = element("button", "retry-button", "retry");
    retry.addEventListener("click", () => void startExplorer(root));
    root.append(banner, retry);
    return;
  }
  if (models.length === 0) {
    root.appendChild(element("div", "error-banner", "no models available"));
    return;
  }

  const picker = element("select", "model-picker");
  for (const model of models) {
    const option = element("option");
    option.value = model.id;
    option.textContent =
      `${model.id} — N=${model.n}, refine ${model.mesh.refine}`;
    picker.appendChild(option);
  }
  root.appendChild(picker);

  const workspace = element("div", "workspace");
  root.appendChild(workspace);

  picker.addEventListener("change", () =>
    void openModel(api, workspace, picker.value, models),
  );
  await openModel(api, workspace, models[0].id, models);
}

async function openModel(
  api: ApiClient,
  workspace: HTMLElement,
  modelId: string,
  models: ModelMetadata[],
): Promise<void> {
  const meta = models.find((m) => m.id === modelId);
  if (!meta) {
    return;
  }
  const mesh: MeshJson = await api.mesh(modelId);
  workspace.replaceChildren();

  let state = initialState(meta);

  const controls = element("div", "controls");
  const fieldContainer = element("div", "field-container");
  const numbers = element("div", "numbers-panel");
  const status = element("div", "status-area");
  const convergence = element("div", "convergence-container");
  workspace.append(controls, fieldContainer, numbers, status, convergence);

  const controller = createSolveController({
    api,
    modelId,
    onResult: (response: SolveResponse) => {
      state = { ...state, lastResponse: response, inFlight: false };
      status.replaceChildren();
      renderField(fieldContainer, mesh, response.field);
      renderNumbers(numbers, response);
    },
    onFailure: (failure: SolveFailure) => {
      state = { ...state, inFlight: false };
      status.replaceChildren();
      const banner = element("div", "error-banner");
      banner.textContent =
        failure.kind === "http"
          ? `request rejected${failure.field ? ` (${failure.field})` : ""}: ` +
            failure.message
          : `network failure: ${failure.message}`;
      status.appendChild(banner);
      if (failure.kind === "network") {
        const retry = element("button", "retry-button", "retry");
        retry.addEventListener("click", failure.retry);
        status.appendChild(retry);
      }
    },
    onInFlight: (inFlight: boolean) => {
      state = { ...state, inFlight };
      numbers.classList.toggle("in-flight", inFlight);
    },
  });

  const issue = (): void => {
    state = clampToModel(state, meta);
    controller.request(solveRequestFor(state));
  };

  buildControls(controls, meta, state, (next) => {
    state = { ...state, ...next };
    issue();
  });

  issue();
  try {
    const data = await api.convergence(modelId, "4x4");
    renderConvergencePanel(convergence, data.rows);
  } catch {
    convergence.appendChild(
      element("div", "error-banner", "convergence data unavailable"),
    );
  }
}

function buildControls(
  container: HTMLElement,
  meta: ModelMetadata,
  state: ExplorerState,
  onChange: (next: Partial<ExplorerState>) => void,
): void {
  const [lo0, hi0] = meta.parameter_box.mu0;
  const [lo1, hi1] = meta.parameter_box.mu1;

  const mu0Label = element("label", "control-label");
  mu0Label.textContent = `conductivity μ0 = ${state.mu0.toPrecision(4)}`;
  const mu0Slider = element("input", "mu0-slider");
  mu0Slider.type = "range";
  mu0Slider.min = "0";
  mu0Slider.max = String(SLIDER_STEPS);
  mu0Slider.step = "1";
  mu0Slider.value = String(
    Math.round(mu0ToSlider(state.mu0, lo0, hi0) * SLIDER_STEPS),
  );
  mu0Slider.addEventListener("input", () => {
    const mu0 = sliderToMu0(Number(mu0Slider.value) / SLIDER_STEPS, lo0, hi0);
    mu0Label.textContent = `conductivity μ0 = ${mu0.toPrecision(4)}`;
    onChange({ mu0 });
  });

  const mu1Label = element("label", "control-label");
  mu1Label.textContent = `base flux μ1 = ${state.mu1.toFixed(3)}`;
  const mu1Slider = element("input", "mu1-slider");
  mu1Slider.type = "range";
  mu1Slider.min = String(lo1);
  mu1Slider.max = String(hi1);
  mu1Slider.step = "0.001";
  mu1Slider.value = String(state.mu1);
  mu1Slider.addEventListener("input", () => {
    const mu1 = Number(mu1Slider.value);
    mu1Label.textContent = `base flux μ1 = ${mu1.toFixed(3)}`;
    onChange({ mu1 });
  });

  const nLabel = element("label", "control-label", `basis size n = ${state.n}`);
  const nSelect = element("select", "n-select");
  for (let n = 1; n <= meta.n; n++) {
    const option = element("option");
    option.value = String(n);
    option.textContent = String(n);
    if (n === state.n) {
      option.selected = true;
    }
    nSelect.appendChild(option);
  }
  nSelect.addEventListener("change", () => {
    nLabel.textContent = `basis size n = ${nSelect.value}`;
    onChange({ n: Number(nSelect.value) });
  });

  const methodSelect = element("select", "method-select");
  for (const method of meta.methods) {
    const option = element("option");
    option.value = method;
    option.textContent = method;
    if (method === state.method) {
      option.selected = true;
    }
    methodSelect.appendChild(option);
  }
  methodSelect.addEventListener("change", () =>
    onChange({ method: methodSelect.value }),
  );

  const compareLabel = element("label", "compare-label");
  const compareBox = element("input", "compare-toggle");
  compareBox.type = "checkbox";
  compareBox.checked = state.compareFom;
  compareBox.addEventListener("change", () =>
    onChange({ compareFom: compareBox.checked }),
  );
  compareLabel.append(compareBox, document.createTextNode(
    " compare against the full-order solve",
  ));

  container.append(
    mu0Label,
    mu0Slider,
    mu1Label,
    mu1Slider,
    nLabel,
    nSelect,
    methodSelect,
    compareLabel,
  );
}

function renderNumbers(
  container: HTMLElement,
  response: SolveResponse,
): void {
  container.replaceChildren();
  const rows: [string, string, string][] = [
    ["output-s", "output s", formatNumber(response.s)],
    ["s-average", "base average", formatNumber(response.s_average)],
  ];
  if (response.eta_en !== undefined) {
    rows.push(["eta", "certified bound η", formatNumber(response.eta_en)]);
  }
  if (response.effectivity !== undefined) {
    rows.push([
      "effectivity",
      "effectivity",
      response.effectivity === null
        ? "n/a (error at round-off)"
        : formatNumber(response.effectivity),
    ]);
  }
  rows.push(["online-time", "online time", `${response.online_ms.toFixed(3)} ms`]);
  if (response.fom_ms !== undefined) {
    rows.push(["fom-time", "full-order time", `${response.fom_ms.toFixed(3)} ms`]);
  }
  for (const [key, label, value] of rows) {
    const row = element("div", "number-row");
    row.setAttribute("data-key", key);
    row.append(
      element("span", "number-label", label),
      element("span", "number-value", value),
    );
    container.appendChild(row);
  }
  for (const warning of response.warnings) {
    container.appendChild(element("div", "warning-row", warning));
  }
}

const rootElement = document.getElementById("app");
if (rootElement) {
  void startExplorer(rootElement);
}
