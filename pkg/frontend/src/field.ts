/** Field view: rasterized temperature plot, a probe-able node overlay
 * whose markers carry the exact server values, a min/max legend, and
 * a hover readout. A mesh/field length mismatch replaces the whole
 * view with an error banner — never a partial render. */

import type { MeshJson } from "./api";
import { rasterizeField } from "./raster";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface FieldViewOptions {
  width?: number;
  height?: number;
}

function formatValue(value: number): string {
  return Math.abs(value) >= 1e-3 || value === 0
    ? value.toPrecision(6)
    : value.toExponential(4);
}

export function renderField(
  container: HTMLElement,
  mesh: MeshJson,
  values: number[],
  options: FieldViewOptions = {},
): void {
  const width = options.width ?? 420;
  const height = options.height ?? 420;
  container.replaceChildren();

  if (values.length !== mesh.nodes.length) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent =
      `cannot render: field has ${values.length} values but the mesh ` +
      `has ${mesh.nodes.length} nodes`;
    container.appendChild(banner);
    return;
  }

  const raster = rasterizeField(mesh, values, width, height);

  const view = document.createElement("div");
  view.className = "field-view";
  view.style.position = "relative";
  view.style.width = `${width}px`;

  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  canvas.className = "field-canvas";
  // Environments without a 2D canvas backend (e.g. jsdom) skip the
  // painting; the overlay, legend, and readout still render.
  const context =
    typeof CanvasRenderingContext2D !== "undefined"
      ? canvas.getContext("2d")
      : null;
  if (context) {
    const image = context.createImageData(width, height);
    image.data.set(raster.pixels);
    context.putImageData(image, 0, 0);
  }
  view.appendChild(canvas);

  const overlay = document.createElementNS(SVG_NS, "svg");
  overlay.setAttribute("class", "node-overlay");
  overlay.setAttribute("width", String(width));
  overlay.setAttribute("height", String(height));
  overlay.setAttribute("viewBox", `0 0 ${width} ${height}`);
  overlay.style.position = "absolute";
  overlay.style.left = "0";
  overlay.style.top = "0";

  const readout = document.createElement("div");
  readout.className = "hover-readout";
  readout.textContent = "hover a node to read its value";

  values.forEach((value, index) => {
    const [px, py] = raster.transform.toPixel(
      mesh.nodes[index][0],
      mesh.nodes[index][1],
    );
    const marker = document.createElementNS(SVG_NS, "circle");
    marker.setAttribute("class", "node-marker");
    marker.setAttribute("cx", px.toFixed(2));
    marker.setAttribute("cy", py.toFixed(2));
    marker.setAttribute("r", "4");
    marker.setAttribute("fill", "transparent");
    marker.setAttribute("data-node-index", String(index));
    marker.setAttribute("data-value", String(value));
    marker.addEventListener("mouseenter", () => {
      readout.textContent = `node ${index}: ${formatValue(value)}`;
    });
    overlay.appendChild(marker);
  });
  view.appendChild(overlay);

  const legend = document.createElement("div");
  legend.className = "field-legend";
  legend.setAttribute("data-min", String(raster.min));
  legend.setAttribute("data-max", String(raster.max));
  legend.textContent =
    `min ${formatValue(raster.min)} · max ${formatValue(raster.max)}`;

  container.appendChild(view);
  container.appendChild(legend);
  container.appendChild(readout);
}
