/** Convergence panel: mean/max error and the certified bound per
 * basis size on a log-scale chart, drawn as SVG straight from the
 * server payload. */

import type { ConvergenceRow } from "./api";

const SVG_NS = "http://www.w3.org/2000/svg";

const SERIES: {
  key: "mean_en_err" | "max_en_err" | "mean_eta";
  label: string;
  color: string;
}[] = [
  { key: "mean_en_err", label: "mean error", color: "#1f77b4" },
  { key: "max_en_err", label: "max error", color: "#ff7f0e" },
  { key: "mean_eta", label: "certified bound", color: "#2ca02c" },
];

export interface ChartLayout {
  width?: number;
  height?: number;
  margin?: number;
}

export function renderConvergencePanel(
  container: HTMLElement,
  rows: ConvergenceRow[],
  layout: ChartLayout = {},
): void {
  const width = layout.width ?? 460;
  const height = layout.height ?? 300;
  const margin = layout.margin ?? 42;
  container.replaceChildren();

  if (rows.length === 0) {
    const empty = document.createElement("div");
    empty.className = "error-banner";
    empty.textContent = "no convergence data";
    container.appendChild(empty);
    return;
  }

  const ns = rows.map((row) => row.n);
  const positives: number[] = [];
  for (const row of rows) {
    for (const { key } of SERIES) {
      if (row[key] > 0) {
        positives.push(row[key]);
      }
    }
  }
  const logMin = Math.floor(Math.log10(Math.min(...positives)));
  const logMax = Math.ceil(Math.log10(Math.max(...positives)));
  const nMin = Math.min(...ns);
  const nMax = Math.max(...ns);

  const toX = (n: number): number =>
    nMax === nMin
      ? width / 2
      : margin + ((n - nMin) / (nMax - nMin)) * (width - 2 * margin);
  const toY = (value: number): number =>
    height -
    margin -
    ((Math.log10(value) - logMin) / (logMax - logMin || 1)) *
      (height - 2 * margin);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "convergence-chart");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);

  // Decade grid lines with labels.
  for (let decade = logMin; decade <= logMax; decade++) {
    const y = toY(Math.pow(10, decade));
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(margin));
    line.setAttribute("x2", String(width - margin));
    line.setAttribute("y1", y.toFixed(1));
    line.setAttribute("y2", y.toFixed(1));
    line.setAttribute("class", "grid-line");
    line.setAttribute("stroke", "#ddd");
    svg.appendChild(line);
    const tick = document.createElementNS(SVG_NS, "text");
    tick.setAttribute("x", "4");
    tick.setAttribute("y", (y + 4).toFixed(1));
    tick.setAttribute("class", "tick-label");
    tick.setAttribute("font-size", "10");
    tick.textContent = `1e${decade}`;
    svg.appendChild(tick);
  }
  for (const n of ns) {
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", toX(n).toFixed(1));
    label.setAttribute("y", String(height - margin + 16));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("font-size", "10");
    label.textContent = String(n);
    svg.appendChild(label);
  }

  for (const { key, label, color } of SERIES) {
    const points = rows.filter((row) => row[key] > 0);
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute(
      "d",
      points
        .map(
          (row, index) =>
            `${index === 0 ? "M" : "L"}${toX(row.n).toFixed(1)},` +
            `${toY(row[key]).toFixed(1)}`,
        )
        .join(" "),
    );
    path.setAttribute("class", `series-path series-${key}`);
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", color);
    path.setAttribute("stroke-width", "1.5");
    svg.appendChild(path);
    for (const row of points) {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("class", `series-point series-${key}`);
      dot.setAttribute("cx", toX(row.n).toFixed(1));
      dot.setAttribute("cy", toY(row[key]).toFixed(1));
      dot.setAttribute("r", "3");
      dot.setAttribute("fill", color);
      dot.setAttribute("data-n", String(row.n));
      dot.setAttribute("data-series", key);
      dot.setAttribute("data-value", String(row[key]));
      svg.appendChild(dot);
    }
    const entry = document.createElementNS(SVG_NS, "text");
    entry.setAttribute("x", String(margin + 6));
    entry.setAttribute(
      "y",
      String(margin + 14 * (SERIES.findIndex((s) => s.key === key) + 1)),
    );
    entry.setAttribute("font-size", "11");
    entry.setAttribute("fill", color);
    entry.setAttribute("class", "series-label");
    entry.textContent = label;
    svg.appendChild(entry);
  }

  container.appendChild(svg);
}
