/** Software rasterizer for nodal fields on triangle meshes.
 *
 * Colors are interpolated per vertex with barycentric weights — this
 * is purely a display transform of server-provided numbers. Kept free
 * of canvas APIs so it runs (and is tested) in any environment.
 */

import type { MeshJson } from "./api";
import { valueToColor } from "./colormap";

export interface ViewTransform {
  toPixel(x: number, y: number): [number, number];
}

export function makeTransform(
  mesh: MeshJson,
  width: number,
  height: number,
  margin = 12,
): ViewTransform {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const [x, y] of mesh.nodes) {
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min(
    (width - 2 * margin) / spanX,
    (height - 2 * margin) / spanY,
  );
  const offsetX = (width - scale * spanX) / 2;
  const offsetY = (height - scale * spanY) / 2;
  return {
    toPixel(x: number, y: number): [number, number] {
      // Flip y so larger coordinates are drawn higher on screen.
      return [offsetX + (x - minX) * scale, height - offsetY - (y - minY) * scale];
    },
  };
}

export interface RasterResult {
  width: number;
  height: number;
  /** RGBA pixels, row-major; alpha 0 outside the mesh. */
  pixels: Uint8ClampedArray;
  min: number;
  max: number;
  transform: ViewTransform;
}

export function rasterizeField(
  mesh: MeshJson,
  values: number[],
  width: number,
  height: number,
): RasterResult {
  if (values.length !== mesh.nodes.length) {
    throw new Error(
      `field has ${values.length} values but the mesh has ` +
        `${mesh.nodes.length} nodes`,
    );
  }
  const transform = makeTransform(mesh, width, height);
  const pixels = new Uint8ClampedArray(width * height * 4);
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    min = Math.min(min, v);
    max = Math.max(max, v);
  }

  for (const [ia, ib, ic] of mesh.triangles) {
    const [ax, ay] = transform.toPixel(mesh.nodes[ia][0], mesh.nodes[ia][1]);
    const [bx, by] = transform.toPixel(mesh.nodes[ib][0], mesh.nodes[ib][1]);
    const [cx, cy] = transform.toPixel(mesh.nodes[ic][0], mesh.nodes[ic][1]);
    const area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (area === 0) {
      continue;
    }
    const left = Math.max(0, Math.floor(Math.min(ax, bx, cx)));
    const right = Math.min(width - 1, Math.ceil(Math.max(ax, bx, cx)));
    const top = Math.max(0, Math.floor(Math.min(ay, by, cy)));
    const bottom = Math.min(height - 1, Math.ceil(Math.max(ay, by, cy)));
    for (let py = top; py <= bottom; py++) {
      for (let px = left; px <= right; px++) {
        const x = px + 0.5;
        const y = py + 0.5;
        const wa =
          ((bx - x) * (cy - y) - (by - y) * (cx - x)) / area;
        const wb =
          ((cx - x) * (ay - y) - (cy - y) * (ax - x)) / area;
        const wc = 1 - wa - wb;
        const eps = -1e-9;
        if (wa < eps || wb < eps || wc < eps) {
          continue;
        }
        const value =
          wa * values[ia] + wb * values[ib] + wc * values[ic];
        const [r, g, b] = valueToColor(value, min, max);
        const offset = (py * width + px) * 4;
        pixels[offset] = r;
        pixels[offset + 1] = g;
        pixels[offset + 2] = b;
        pixels[offset + 3] = 255;
      }
    }
  }
  return { width, height, pixels, min, max, transform };
}
