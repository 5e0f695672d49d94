/** Fixed sequential colormap (viridis anchor points, linearly
 * interpolated). The palette never changes between renders, so equal
 * values always map to equal colors. */

export type Rgb = [number, number, number];

const STOPS: Rgb[] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

/** Color at t in [0, 1] along the palette. */
export function colorAt(t: number): Rgb {
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (STOPS.length - 1);
  const index = Math.min(Math.floor(scaled), STOPS.length - 2);
  const frac = scaled - index;
  const a = STOPS[index];
  const b = STOPS[index + 1];
  return [
    Math.round(a[0] + frac * (b[0] - a[0])),
    Math.round(a[1] + frac * (b[1] - a[1])),
    Math.round(a[2] + frac * (b[2] - a[2])),
  ];
}

/** Map a value inside [min, max] to a palette color; a degenerate
 * range (uniform field) maps everything to the palette midpoint. */
export function valueToColor(value: number, min: number, max: number): Rgb {
  if (max <= min) {
    return colorAt(0.5);
  }
  return colorAt((value - min) / (max - min));
}

export function cssColor(rgb: Rgb): string {
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}
