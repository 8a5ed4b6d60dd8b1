/** Grid map geometry: plain equirectangular projection of the CONUS frame
 * plus a data-driven color scale. No basemap; grid points are the map. */

import type { GridMetric, GridPoint } from "./types.js";

export const FRAME = {
  lonMin: -125,
  lonMax: -66,
  latMin: 23,
  latMax: 50,
};

export interface Projected {
  x: number; // 0..width
  y: number; // 0..height, north up
  point: GridPoint;
}

export function project(point: GridPoint, width: number, height: number): Projected {
  const x = ((point.lon - FRAME.lonMin) / (FRAME.lonMax - FRAME.lonMin)) * width;
  const y = ((FRAME.latMax - point.lat) / (FRAME.latMax - FRAME.latMin)) * height;
  return { x, y, point };
}

export function unproject(x: number, y: number, width: number, height: number): { lat: number; lon: number } {
  return {
    lon: FRAME.lonMin + (x / width) * (FRAME.lonMax - FRAME.lonMin),
    lat: FRAME.latMax - (y / height) * (FRAME.latMax - FRAME.latMin),
  };
}

export interface ColorScale {
  min: number;
  max: number;
  color(value: number): string;
}

/** Linear light-to-dark scale with bounds taken from the data. */
export function colorScale(points: GridPoint[], metric: GridMetric): ColorScale {
  const values = points.map((p) => p[metric]);
  const min = values.length ? Math.min(...values) : 0;
  const max = values.length ? Math.max(...values) : 1;
  const span = max - min || 1;
  return {
    min,
    max,
    color(value: number): string {
      const t = Math.min(Math.max((value - min) / span, 0), 1);
      const light = Math.round(92 - t * 62); // 92% (pale) down to 30% (dark)
      return `hsl(255, 65%, ${light}%)`;
    },
  };
}

/** Nearest projected point within `radius` pixels of a click, if any. */
export function hitTest(
  projected: Projected[],
  x: number,
  y: number,
  radius = 10,
): Projected | undefined {
  let best: Projected | undefined;
  let bestDistance = radius * radius;
  for (const p of projected) {
    const d = (p.x - x) ** 2 + (p.y - y) ** 2;
    if (d <= bestDistance) {
      best = p;
      bestDistance = d;
    }
  }
  return best;
}
