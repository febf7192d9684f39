/** Minimal SVG line chart for the offset sweep; pure string builder. */

import type { WhatIfResult } from "./whatif.js";

const WIDTH = 560;
const HEIGHT = 260;
const MARGIN = { top: 16, right: 130, bottom: 34, left: 52 };

const COLORS = ["#1769aa", "#c62828", "#2e7d32", "#7b1fa2", "#ef6c00"];

export interface ChartSeries {
  policy: string;
  /** [offset, value] pairs in sweep order; gaps are omitted points */
  points: [number, number][];
}

export function seriesFrom(result: WhatIfResult): ChartSeries[] {
  return result.policies.map((policy) => ({
    policy,
    points: result.points
      .filter((p) => p.values !== null && policy in p.values)
      .map((p) => [p.offset, (p.values as Record<string, number>)[policy]] as [number, number]),
  }));
}

export function renderChartSvg(result: WhatIfResult): string {
  const series = seriesFrom(result);
  const values = series.flatMap((s) => s.points.map(([, v]) => v));
  const offsets = result.points.map((p) => p.offset);
  if (values.length === 0 || offsets.length === 0) {
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}"><text x="20" y="40">no data</text></svg>`;
  }
  const xMin = Math.min(...offsets);
  const xMax = Math.max(...offsets);
  const yMin = Math.min(...values);
  const yMax = Math.max(...values);
  const ySpan = yMax - yMin || 1e-6;
  const xSpan = xMax - xMin || 1e-6;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - xMin) / xSpan) * plotW;
  const sy = (y: number) => MARGIN.top + plotH - ((y - yMin) / ySpan) * plotH;

  const parts: string[] = [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" xmlns="http://www.w3.org/2000/svg">`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + plotH}" x2="${MARGIN.left + plotW}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#888"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#888"/>`,
  ];
  offsets.forEach((offset) => {
    parts.push(
      `<text x="${sx(offset)}" y="${HEIGHT - 10}" font-size="11" text-anchor="middle">` +
        `${offset.toFixed(1)} m</text>`,
    );
  });
  [yMin, yMax].forEach((v) => {
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${sy(v) + 4}" font-size="11" text-anchor="end">` +
        `${v.toFixed(3)}</text>`,
    );
  });
  series.forEach((s, i) => {
    if (s.points.length === 0) return;
    const color = COLORS[i % COLORS.length];
    const path = s.points.map(([x, y]) => `${sx(x).toFixed(1)},${sy(y).toFixed(1)}`).join(" ");
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="2" points="${path}"/>`);
    for (const [x, y] of s.points) {
      parts.push(`<circle cx="${sx(x).toFixed(1)}" cy="${sy(y).toFixed(1)}" r="3" fill="${color}"/>`);
    }
    const labelY = MARGIN.top + 14 + i * 16;
    parts.push(
      `<rect x="${WIDTH - MARGIN.right + 8}" y="${labelY - 9}" width="10" height="10" fill="${color}"/>`,
      `<text x="${WIDTH - MARGIN.right + 24}" y="${labelY}" font-size="11">${s.policy}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
