// Learning-curve SVG: macro-F1 and accuracy per iteration, rendered as an
// SVG string from history records. Pure string construction keeps it
// testable without a DOM.

import type { HistoryRecord } from "./types.js";

export interface ChartSpec {
  width: number;
  height: number;
  padding: number;
}

const DEFAULT_SPEC: ChartSpec = { width: 460, height: 180, padding: 28 };

export const SERIES: Array<{ key: "macro_f1" | "accuracy"; color: string; label: string }> = [
  { key: "macro_f1", color: "#2563eb", label: "macro-F1" },
  { key: "accuracy", color: "#059669", label: "accuracy" },
];

function points(
  history: HistoryRecord[],
  key: "macro_f1" | "accuracy",
  spec: ChartSpec,
): string {
  const n = history.length;
  const maxT = Math.max(1, n - 1);
  const inner = {
    w: spec.width - 2 * spec.padding,
    h: spec.height - 2 * spec.padding,
  };
  return history
    .map((rec, i) => {
      const x = spec.padding + (inner.w * (n === 1 ? 0 : i / maxT));
      const y = spec.padding + inner.h * (1 - Math.min(1, Math.max(0, rec[key])));
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

export function learningCurveSvg(
  history: HistoryRecord[],
  spec: ChartSpec = DEFAULT_SPEC,
): string {
  const { width, height, padding } = spec;
  const parts: string[] = [
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="learning curve">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="none"/>`,
  ];
  // y gridlines at 0, 0.5, 1
  for (const frac of [0, 0.5, 1]) {
    const y = padding + (height - 2 * padding) * (1 - frac);
    parts.push(
      `<line x1="${padding}" y1="${y}" x2="${width - padding}" y2="${y}" ` +
        `stroke="#d4d4d8" stroke-width="1"/>`,
      `<text x="4" y="${y + 4}" font-size="10" fill="#71717a">${frac.toFixed(1)}</text>`,
    );
  }
  if (history.length > 0) {
    for (const series of SERIES) {
      parts.push(
        `<polyline fill="none" stroke="${series.color}" stroke-width="2" ` +
          `data-series="${series.key}" points="${points(history, series.key, spec)}"/>`,
      );
    }
    for (const series of SERIES) {
      const coords = points(history, series.key, spec).split(" ");
      for (const pt of coords) {
        const [x, y] = pt.split(",");
        parts.push(
          `<circle cx="${x}" cy="${y}" r="2.5" fill="${series.color}" ` +
            `data-series="${series.key}"/>`,
        );
      }
    }
  }
  const legendY = height - 6;
  SERIES.forEach((series, i) => {
    const x = padding + i * 110;
    parts.push(
      `<rect x="${x}" y="${legendY - 8}" width="10" height="3" fill="${series.color}"/>`,
      `<text x="${x + 14}" y="${legendY - 3}" font-size="10" fill="#3f3f46">${series.label}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}

/** Marker count per series equals the number of history points. */
export function pointCount(svg: string, key: "macro_f1" | "accuracy"): number {
  const re = new RegExp(`<circle[^>]*data-series="${key}"`, "g");
  return (svg.match(re) ?? []).length;
}
