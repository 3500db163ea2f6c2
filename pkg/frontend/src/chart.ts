// Hand-rolled SVG line chart. Data points carry their exact server value in
// a data-value attribute so the page (and the tests) can trace every plotted
// number back to a response body.

import type { ChartLayout } from "./series";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderChart(layout: ChartLayout): string {
  const parts: string[] = [];
  parts.push(`<svg class="chart" viewBox="0 0 ${layout.width} ${layout.height}" ` +
             `width="100%" role="img">`);

  for (const tick of layout.yTicks) {
    parts.push(`<line class="grid" x1="${layout.xTicks.length ? layout.xTicks[0].x : 0}" ` +
               `y1="${tick.y}" x2="${layout.width - 14}" y2="${tick.y}"/>`);
    parts.push(`<text class="ytick" x="4" y="${tick.y + 4}">${esc(tick.label)}</text>`);
  }

  for (const tick of layout.xTicks) {
    parts.push(`<text class="xtick" data-step="${tick.step}" ` +
               `transform="translate(${tick.x},${layout.height - 52}) rotate(-38)">` +
               `${esc(tick.label)}</text>`);
  }

  for (const s of layout.series) {
    const pts = s.path.map((p) => `${p.x.toFixed(2)},${p.y.toFixed(2)}`).join(" ");
    const dash = s.dashed ? ` stroke-dasharray="7 5"` : "";
    parts.push(`<polyline class="line" fill="none" stroke="${s.color}"${dash} ` +
               `points="${pts}"/>`);
    for (const p of s.path) {
      parts.push(`<circle class="pt" data-session="${esc(s.session)}" ` +
                 `data-key="${esc(s.key)}" data-step="${p.step}" ` +
                 `data-value="${String(p.value)}" ` +
                 `cx="${p.x.toFixed(2)}" cy="${p.y.toFixed(2)}" r="3" ` +
                 `fill="${s.color}"/>`);
    }
  }

  parts.push("</svg>");
  return parts.join("");
}

export function renderLegend(layout: ChartLayout): string {
  if (!layout.series.length) return "";
  const items = layout.series.map((s) => {
    const dash = s.dashed ? "dashed" : "solid";
    return `<li class="legend-item"><span class="swatch ${dash}" ` +
           `style="border-color:${s.color}"></span>${esc(s.label)}</li>`;
  });
  return `<ul class="legend">${items.join("")}</ul>`;
}
