// Client-side rendering of ChartSpec JSON (line, bar, grouped_bar) to
// inline SVG. The spec is pure data from the gateway; rendering only maps
// values to pixel coordinates. No numeric labels are synthesized: the only
// numbers shown (hover titles) are the y values exactly as received.
// A malformed spec falls back to a raw JSON block with a warning.

import { escapeHtml } from './markdown.js';
import type { ChartSpec } from './types.js';

const WIDTH = 640;
const HEIGHT = 300;
const MARGIN = { top: 36, right: 16, bottom: 48, left: 44 };
const COLORS = ['#2563eb', '#d97706', '#059669', '#dc2626', '#7c3aed', '#0d9488'];

export function validateChartSpec(spec: unknown): spec is ChartSpec {
  if (typeof spec !== 'object' || spec === null) return false;
  const s = spec as ChartSpec;
  if (!['line', 'bar', 'grouped_bar'].includes(s.kind)) return false;
  if (!Array.isArray(s.series)) return false;
  for (const series of s.series) {
    if (typeof series.label !== 'string' || !Array.isArray(series.points)) return false;
    for (const p of series.points) {
      if (typeof p.x !== 'string' || typeof p.y !== 'number' || Number.isNaN(p.y)) {
        return false;
      }
    }
  }
  return true;
}

function color(i: number): string {
  return COLORS[i % COLORS.length]!;
}

export function renderChartSpec(spec: unknown): string {
  if (!validateChartSpec(spec)) {
    const raw = escapeHtml(JSON.stringify(spec, null, 2));
    return (
      '<div class="chart-fallback"><p class="chart-warning">' +
      'Chart specification could not be rendered; raw data shown instead.</p>' +
      `<pre>${raw}</pre></div>`
    );
  }

  const categories = spec.series[0] ? spec.series[0].points.map((p) => p.x) : [];
  const values = spec.series.flatMap((s) => s.points.map((p) => p.y));
  const lo = Math.min(0, ...values);
  const hi = Math.max(...values, lo + 1e-9);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const yPix = (v: number): number =>
    MARGIN.top + plotH - ((v - lo) / (hi - lo)) * plotH;
  const slotW = categories.length ? plotW / categories.length : plotW;
  const xSlot = (i: number): number => MARGIN.left + i * slotW;

  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" ` +
    `aria-label="${escapeHtml(spec.title)}" class="chart chart-${spec.kind}">`,
  );
  parts.push(`<text x="${WIDTH / 2}" y="20" text-anchor="middle" ` +
    `class="chart-title">${escapeHtml(spec.title)}</text>`);
  // axis lines only; tick values are not synthesized client-side
  parts.push(`<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
    `y2="${MARGIN.top + plotH}" class="axis"/>`);
  parts.push(`<line x1="${MARGIN.left}" y1="${yPix(Math.max(lo, 0))}" ` +
    `x2="${MARGIN.left + plotW}" y2="${yPix(Math.max(lo, 0))}" class="axis"/>`);

  categories.forEach((label, i) => {
    parts.push(
      `<text x="${xSlot(i) + slotW / 2}" y="${HEIGHT - MARGIN.bottom + 16}" ` +
      `text-anchor="middle" class="x-label">${escapeHtml(label)}</text>`,
    );
  });

  if (spec.kind === 'line') {
    spec.series.forEach((series, si) => {
      const coords = series.points.map(
        (p, i) => `${xSlot(i) + slotW / 2},${yPix(p.y)}`,
      );
      parts.push(`<polyline fill="none" stroke="${color(si)}" stroke-width="2" ` +
        `points="${coords.join(' ')}"/>`);
      series.points.forEach((p, i) => {
        parts.push(
          `<circle cx="${xSlot(i) + slotW / 2}" cy="${yPix(p.y)}" r="3" ` +
          `fill="${color(si)}"><title>${escapeHtml(p.x)}: ${String(p.y)}</title></circle>`,
        );
      });
    });
  } else {
    const groups = spec.kind === 'grouped_bar' ? spec.series.length : 1;
    const innerW = (slotW * 0.8) / Math.max(groups, 1);
    spec.series.forEach((series, si) => {
      series.points.forEach((p, i) => {
        const x = xSlot(i) + slotW * 0.1 + (spec.kind === 'grouped_bar' ? si * innerW : 0);
        const w = spec.kind === 'grouped_bar' ? innerW : slotW * 0.8;
        const top = yPix(Math.max(p.y, 0));
        const bottom = yPix(Math.min(p.y, 0));
        const h = Math.max(bottom - top, 0.5);
        parts.push(
          `<rect x="${x}" y="${top}" width="${w}" height="${h}" fill="${color(si)}">` +
          `<title>${escapeHtml(series.label)} ${escapeHtml(p.x)}: ${String(p.y)}</title></rect>`,
        );
      });
    });
  }

  const yLabel = spec.y_axis
    ? `${spec.y_axis.label}${spec.y_axis.unit ? ` (${spec.y_axis.unit})` : ''}`
    : '';
  if (yLabel) {
    parts.push(`<text x="14" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${MARGIN.top + plotH / 2})" class="y-title">` +
      `${escapeHtml(yLabel)}</text>`);
  }
  parts.push('</svg>');

  const legend = spec.series
    .map(
      (s, si) =>
        `<span class="legend-item"><span class="legend-swatch" ` +
        `style="background:${color(si)}"></span>${escapeHtml(s.label)}</span>`,
    )
    .join('');
  return (
    `<figure class="chart-figure">${parts.join('')}` +
    `<figcaption class="chart-legend">${legend}</figcaption></figure>`
  );
}
