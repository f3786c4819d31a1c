// Unit tests for the DOM-free renderers.

import assert from 'node:assert/strict';
import { test } from 'node:test';

import { renderChartSpec, validateChartSpec } from '../src/chart.js';
import { escapeHtml, renderMarkdownLite } from '../src/markdown.js';
import { refLabel, renderCitationMarks, renderRefPanel } from '../src/refs.js';
import { renderTable } from '../src/table.js';
import type { ChartSpec, SourceRef, TableData } from '../src/types.js';

// --- markdown-lite ---------------------------------------------------------

test('markdown: paragraphs split on blank lines', () => {
  const html = renderMarkdownLite('First block.\n\nSecond block.');
  assert.match(html, /<p>First block\.<\/p>/);
  assert.match(html, /<p>Second block\.<\/p>/);
});

test('markdown: unordered lists', () => {
  const html = renderMarkdownLite('- one\n- two\n- three');
  assert.equal((html.match(/<li>/g) ?? []).length, 3);
  assert.match(html, /<ul>/);
});

test('markdown: pipe tables', () => {
  const html = renderMarkdownLite('| a | b |\n| --- | --- |\n| 1 | 2 |');
  assert.match(html, /<table class="md-table">/);
  assert.match(html, /<th>a<\/th>/);
  assert.match(html, /<td>2<\/td>/);
});

test('markdown: headings and inline emphasis', () => {
  const html = renderMarkdownLite('# Title\n\nthis is **bold** and `code`');
  assert.match(html, /<h1>Title<\/h1>/);
  assert.match(html, /<strong>bold<\/strong>/);
  assert.match(html, /<code>code<\/code>/);
});

test('markdown: html is escaped', () => {
  const html = renderMarkdownLite('<script>alert(1)</script>');
  assert.doesNotMatch(html, /<script>/);
  assert.match(html, /&lt;script&gt;/);
});

test('escapeHtml covers the four specials', () => {
  assert.equal(escapeHtml('<a href="x">&'), '&lt;a href=&quot;x&quot;&gt;&amp;');
});

// --- tables -----------------------------------------------------------------

const MONTH_TABLE: TableData = {
  columns: ['month', 'min_mm', 'max_mm', 'avg_mm', 'total_mm'],
  rows: Array.from({ length: 12 }, (_, i) => [
    `2024-${String(i + 1).padStart(2, '0')}`, 0.0, 17.0, 1.2, 36.91,
  ]),
};

test('table: twelve data rows, header intact', () => {
  const html = renderTable(MONTH_TABLE);
  assert.equal((html.match(/<tr>/g) ?? []).length, 13); // header + 12
  assert.equal((html.match(/<th>/g) ?? []).length, 5);
  assert.match(html, /<td>36\.91<\/td>/);
});

test('table: null cells render empty, values verbatim', () => {
  const html = renderTable({ columns: ['a'], rows: [[null], ['7.50']] });
  assert.match(html, /<td><\/td>/);
  assert.match(html, /<td>7\.50<\/td>/); // no client-side reformatting
});

// --- charts -----------------------------------------------------------------

const GROUPED: ChartSpec = {
  kind: 'grouped_bar',
  title: 'Rain compare',
  x_axis: { label: 'Month', unit: null },
  y_axis: { label: 'Rainfall', unit: 'mm' },
  series: [
    { label: '2023', points: [{ x: 'Jan', y: 10 }, { x: 'Feb', y: 5 }] },
    { label: '2024', points: [{ x: 'Jan', y: 7 }, { x: 'Feb', y: 12 }] },
  ],
};

test('chart: grouped bar renders two legend entries', () => {
  const html = renderChartSpec(GROUPED);
  assert.equal((html.match(/legend-item/g) ?? []).length, 2);
  assert.match(html, />2023</);
  assert.match(html, />2024</);
});

test('chart: one rect per point per series', () => {
  const html = renderChartSpec(GROUPED);
  assert.equal((html.match(/<rect/g) ?? []).length, 4);
});

test('chart: line kind uses polylines and circles', () => {
  const spec: ChartSpec = { ...GROUPED, kind: 'line' };
  const html = renderChartSpec(spec);
  assert.equal((html.match(/<polyline/g) ?? []).length, 2);
  assert.equal((html.match(/<circle/g) ?? []).length, 4);
});

test('chart: y values appear verbatim in hover titles', () => {
  const html = renderChartSpec(GROUPED);
  assert.match(html, /2024 Feb: 12</);
});

test('chart: malformed spec falls back to raw JSON with warning', () => {
  const html = renderChartSpec({ kind: 'pie', series: 'nope' });
  assert.match(html, /chart-warning/);
  assert.match(html, /<pre>/);
});

test('chart: validator accepts the real shapes only', () => {
  assert.equal(validateChartSpec(GROUPED), true);
  assert.equal(validateChartSpec({ ...GROUPED, kind: 'donut' }), false);
  assert.equal(validateChartSpec(null), false);
  assert.equal(
    validateChartSpec({
      ...GROUPED,
      series: [{ label: 'x', points: [{ x: 'Jan', y: Number.NaN }] }],
    }),
    false,
  );
});

test('chart: empty series still renders a valid figure', () => {
  const html = renderChartSpec({ ...GROUPED, series: [] });
  assert.match(html, /<svg/);
  assert.doesNotMatch(html, /chart-warning/);
});

// --- refs --------------------------------------------------------------------

const REFS: SourceRef[] = [
  { kind: 'document', doc_id: 'basin-overview', title: 'Basin Overview',
    char_span: [0, 937] },
  { kind: 'document', doc_id: 'reservoir-register', title: 'Reservoir Register',
    char_span: [100, 800] },
  { kind: 'dataset', dataset_id: 'synthetic-basin-seed42',
    query_params: { tool: 'monthly_rainfall', year: '2024' },
    retrieved_at: '2025-01-15T12:00:00+00:00' },
];

test('refs: citation marks are numbered links', () => {
  const html = renderCitationMarks(REFS, 'm1');
  assert.match(html, /\[1\]/);
  assert.match(html, /\[2\]/);
  assert.match(html, /\[3\]/);
  assert.match(html, /href="#ref-m1-3"/);
});

test('refs: panel lists one entry per ref with anchors', () => {
  const html = renderRefPanel(REFS, 'm1');
  assert.equal((html.match(/<li/g) ?? []).length, 3);
  assert.match(html, /id="ref-m1-1"/);
  assert.match(html, /Basin Overview \(doc basin-overview, chars 0\.\.937\)/);
});

test('refs: dataset labels carry id, params and retrieval time', () => {
  const label = refLabel(REFS[2]!);
  assert.match(label, /synthetic-basin-seed42/);
  assert.match(label, /tool=monthly_rainfall/);
  assert.match(label, /2025-01-15T12:00:00/);
});

test('refs: empty list renders nothing', () => {
  assert.equal(renderRefPanel([], 'm1'), '');
});
