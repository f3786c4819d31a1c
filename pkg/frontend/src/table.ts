// Render a tabular tool result exactly as received: the gateway already
// formats the cell values (rounding happens server-side), so cells are
// stringified verbatim and never recomputed here.

import { escapeHtml } from './markdown.js';
import type { TableData } from './types.js';

export function isTableData(value: unknown): value is TableData {
  if (typeof value !== 'object' || value === null) return false;
  const t = value as TableData;
  return Array.isArray(t.columns) && Array.isArray(t.rows);
}

export function renderTable(table: TableData): string {
  const head = table.columns
    .map((c) => `<th>${escapeHtml(String(c))}</th>`)
    .join('');
  const body = table.rows
    .map((row) => {
      const cells = row
        .map((cell) => `<td>${cell === null ? '' : escapeHtml(String(cell))}</td>`)
        .join('');
      return `<tr>${cells}</tr>`;
    })
    .join('');
  return (
    `<table class="result-table"><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}
