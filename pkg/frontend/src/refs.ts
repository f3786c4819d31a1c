// Numbered citations and the references panel. Citation numbers link to the
// panel entries; labels show document title + character span, or dataset id
// + query parameters, exactly as delivered by the gateway.

import { escapeHtml } from './markdown.js';
import type { SourceRef } from './types.js';

export function refLabel(ref: SourceRef): string {
  if (ref.kind === 'document') {
    const [start, end] = ref.char_span;
    return `${ref.title} (doc ${ref.doc_id}, chars ${start}..${end})`;
  }
  const params = Object.entries(ref.query_params)
    .map(([k, v]) => `${k}=${v}`)
    .join(', ');
  return `dataset ${ref.dataset_id} (${params}) retrieved ${ref.retrieved_at}`;
}

export function renderCitationMarks(refs: SourceRef[], messageId: string): string {
  return refs
    .map(
      (_, i) =>
        `<a class="citation" href="#ref-${messageId}-${i + 1}">[${i + 1}]</a>`,
    )
    .join('');
}

export function renderRefPanel(refs: SourceRef[], messageId: string): string {
  if (!refs.length) return '';
  const items = refs
    .map(
      (ref, i) =>
        `<li id="ref-${messageId}-${i + 1}" class="ref-entry ref-${ref.kind}">` +
        `<span class="ref-number">[${i + 1}]</span> ${escapeHtml(refLabel(ref))}</li>`,
    )
    .join('');
  return `<ol class="ref-panel">${items}</ol>`;
}
