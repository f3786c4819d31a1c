// Markdown-lite renderer: paragraphs, headings, unordered lists and pipe
// tables. Returns an HTML string; all input text is escaped first, so model
// output can never inject markup.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function renderInline(text: string): string {
  let html = escapeHtml(text);
  html = html.replace(/\*\*([^*]+)\*\*/g, '<strong>$1</strong>');
  html = html.replace(/`([^`]+)`/g, '<code>$1</code>');
  return html;
}

function isTableBlock(lines: string[]): boolean {
  return lines.length >= 2 && lines.every((l) => l.trim().startsWith('|'));
}

function splitRow(line: string): string[] {
  const trimmed = line.trim().replace(/^\|/, '').replace(/\|$/, '');
  return trimmed.split('|').map((cell) => cell.trim());
}

function renderPipeTable(lines: string[]): string {
  const header = splitRow(lines[0] ?? '');
  let bodyLines = lines.slice(1);
  if (bodyLines.length && /^[\s|:-]+$/.test(bodyLines[0] ?? '')) {
    bodyLines = bodyLines.slice(1); // separator row
  }
  const head = header.map((c) => `<th>${renderInline(c)}</th>`).join('');
  const body = bodyLines
    .map((line) => `<tr>${splitRow(line).map((c) => `<td>${renderInline(c)}</td>`).join('')}</tr>`)
    .join('');
  return `<table class="md-table"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
}

export function renderMarkdownLite(text: string): string {
  const blocks = text.replace(/\r\n/g, '\n').split(/\n{2,}/);
  const out: string[] = [];
  for (const block of blocks) {
    const lines = block.split('\n').filter((l) => l.trim() !== '');
    if (!lines.length) continue;
    const headingMatch = /^(#{1,4})\s+(.*)$/.exec(lines[0] ?? '');
    if (headingMatch && lines.length === 1) {
      const level = headingMatch[1]!.length;
      out.push(`<h${level}>${renderInline(headingMatch[2] ?? '')}</h${level}>`);
      continue;
    }
    if (lines.every((l) => l.trim().startsWith('- '))) {
      const items = lines
        .map((l) => `<li>${renderInline(l.trim().slice(2))}</li>`)
        .join('');
      out.push(`<ul>${items}</ul>`);
      continue;
    }
    if (isTableBlock(lines)) {
      out.push(renderPipeTable(lines));
      continue;
    }
    out.push(`<p>${lines.map(renderInline).join('<br>')}</p>`);
  }
  return out.join('\n');
}
