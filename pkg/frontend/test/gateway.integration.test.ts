// Integration: boot the real gateway with the scripted provider from the
// generated fixtures, then drive it through the client exactly as the UI
// does. Loopback only.

import assert from 'node:assert/strict';
import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import net from 'node:net';
import os from 'node:os';
import path from 'node:path';
import { fileURLToPath } from 'node:url';
import { after, before, test } from 'node:test';

import { GatewayClient, GatewayError } from '../src/api.js';
import { renderChartSpec } from '../src/chart.js';
import { renderCitationMarks, renderRefPanel } from '../src/refs.js';
import { renderTable } from '../src/table.js';

const PYTHON = process.env.PYTHON ?? 'python3';
const REPO_ROOT = path.resolve(
  path.dirname(fileURLToPath(import.meta.url)), '..', '..', '..',
);

let workdir: string;
let server: ChildProcess | null = null;
let client: GatewayClient;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.listen(0, '127.0.0.1', () => {
      const address = srv.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

function run(args: string[]): void {
  const result = spawnSync(PYTHON, ['-m', 'basinbot.cli', ...args], {
    cwd: REPO_ROOT,
    encoding: 'utf-8',
  });
  assert.equal(result.status, 0,
    `command failed: ${args.join(' ')}\n${result.stdout}\n${result.stderr}`);
}

before(async () => {
  workdir = mkdtempSync(path.join(os.tmpdir(), 'basinbot-ui-'));
  run(['fixtures', 'gen', '--seed', '42', '--out', workdir]);
  run(['index', 'build', '--manifest', path.join(workdir, 'corpus_manifest.json'),
       '--out', path.join(workdir, 'index.bvi')]);

  const port = await freePort();
  server = spawn(PYTHON, ['-m', 'basinbot.cli', 'serve',
                          '--config', path.join(workdir, 'config_scripted.json'),
                          '--port', String(port)],
                 { cwd: REPO_ROOT, stdio: 'ignore' });
  client = new GatewayClient(`http://127.0.0.1:${port}`);

  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      await client.health();
      break;
    } catch {
      assert.ok(Date.now() < deadline, 'gateway did not come up in time');
      await new Promise((r) => setTimeout(r, 100));
    }
  }
}, { timeout: 60_000 });

after(() => {
  server?.kill('SIGTERM');
  rmSync(workdir, { recursive: true, force: true });
});

test('gateway: shows the four starter options in fixed order', async () => {
  const options = await client.getOptions();
  assert.deepEqual(options.map((o) => o.id), [
    'limpopo_library', 'realtime_analysis', 'export_generate', 'new_conversation',
  ]);
  assert.ok(options.every((o) => o.label.length > 0));
});

// The scripted provider replays ui_script.json: rainfall table answer,
// grouped-bar chart answer, then a three-reference document answer.
let sessionId: string;

test('gateway: monthly rainfall answer renders a 12-row table', async () => {
  sessionId = await client.createSession();
  const answer = await client.sendMessage(
    sessionId, 'Monthly rainfall for Shisakashanghondo in 2024?',
    'realtime_analysis');
  assert.ok(answer.table, 'answer should carry the tabular tool result');
  assert.equal(answer.table.rows.length, 12);
  assert.deepEqual(answer.table.columns,
    ['month', 'min_mm', 'max_mm', 'avg_mm', 'total_mm']);
  const html = renderTable(answer.table);
  assert.equal((html.match(/<tr>/g) ?? []).length, 13); // header + 12 months
});

test('gateway: grouped-bar chart spec renders with a 2-entry legend', async () => {
  const answer = await client.sendMessage(sessionId, 'Compare 2023 and 2024.');
  assert.ok(answer.chart_spec);
  assert.equal(answer.chart_spec.kind, 'grouped_bar');
  const html = renderChartSpec(answer.chart_spec);
  assert.equal((html.match(/legend-item/g) ?? []).length, 2);
  assert.doesNotMatch(html, /chart-warning/);
});

test('gateway: three-reference answer gets numbered citations', async () => {
  const answer = await client.sendMessage(sessionId, 'Which countries share the basin?');
  assert.equal(answer.refs.length, 3);
  const marks = renderCitationMarks(answer.refs, 'm3');
  assert.match(marks, /\[1\]/);
  assert.match(marks, /\[2\]/);
  assert.match(marks, /\[3\]/);
  const panel = renderRefPanel(answer.refs, 'm3');
  assert.equal((panel.match(/<li/g) ?? []).length, 3);
});

test('gateway: markdown export contains the numbered references', async () => {
  const { content, contentType } = await client.exportAnswer(sessionId, 'markdown');
  assert.match(contentType, /text\/markdown/);
  assert.match(content, /\[1\]/);
  assert.match(content, /\[2\]/);
  assert.match(content, /\[3\]/);
  assert.match(content, /doc /); // document labels resolve to doc ids
});

test('gateway: structured errors surface with their code', async () => {
  await assert.rejects(
    client.sendMessage('no-such-session', 'hello'),
    (err: unknown) => err instanceof GatewayError && err.code === 'unknown_session'
      && err.status === 404,
  );
});
