// Browser wiring: starter options, message thread, references panel, chart
// and table rendering, export buttons. One in-flight message at a time.

import { GatewayClient, GatewayError } from './api.js';
import { renderChartSpec } from './chart.js';
import { renderMarkdownLite } from './markdown.js';
import { renderCitationMarks, renderRefPanel } from './refs.js';
import { renderTable } from './table.js';
import type { AnswerPayload, StarterOption } from './types.js';

const BASE_URL = (window as { BASINBOT_BASE_URL?: string }).BASINBOT_BASE_URL ?? '';

class App {
  private client = new GatewayClient(BASE_URL);
  private sessionId: string | null = null;
  private pendingOption: string | null = null;
  private lastAnswer: AnswerPayload | null = null;
  private messageCounter = 0;
  private busy = false;

  private thread = document.getElementById('thread')!;
  private optionsBar = document.getElementById('options')!;
  private banner = document.getElementById('banner')!;
  private input = document.getElementById('composer-input') as HTMLInputElement;
  private sendButton = document.getElementById('send') as HTMLButtonElement;
  private exportButtons = Array.from(
    document.querySelectorAll<HTMLButtonElement>('button[data-export]'),
  );

  async start(): Promise<void> {
    this.sendButton.addEventListener('click', () => void this.send());
    this.input.addEventListener('keydown', (ev) => {
      if (ev.key === 'Enter' && !ev.shiftKey) {
        ev.preventDefault();
        void this.send();
      }
    });
    for (const button of this.exportButtons) {
      button.addEventListener('click', () => void this.export(button));
    }
    await this.loadOptions();
    this.refreshControls();
  }

  private async loadOptions(): Promise<void> {
    this.banner.hidden = true;
    try {
      const options = await this.client.getOptions();
      this.renderOptions(options);
    } catch {
      this.showRetryBanner();
    }
  }

  private showRetryBanner(): void {
    this.banner.hidden = false;
    this.banner.innerHTML = '';
    this.banner.append('Backend unreachable. ');
    const retry = document.createElement('button');
    retry.textContent = 'Retry';
    retry.addEventListener('click', () => void this.loadOptions());
    this.banner.append(retry);
  }

  private renderOptions(options: StarterOption[]): void {
    this.optionsBar.innerHTML = '';
    for (const option of options) {
      const button = document.createElement('button');
      button.className = 'option-button';
      button.dataset.optionId = option.id;
      button.textContent = option.label;
      button.addEventListener('click', () => void this.chooseOption(option));
      this.optionsBar.append(button);
    }
  }

  private async chooseOption(option: StarterOption): Promise<void> {
    if (option.id === 'new_conversation') {
      this.sessionId = await this.client.createSession();
      this.thread.innerHTML = '';
      this.lastAnswer = null;
      this.pendingOption = null;
      this.refreshControls();
      return;
    }
    this.pendingOption = option.id;
    for (const button of Array.from(
      this.optionsBar.querySelectorAll<HTMLButtonElement>('.option-button'),
    )) {
      button.classList.toggle('selected', button.dataset.optionId === option.id);
    }
    this.input.focus();
  }

  private async ensureSession(): Promise<string> {
    if (!this.sessionId) {
      this.sessionId = await this.client.createSession();
    }
    return this.sessionId;
  }

  private async send(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || this.busy) return;
    this.busy = true;
    this.refreshControls();
    this.appendUserMessage(text);
    this.input.value = '';
    const placeholder = this.appendPendingMessage();
    try {
      const session = await this.ensureSession();
      const option = this.pendingOption ?? undefined;
      this.pendingOption = null;
      const answer = await this.client.sendMessage(session, text, option);
      this.lastAnswer = answer;
      placeholder.replaceWith(this.renderAnswer(answer));
    } catch (err) {
      placeholder.replaceWith(this.renderError(err));
    } finally {
      this.busy = false;
      this.refreshControls();
    }
  }

  private appendUserMessage(text: string): void {
    const el = document.createElement('div');
    el.className = 'message user';
    el.textContent = text;
    this.thread.append(el);
    el.scrollIntoView();
  }

  private appendPendingMessage(): HTMLElement {
    const el = document.createElement('div');
    el.className = 'message assistant pending';
    el.textContent = 'Working on it...';
    this.thread.append(el);
    el.scrollIntoView();
    return el;
  }

  private renderAnswer(answer: AnswerPayload): HTMLElement {
    const id = `m${++this.messageCounter}`;
    const el = document.createElement('div');
    el.className = 'message assistant';
    let html = `<div class="answer-text">${renderMarkdownLite(answer.text)}`;
    if (answer.refs.length) {
      html += `<span class="citations">${renderCitationMarks(answer.refs, id)}</span>`;
    }
    html += '</div>';
    if (answer.table) {
      html += renderTable(answer.table);
    }
    if (answer.chart_spec) {
      html += renderChartSpec(answer.chart_spec);
    }
    html += renderRefPanel(answer.refs, id);
    el.innerHTML = html;
    el.scrollIntoView();
    return el;
  }

  private renderError(err: unknown): HTMLElement {
    const el = document.createElement('div');
    el.className = 'message assistant error';
    const message =
      err instanceof GatewayError ? `${err.code}: ${err.message}` : String(err);
    el.textContent = `Request failed. ${message}`;
    return el;
  }

  private refreshControls(): void {
    this.sendButton.disabled = this.busy;
    this.input.disabled = this.busy;
    for (const button of this.exportButtons) {
      const format = button.dataset.export!;
      if (!this.lastAnswer) {
        button.disabled = true;
        button.title = 'Nothing to export yet';
      } else if (format === 'csv' && !this.lastAnswer.table) {
        button.disabled = true;
        button.title = 'The last answer has no tabular result';
      } else {
        button.disabled = this.busy;
        button.title = `Download the latest answer as ${format}`;
      }
    }
  }

  private async export(button: HTMLButtonElement): Promise<void> {
    const format = button.dataset.export as 'markdown' | 'csv' | 'json';
    if (!this.sessionId) return;
    try {
      const { content, contentType } = await this.client.exportAnswer(
        this.sessionId,
        format,
      );
      const extension = format === 'markdown' ? 'md' : format;
      const blob = new Blob([content], { type: contentType });
      const url = URL.createObjectURL(blob);
      const link = document.createElement('a');
      link.href = url;
      link.download = `answer.${extension}`;
      link.click();
      URL.revokeObjectURL(url);
    } catch (err) {
      button.title =
        err instanceof GatewayError ? err.message : 'Export failed';
    }
  }
}

if (typeof document !== 'undefined') {
  window.addEventListener('DOMContentLoaded', () => void new App().start());
}
