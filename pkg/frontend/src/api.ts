// Typed client for the gateway. Every interaction with the backend goes
// through these methods and the documented endpoints only.

import type { AnswerPayload, GatewayErrorBody, StarterOption } from './types.js';

export class GatewayError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: GatewayErrorBody) {
    super(body.message || `gateway error ${status}`);
    this.code = body.code || 'error';
    this.status = status;
  }
}

async function asError(resp: Response): Promise<GatewayError> {
  let body: GatewayErrorBody = { code: 'error', message: resp.statusText };
  try {
    body = (await resp.json()) as GatewayErrorBody;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new GatewayError(resp.status, body);
}

export class GatewayClient {
  constructor(private readonly baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      throw await asError(resp);
    }
    return resp;
  }

  async health(): Promise<{ status: string }> {
    const resp = await this.request('/healthz');
    return (await resp.json()) as { status: string };
  }

  async getOptions(): Promise<StarterOption[]> {
    const resp = await this.request('/options');
    return (await resp.json()) as StarterOption[];
  }

  async createSession(): Promise<string> {
    const resp = await this.request('/sessions', { method: 'POST' });
    const body = (await resp.json()) as { session_id: string };
    return body.session_id;
  }

  async sendMessage(
    sessionId: string,
    text: string,
    option?: string,
  ): Promise<AnswerPayload> {
    const payload: { text: string; option?: string } = { text };
    if (option) payload.option = option;
    const resp = await this.request(`/sessions/${sessionId}/messages`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
    return (await resp.json()) as AnswerPayload;
  }

  async getTranscript(sessionId: string): Promise<unknown> {
    const resp = await this.request(`/sessions/${sessionId}/transcript`);
    return resp.json();
  }

  async exportAnswer(
    sessionId: string,
    format: 'markdown' | 'csv' | 'json',
  ): Promise<{ content: string; contentType: string }> {
    const resp = await this.request(`/sessions/${sessionId}/export?format=${format}`);
    return {
      content: await resp.text(),
      contentType: resp.headers.get('content-type') ?? 'application/octet-stream',
    };
  }
}
