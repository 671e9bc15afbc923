// REST + SSE client for the backend.
//
// Message and confirmation streams arrive as text/event-stream over a
// fetch POST; events are parsed incrementally and yielded in arrival
// order.

import type { WireEvent } from "./events.js";

export interface HistoryDocument {
  session_id: string;
  messages: { role: string; content: string; error?: boolean }[];
  routing: unknown[];
  steps: unknown[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  async createSession(): Promise<string> {
    const response = await fetch(`${this.baseUrl}/api/sessions`, { method: "POST" });
    if (!response.ok) throw new ApiError(`session create failed`, response.status);
    const body = (await response.json()) as { session_id: string };
    return body.session_id;
  }

  async getHistory(sessionId: string): Promise<HistoryDocument> {
    const response = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/history`);
    if (!response.ok) throw new ApiError(`history fetch failed`, response.status);
    return (await response.json()) as HistoryDocument;
  }

  async health(): Promise<Record<string, unknown>> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    if (!response.ok) throw new ApiError(`health check failed`, response.status);
    return (await response.json()) as Record<string, unknown>;
  }

  streamMessage(sessionId: string, content: string): AsyncGenerator<WireEvent> {
    return this.streamPost(`/api/sessions/${sessionId}/messages`, { content });
  }

  streamConfirmation(
    sessionId: string,
    confirmationId: string,
    approved: boolean,
  ): AsyncGenerator<WireEvent> {
    return this.streamPost(`/api/sessions/${sessionId}/confirmations`, {
      confirmation_id: confirmationId,
      approved,
    });
  }

  private async *streamPost(
    path: string,
    body: Record<string, unknown>,
  ): AsyncGenerator<WireEvent> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok || response.body === null) {
      throw new ApiError(`stream request failed`, response.status);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let boundary = buffer.indexOf("\n\n");
      while (boundary >= 0) {
        const block = buffer.slice(0, boundary);
        buffer = buffer.slice(boundary + 2);
        const event = parseSseBlock(block);
        if (event !== null) yield event;
        boundary = buffer.indexOf("\n\n");
      }
    }
    const trailing = parseSseBlock(buffer);
    if (trailing !== null) yield trailing;
  }
}

export function parseSseBlock(block: string): WireEvent | null {
  for (const line of block.split("\n")) {
    if (line.startsWith("data: ")) {
      try {
        return JSON.parse(line.slice("data: ".length)) as WireEvent;
      } catch {
        return null;
      }
    }
  }
  return null;
}
