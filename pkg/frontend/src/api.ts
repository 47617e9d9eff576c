/** Thin fetch client for the play-service HTTP interface. */

import type { FrameBatch, SessionSnapshot } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = (await resp.json()) as T & { error?: string };
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`);
  }
  return body;
}

export class PlayServiceClient {
  constructor(public baseUrl: string) {}

  async createSession(options: {
    agent?: Record<string, unknown>;
    seed?: number;
    debug?: boolean;
  } = {}): Promise<SessionSnapshot> {
    const resp = await fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
    return parse<SessionSnapshot>(resp);
  }

  async sendAction(sessionId: string, action: string): Promise<FrameBatch> {
    const resp = await fetch(`${this.baseUrl}/sessions/${sessionId}/action`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ action }),
    });
    return parse<FrameBatch>(resp);
  }

  async getSession(sessionId: string): Promise<SessionSnapshot> {
    const resp = await fetch(`${this.baseUrl}/sessions/${sessionId}`);
    return parse<SessionSnapshot>(resp);
  }

  async closeSession(sessionId: string): Promise<void> {
    const resp = await fetch(`${this.baseUrl}/sessions/${sessionId}`, {
      method: "DELETE",
    });
    await parse<Record<string, unknown>>(resp);
  }
}
