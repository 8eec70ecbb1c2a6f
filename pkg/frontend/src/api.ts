// Thin fetch layer. Raw response text is kept alongside the parsed
// payload so the transcript export can reuse the server's exact bytes.

import type { FixtureInfo, SessionPayload } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: number | string,
    message: string,
  ) {
    super(message);
  }
}

export interface Fetched<T> {
  payload: T;
  raw: string;
}

async function request<T>(url: string, init?: RequestInit): Promise<Fetched<T>> {
  const response = await fetch(url, init);
  const raw = await response.text();
  if (!response.ok) {
    let code: number | string = response.status;
    let message = raw;
    try {
      const body = JSON.parse(raw);
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the raw text
    }
    throw new ApiError(response.status, code, message);
  }
  return { payload: JSON.parse(raw) as T, raw };
}

function jsonInit(method: string, body: unknown): RequestInit {
  return {
    method,
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export async function listFixtures(base: string): Promise<FixtureInfo[]> {
  const got = await request<{ fixtures: FixtureInfo[] }>(`${base}/fixtures`);
  return got.payload.fixtures;
}

export interface CreateSessionBody {
  fixture: string;
  bound: number;
  strategy: string;
  max_turns?: number;
}

export function createSession(
  base: string,
  body: CreateSessionBody,
): Promise<Fetched<SessionPayload>> {
  return request<SessionPayload>(`${base}/sessions`, jsonInit("POST", body));
}

export function getSession(
  base: string,
  id: number,
): Promise<Fetched<SessionPayload>> {
  return request<SessionPayload>(`${base}/sessions/${id}`);
}

export function challengeSession(
  base: string,
  id: number,
  r: number,
): Promise<Fetched<SessionPayload>> {
  return request<SessionPayload>(
    `${base}/sessions/${id}/challenge`,
    jsonInit("POST", { r }),
  );
}

export async function deleteSession(base: string, id: number): Promise<void> {
  const response = await fetch(`${base}/sessions/${id}`, { method: "DELETE" });
  if (!response.ok && response.status !== 204) {
    throw new ApiError(response.status, response.status, await response.text());
  }
}
