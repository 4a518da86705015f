import type { NextSample, ScorePayload, Summary } from "./types.js";

/** Minimal response surface so tests can hand in plain objects. */
export interface HttpResponse {
  status: number;
  ok: boolean;
  statusText: string;
  json(): Promise<unknown>;
}

export interface RequestInitLike {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export type FetchLike = (
  url: string,
  init?: RequestInitLike,
) => Promise<HttpResponse>;

/** Unexpected HTTP status. 409/422 on score posts are modeled as outcomes,
 * not errors, because the UI handles them as ordinary flows. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** The request never reached the server (offline, refused, DNS). */
export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export type PostOutcome =
  | { kind: "created"; position: number }
  | { kind: "duplicate"; message: string }
  | { kind: "invalid"; message: string };

async function errorDetail(response: HttpResponse): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
    return JSON.stringify(body);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async request(
    path: string,
    init?: RequestInitLike,
  ): Promise<HttpResponse> {
    const url = this.base.replace(/\/+$/, "") + path;
    try {
      return await this.fetchImpl(url, init);
    } catch (err) {
      throw new NetworkError(err instanceof Error ? err.message : String(err));
    }
  }

  async health(): Promise<{ status: string; sampled: number }> {
    const response = await this.request("/api/health");
    if (!response.ok) throw new ApiError(response.status, await errorDetail(response));
    return (await response.json()) as { status: string; sampled: number };
  }

  /** Next unscored dialogue for this annotator, or null when the queue is done. */
  async next(annotator: string): Promise<NextSample | null> {
    const response = await this.request(
      `/api/samples/next?annotator=${encodeURIComponent(annotator)}`,
    );
    if (response.status === 204) return null;
    if (!response.ok) throw new ApiError(response.status, await errorDetail(response));
    return (await response.json()) as NextSample;
  }

  async postScore(payload: ScorePayload): Promise<PostOutcome> {
    const response = await this.request("/api/scores", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (response.status === 201) {
      const body = (await response.json()) as { position: number };
      return { kind: "created", position: body.position };
    }
    if (response.status === 409)
      return { kind: "duplicate", message: await errorDetail(response) };
    if (response.status === 422)
      return { kind: "invalid", message: await errorDetail(response) };
    throw new ApiError(response.status, await errorDetail(response));
  }

  async summary(): Promise<Summary> {
    const response = await this.request("/api/summary");
    if (!response.ok) throw new ApiError(response.status, await errorDetail(response));
    return (await response.json()) as Summary;
  }
}
