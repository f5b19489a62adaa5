/**
 * Typed client for the /v1 API. Non-2xx responses carry the service's
 * structured error body, which is surfaced verbatim to the views.
 */

import type {
  ApiErrorBody,
  Envelope,
  EquivResults,
  ModelSummary,
  PlatformSummary,
  RooflineResults,
  SweepResults,
  TraceResults,
} from "./types.js";

export class ApiError extends Error {
  readonly body: ApiErrorBody;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.body = body;
  }
}

export interface SweepRequest {
  platforms?: string[];
  models: string[];
  batches: number[];
  seqlens: number[];
  mode?: string;
  headroom?: number;
  overrides?: Record<string, Record<string, number>>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<Envelope<T>> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(payload as ApiErrorBody);
    }
    return payload as Envelope<T>;
  }

  getPlatforms(): Promise<Envelope<PlatformSummary[]>> {
    return this.request("/v1/platforms");
  }

  getModels(): Promise<Envelope<ModelSummary[]>> {
    return this.request("/v1/models");
  }

  getRoofline(platform: string, samples = 100): Promise<Envelope<RooflineResults>> {
    const params = new URLSearchParams({ platform, samples: String(samples) });
    return this.request(`/v1/roofline?${params}`);
  }

  getEquiv(metric: string, platforms?: string[]): Promise<Envelope<EquivResults>> {
    const params = new URLSearchParams({ metric });
    if (platforms && platforms.length > 0) {
      params.set("platforms", platforms.join(","));
    }
    return this.request(`/v1/equiv?${params}`);
  }

  postSweep(body: SweepRequest): Promise<Envelope<SweepResults>> {
    return this.request("/v1/sweep", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  postTrace(file: File | Blob, filename = "trace.csv"): Promise<Envelope<TraceResults>> {
    const form = new FormData();
    form.append("file", file, filename);
    return this.request("/v1/trace", { method: "POST", body: form });
  }
}
