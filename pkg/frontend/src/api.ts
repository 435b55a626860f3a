/** Thin typed client for the annotation service. */

import type {
  AnnotationWire,
  AssignResult,
  PairDetail,
  PairList,
  PairSummary,
  SubmitResult,
  TaxonomyEntry,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (input, init) => globalThis.fetch(input, init);

/**
 * Error raised for any non-2xx response. `detail` is the server's unwrapped
 * `detail` payload: a plain string, or an object such as
 * `{message, violations}` (422) or `{message, current_version}` (409).
 */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }

  /** Validation messages from a 422 body, if present. */
  get violations(): string[] {
    if (
      this.detail !== null &&
      typeof this.detail === "object" &&
      Array.isArray((this.detail as { violations?: unknown }).violations)
    ) {
      return ((this.detail as { violations: unknown[] }).violations).map(String);
    }
    if (typeof this.detail === "string") return [this.detail];
    return [];
  }

  /** Server-side version from a 409 body, if present. */
  get currentVersion(): number | null {
    if (
      this.detail !== null &&
      typeof this.detail === "object" &&
      typeof (this.detail as { current_version?: unknown }).current_version === "number"
    ) {
      return (this.detail as { current_version: number }).current_version;
    }
    return null;
  }
}

export interface SubmitBody {
  annotator_id: string;
  unaligned_flag: boolean;
  groups: { category: string; op_indices: number[] }[];
  if_version?: number;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token: string | undefined;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, token?: string, fetchImpl: FetchLike = defaultFetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.token = token;
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers: Record<string, string> = {};
    if (init.body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token !== undefined) headers["X-Annotator-Token"] = this.token;
    const res = await this.fetchImpl(this.baseUrl + path, { ...init, headers });
    const text = await res.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = text;
      }
    }
    if (!res.ok) {
      const detail =
        data !== null && typeof data === "object" && "detail" in data
          ? (data as { detail: unknown }).detail
          : data;
      throw new ApiError(res.status, detail);
    }
    return data as T;
  }

  taxonomy(): Promise<TaxonomyEntry[]> {
    return this.request("/api/taxonomy");
  }

  listPairs(params: {
    status?: string;
    annotator?: string;
    offset?: number;
    limit?: number;
  } = {}): Promise<PairList> {
    const search = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) search.set(key, String(value));
    }
    const qs = search.toString();
    return this.request(`/api/pairs${qs ? `?${qs}` : ""}`);
  }

  getPair(pairId: string): Promise<PairDetail> {
    return this.request(`/api/pairs/${encodeURIComponent(pairId)}`);
  }

  submitAnnotation(pairId: string, body: SubmitBody): Promise<SubmitResult> {
    return this.request(`/api/pairs/${encodeURIComponent(pairId)}/annotation`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  flagUnaligned(
    pairId: string,
    annotatorId: string,
    ifVersion?: number,
  ): Promise<PairSummary> {
    const body: { annotator_id: string; if_version?: number } = {
      annotator_id: annotatorId,
    };
    if (ifVersion !== undefined) body.if_version = ifVersion;
    return this.request(`/api/pairs/${encodeURIComponent(pairId)}/flag`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  assign(
    annotators: string[],
    overlapFraction?: number,
    seed?: number,
  ): Promise<AssignResult> {
    const body: Record<string, unknown> = { annotators };
    if (overlapFraction !== undefined) body.overlap_fraction = overlapFraction;
    if (seed !== undefined) body.seed = seed;
    return this.request("/api/assign", { method: "POST", body: JSON.stringify(body) });
  }
}

export type { AnnotationWire };
