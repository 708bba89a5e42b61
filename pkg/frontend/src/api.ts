import type {
  ContextWindow,
  EmotionResult,
  FlatClusters,
  OpenInfo,
  SearchHit,
  SearchParams,
  YearlyClusters,
} from "./types.js";

/** Error raised for non-2xx API responses, carrying the server's message. */
export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function readError(response: Response): Promise<ApiError> {
  let message = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { error?: unknown };
    if (typeof body.error === "string" && body.error.length > 0) {
      message = body.error;
    }
  } catch {
    // non-JSON error body; keep the status message
  }
  return new ApiError(response.status, message);
}

export function searchQueryString(params: SearchParams): string {
  const query = new URLSearchParams();
  query.set("q", params.q);
  if (params.k !== undefined) query.set("k", String(params.k));
  if (params.models) query.set("models", params.models);
  if (params.keywords) query.set("keywords", params.keywords);
  if (params.year_from !== undefined) {
    query.set("year_from", String(params.year_from));
  }
  if (params.year_to !== undefined) {
    query.set("year_to", String(params.year_to));
  }
  if (params.journal) query.set("journal", params.journal);
  return query.toString();
}

/** Thin typed client over the JSON API. Search keeps at most one request
 * in flight: starting a new one aborts the previous (latest wins). */
export class ApiClient {
  private searchController: AbortController | null = null;

  constructor(readonly baseUrl: string = "") {}

  openUrl(docId: string): string {
    return `${this.baseUrl}/open/${encodeURIComponent(docId)}`;
  }

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const init: RequestInit = signal ? { signal } : {};
    const response = await fetch(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw await readError(response);
    }
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) {
      throw await readError(response);
    }
    return (await response.json()) as T;
  }

  async search(params: SearchParams): Promise<SearchHit[]> {
    this.searchController?.abort();
    const controller = new AbortController();
    this.searchController = controller;
    return this.getJson<SearchHit[]>(
      `/search?${searchQueryString(params)}`, controller.signal);
  }

  async context(sid: number, before?: number, after?: number):
      Promise<ContextWindow> {
    const query = new URLSearchParams();
    if (before !== undefined) query.set("before", String(before));
    if (after !== undefined) query.set("after", String(after));
    const qs = query.toString();
    return this.getJson<ContextWindow>(`/context/${sid}${qs ? `?${qs}` : ""}`);
  }

  async open(docId: string): Promise<OpenInfo> {
    return this.getJson<OpenInfo>(`/open/${encodeURIComponent(docId)}`);
  }

  async clusterFlat(payload: Record<string, unknown>): Promise<FlatClusters> {
    return this.postJson<FlatClusters>("/cluster", payload);
  }

  async clusterPerYear(payload: Record<string, unknown>):
      Promise<YearlyClusters> {
    return this.postJson<YearlyClusters>(
      "/cluster", { ...payload, per_year: true });
  }

  async sentimentEmotion(payload: Record<string, unknown>):
      Promise<EmotionResult> {
    return this.postJson<EmotionResult>(
      "/sentiment", { ...payload, task: "emotion" });
  }
}

export function isAbortError(error: unknown): boolean {
  return error instanceof DOMException && error.name === "AbortError";
}
