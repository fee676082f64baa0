import type {
  ApiErrorBody,
  ForecastResponse,
  HistoryResponse,
  PartiesResponse,
  RegionStatsResponse,
  VoteAck,
  VoteSubmission,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Error carrying the service's {code, message} body and HTTP status. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; fall through to a generic error
  }
  return new ApiError(
    response.status,
    body?.code ?? "http_error",
    body?.message ?? `HTTP ${response.status}`,
  );
}

/** Thin typed client over the service's JSON endpoints; no local math. */
export class PollApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  getParties(): Promise<PartiesResponse> {
    return this.get("/api/parties");
  }

  async submitVote(submission: VoteSubmission): Promise<VoteAck> {
    const response = await this.fetchFn(this.base + "/api/votes", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as VoteAck;
  }

  getForecast(method: string, groups?: string[]): Promise<ForecastResponse> {
    const params = new URLSearchParams({ method });
    if (groups && groups.length > 0) params.set("groups", groups.join(","));
    return this.get(`/api/forecast?${params.toString()}`);
  }

  getHistory(deviceId: string): Promise<HistoryResponse> {
    return this.get(`/api/votes/${encodeURIComponent(deviceId)}/history`);
  }

  getRegionStats(): Promise<RegionStatsResponse> {
    return this.get("/api/stats/regions");
  }
}
