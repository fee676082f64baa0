import type { ForecastResponse } from "./types.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const TOKEN_KEY = "pollcast.device_token";
const PRIOR_KEY = "pollcast.prior_status";

export type PriorStatus =
  | { kind: "undisclosed" }
  | { kind: "skipped" }
  | { kind: "disclosed"; code: string };

export interface PendingVote {
  party: string;
  prior_party?: string;
  region?: string;
}

function randomToken(): string {
  // 128-bit random token; the browser has no stable device id to offer.
  const bytes = new Uint8Array(16);
  globalThis.crypto.getRandomValues(bytes);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

/**
 * Client-side session state: the persistent device token, the current
 * selection, the prior-vote disclosure status, the last accepted forecast,
 * and the offline queue of unsent votes.
 */
export class ClientState {
  readonly deviceToken: string;
  selection: string | null = null;
  region: string | null = null;
  priorStatus: PriorStatus;
  lastForecast: ForecastResponse | null = null;
  pending: PendingVote[] = [];

  constructor(private readonly storage: StorageLike) {
    let token = storage.getItem(TOKEN_KEY);
    if (!token) {
      token = randomToken();
      storage.setItem(TOKEN_KEY, token);
    }
    this.deviceToken = token;
    const prior = storage.getItem(PRIOR_KEY);
    this.priorStatus = prior ? (JSON.parse(prior) as PriorStatus) : { kind: "undisclosed" };
  }

  setPriorStatus(status: PriorStatus): void {
    this.priorStatus = status;
    this.storage.setItem(PRIOR_KEY, JSON.stringify(status));
  }

  /** Only a forecast whose seats add up to the full house may be shown. */
  acceptForecast(forecast: ForecastResponse): boolean {
    const total = Object.values(forecast.seats).reduce((s, n) => s + n, 0);
    if (total !== forecast.house_size) return false;
    this.lastForecast = forecast;
    return true;
  }

  queueVote(vote: PendingVote): void {
    this.pending.push(vote);
  }

  takePending(): PendingVote[] {
    const queued = this.pending;
    this.pending = [];
    return queued;
  }
}
