// Wire types, mirroring the service's documented JSON bodies exactly.

export interface PartyInfo {
  code: string;
  display_name: string;
  group_tags: string[];
}

export interface PartiesResponse {
  election: string;
  prior_election: string;
  abstention_code: string;
  parties: PartyInfo[];
  prior_parties: PartyInfo[];
}

export interface VoteSubmission {
  device_id: string;
  party: string;
  prior_party?: string;
  region?: string;
}

export interface VoteAck {
  seq: number;
  device_id: string;
  ts: string;
}

export interface MethodDescriptor {
  kind: "raw" | "standardized" | "fixed";
  groups: string[];
}

export interface ForecastResponse {
  method: MethodDescriptor;
  house_size: number;
  seats: Record<string, number>;
  vote_share: Record<string, number>;
  sample: { total_devices: number; prior_devices: number };
  high_water: number;
}

export interface HistoryEvent {
  seq: number;
  ts: string;
  party: string;
  prior_party: string | null;
  region: string | null;
}

export interface HistoryResponse {
  device_id: string;
  events: HistoryEvent[];
}

export interface RegionStatsResponse {
  regions: Record<string, Record<string, number>>;
  total_devices: number;
  high_water: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
