/** Shared wire types for the curation service API. */

export interface EpochSpec {
  name: string;
  start: string; // 14-digit UTC stamps, YYYYMMDDhhmmss
  end: string;
  target: string;
}

export interface ServiceConfig {
  epochs: EpochSpec[];
  scope: string[];
  quota: number;
  agencies: string[];
}

export interface PrefixRow {
  surt: string;
  url: string;
  first_capture: string;
  last_capture: string;
  had_non_success: boolean;
  had_success: boolean;
  candidate_flag: boolean;
  trap: boolean;
}

export interface PrefixListing {
  dir: string;
  rows: PrefixRow[];
}

export type Availability = "success" | "non_success" | "none";

export interface ReplayLink {
  url: string;
  surt: string;
  availability: Record<string, Availability>;
  eligible: boolean;
}

export interface ReplayLinksResponse {
  url: string;
  epoch: string;
  links: ReplayLink[];
}

export interface Decision {
  id: number;
  surt: string;
  url: string;
  action: "Accept" | "Reject";
  actor: string;
  at: string;
  note: string | null;
}

export interface QuotaRow {
  agency: string;
  depth: "High" | "Deep";
  target: number;
  found: number;
}

export interface JobView {
  job_id: number;
  kind: string;
  status: "Queued" | "Running" | "Done" | "Failed";
  counters: Record<string, unknown>;
  error: string | null;
  started: string | null;
  ended: string | null;
  outputs: Record<string, string>;
}

export type StatusColor = "success" | "non-success" | "mixed";
