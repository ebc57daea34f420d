/** Thin typed client over the curation service. All reads are GETs; the
 * only writes the console ever performs go through postDecision and
 * postJob. */

import type {
  Decision,
  JobView,
  PrefixListing,
  QuotaRow,
  ReplayLinksResponse,
  ServiceConfig,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; statusText is the best we have
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  config(): Promise<ServiceConfig> {
    return this.request<ServiceConfig>("/config");
  }

  prefix(dir: string): Promise<PrefixListing> {
    return this.request<PrefixListing>(`/prefix?dir=${encodeURIComponent(dir)}`);
  }

  replayLinks(url: string, epoch: string): Promise<ReplayLinksResponse> {
    return this.request<ReplayLinksResponse>(
      `/replay-links?url=${encodeURIComponent(url)}&epoch=${encodeURIComponent(epoch)}`,
    );
  }

  decisions(): Promise<{ live: Decision[]; history_length: number }> {
    return this.request("/decisions");
  }

  postDecision(surt: string, action: "Accept" | "Reject", note?: string): Promise<Decision> {
    return this.request<Decision>("/decisions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ surt, action, note: note ?? null }),
    });
  }

  quota(): Promise<{ target: number; rows: QuotaRow[] }> {
    return this.request("/quota");
  }

  jobs(): Promise<{ jobs: JobView[] }> {
    return this.request("/jobs");
  }

  postJob(kind: string, config: Record<string, unknown>): Promise<JobView> {
    return this.request<JobView>("/jobs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ kind, config }),
    });
  }
}
