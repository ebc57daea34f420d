/** Console wiring: prefix browser, depth-1 explorer, quota widget, jobs.
 *
 * Everything on screen is derived from server GETs; the only mutations are
 * POST /decisions (accept/reject) and POST /jobs (launching runs), so a
 * reload always reproduces the same state.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderExplorer } from "./explorer.js";
import { renderError, renderPrefixView, type SortKey } from "./prefixView.js";
import { QuotaWidget } from "./quota.js";
import type { ServiceConfig } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export async function boot(): Promise<void> {
  const client = new ApiClient("");
  const config: ServiceConfig = await client.config();
  const quota = new QuotaWidget(client, el("quota"));
  const decided = new Map<string, "Accept" | "Reject">();
  for (const decision of (await client.decisions()).live) {
    decided.set(decision.surt, decision.action);
  }

  const epochSelect = el<HTMLSelectElement>("epoch");
  for (const epoch of config.epochs) {
    const option = document.createElement("option");
    option.value = epoch.name;
    option.textContent = epoch.name;
    epochSelect.appendChild(option);
  }

  let sortKey: SortKey = "url";
  let sortAsc = true;
  let currentDir = "";

  async function showPrefix(dir: string): Promise<void> {
    currentDir = dir;
    try {
      const listing = await client.prefix(dir);
      renderPrefixView(el("listing"), listing, {
        epochs: config.epochs,
        sortKey,
        sortAsc,
        onSort: (key, asc) => {
          sortKey = key;
          sortAsc = asc;
          void showPrefix(currentDir);
        },
        onOpen: (row) => void showExplorer(row.url, epochSelect.value),
      });
    } catch (error) {
      renderError(el("listing"), error instanceof ApiError ? error.detail : String(error));
    }
  }

  async function showExplorer(url: string, epoch: string): Promise<void> {
    try {
      const data = await client.replayLinks(url, epoch);
      renderExplorer(el("explorer"), data, {
        client,
        quota,
        epochs: config.epochs,
        decided,
        onNavigate: (nextUrl, nextEpoch) => void showExplorer(nextUrl, nextEpoch),
      });
    } catch (error) {
      renderError(el("explorer"), error instanceof ApiError ? error.detail : String(error));
    }
  }

  el<HTMLFormElement>("prefix-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void showPrefix(el<HTMLInputElement>("dir").value.trim());
  });

  el<HTMLFormElement>("crawl-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const seeds = el<HTMLTextAreaElement>("seeds")
      .value.split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0);
    try {
      await client.postJob("crawl", { seeds });
      await refreshJobs();
    } catch (error) {
      renderError(el("jobs"), error instanceof ApiError ? error.detail : String(error));
    }
  });

  el<HTMLButtonElement>("assemble-button").addEventListener("click", async () => {
    try {
      await client.postJob("assemble", { sources: "" });
      await refreshJobs();
    } catch (error) {
      renderError(el("jobs"), error instanceof ApiError ? error.detail : String(error));
    }
  });

  async function refreshJobs(): Promise<void> {
    const { jobs } = await client.jobs();
    const container = el("jobs");
    container.textContent = "";
    const list = document.createElement("ul");
    for (const job of jobs) {
      const item = document.createElement("li");
      item.textContent = `#${job.job_id} ${job.kind}: ${job.status}${job.error ? ` (${job.error})` : ""}`;
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  await quota.refresh();
  await refreshJobs();
  window.setInterval(() => {
    void quota.refresh();
    void refreshJobs();
  }, 5000);
}

if (typeof document !== "undefined" && document.getElementById("listing")) {
  void boot();
}
