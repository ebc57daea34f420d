/** Depth-1 outlink explorer: replay one page's links with per-epoch
 * availability chips, accept/reject them, and click through to the linked
 * page's own panel.
 *
 * Accepting is optimistic: the quota widget bumps immediately and rolls
 * back if the POST fails. Rejecting greys the link everywhere. Links with
 * an epoch gap cannot be accepted at all.
 */

import { ApiError, type ApiClient } from "./api.js";
import { agencyOf, depthOf, type QuotaWidget } from "./quota.js";
import type { EpochSpec, ReplayLink, ReplayLinksResponse } from "./types.js";

export interface ExplorerDeps {
  client: ApiClient;
  quota: QuotaWidget;
  epochs: EpochSpec[];
  decided: Map<string, "Accept" | "Reject">;
  onNavigate?: (url: string, epoch: string) => void;
}

function chip(epochName: string, availability: string): HTMLElement {
  const span = document.createElement("span");
  span.className = `chip chip-${availability}`;
  span.textContent = `${epochName}: ${availability === "none" ? "—" : availability}`;
  span.dataset.epoch = epochName;
  span.dataset.availability = availability;
  return span;
}

function renderLink(item: HTMLLIElement, link: ReplayLink, deps: ExplorerDeps): void {
  item.textContent = "";
  item.dataset.surt = link.surt;
  const decided = deps.decided.get(link.surt);
  item.className = decided === "Reject" ? "link-row rejected" : "link-row";

  const anchor = document.createElement("a");
  anchor.href = "#";
  anchor.textContent = link.url;
  anchor.addEventListener("click", (event) => {
    event.preventDefault();
    deps.onNavigate?.(link.url, deps.epochs[0]?.name ?? "");
  });
  item.appendChild(anchor);

  const chips = document.createElement("span");
  chips.className = "chips";
  for (const epoch of deps.epochs) {
    chips.appendChild(chip(epoch.name, link.availability[epoch.name] ?? "none"));
  }
  item.appendChild(chips);

  const accept = document.createElement("button");
  accept.textContent = decided === "Accept" ? "Accepted" : "Accept";
  accept.className = "accept-button";
  accept.disabled = !link.eligible || decided !== undefined;
  if (!link.eligible) accept.title = "not capturable in every epoch";
  item.appendChild(accept);

  const reject = document.createElement("button");
  reject.textContent = decided === "Reject" ? "Rejected" : "Reject";
  reject.className = "reject-button";
  reject.disabled = decided !== undefined;
  item.appendChild(reject);

  const errorSlot = document.createElement("span");
  errorSlot.className = "decision-error";
  item.appendChild(errorSlot);

  accept.addEventListener("click", async () => {
    const agency = agencyOf(link.url);
    const depth = depthOf(link.url);
    accept.disabled = true;
    reject.disabled = true;
    deps.quota.bump(agency, depth);
    try {
      await deps.client.postDecision(link.surt, "Accept");
      deps.decided.set(link.surt, "Accept");
    } catch (error) {
      deps.quota.rollback(agency, depth);
      errorSlot.textContent = error instanceof ApiError ? error.detail : String(error);
      reject.disabled = false;
      accept.disabled = !link.eligible;
      return;
    }
    renderLink(item, link, deps);
  });

  reject.addEventListener("click", async () => {
    accept.disabled = true;
    reject.disabled = true;
    try {
      await deps.client.postDecision(link.surt, "Reject");
      deps.decided.set(link.surt, "Reject");
    } catch (error) {
      errorSlot.textContent = error instanceof ApiError ? error.detail : String(error);
      accept.disabled = !link.eligible;
      reject.disabled = false;
      return;
    }
    renderLink(item, link, deps);
  });
}

export function renderExplorer(
  container: HTMLElement,
  data: ReplayLinksResponse,
  deps: ExplorerDeps,
): void {
  container.textContent = "";
  const heading = document.createElement("h3");
  heading.textContent = `Outlinks of ${data.url} in ${data.epoch}`;
  container.appendChild(heading);

  if (data.links.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No in-scope outlinks on this capture.";
    container.appendChild(empty);
    return;
  }

  const list = document.createElement("ul");
  list.className = "link-list";
  for (const link of data.links) {
    const item = document.createElement("li");
    renderLink(item, link, deps);
    list.appendChild(item);
  }
  container.appendChild(list);
}
