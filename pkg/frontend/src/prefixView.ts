/** Prefix-listing table: sortable columns, candidate highlighting, trap
 * rows grouped behind a collapsed section, and an explicit empty state. */

import { computeCandidateFlag, flagMatchesServer, statusColor } from "./flags.js";
import type { EpochSpec, PrefixListing, PrefixRow } from "./types.js";

export type SortKey = "url" | "first_capture" | "last_capture";

export interface PrefixViewOptions {
  epochs: EpochSpec[];
  onOpen?: (row: PrefixRow) => void;
  sortKey?: SortKey;
  sortAsc?: boolean;
  onSort?: (key: SortKey, asc: boolean) => void;
}

const COLUMNS: Array<{ key: SortKey; label: string }> = [
  { key: "url", label: "URL" },
  { key: "first_capture", label: "First capture" },
  { key: "last_capture", label: "Last capture" },
];

export function sortRows(rows: PrefixRow[], key: SortKey, asc: boolean): PrefixRow[] {
  const sorted = [...rows].sort((a, b) => (a[key] < b[key] ? -1 : a[key] > b[key] ? 1 : 0));
  return asc ? sorted : sorted.reverse();
}

export function renderPrefixView(
  container: HTMLElement,
  listing: PrefixListing,
  options: PrefixViewOptions,
): void {
  container.textContent = "";
  const key = options.sortKey ?? "url";
  const asc = options.sortAsc ?? true;

  if (listing.rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = `No captures under ${listing.dir}.`;
    container.appendChild(empty);
    return;
  }

  const live = sortRows(listing.rows.filter((r) => !r.trap), key, asc);
  const traps = listing.rows.filter((r) => r.trap);

  const table = document.createElement("table");
  table.className = "prefix-table";
  const head = table.createTHead().insertRow();
  for (const column of COLUMNS) {
    const th = document.createElement("th");
    th.textContent = column.label + (column.key === key ? (asc ? " ▲" : " ▼") : "");
    th.dataset.sort = column.key;
    th.addEventListener("click", () => {
      options.onSort?.(column.key, column.key === key ? !asc : true);
    });
    head.appendChild(th);
  }
  head.appendChild(document.createElement("th")).textContent = "Status";

  const body = table.createTBody();
  for (const row of live) {
    const tr = body.insertRow();
    tr.dataset.surt = row.surt;
    const flagged = computeCandidateFlag(row.first_capture, row.last_capture, options.epochs);
    if (flagged) tr.classList.add("candidate");
    if (!flagMatchesServer(row, options.epochs)) {
      // should never happen; make a disagreement loud rather than silent
      tr.classList.add("flag-mismatch");
      console.warn("candidate flag disagrees with server for", row.surt);
    }
    const urlCell = tr.insertCell();
    const link = document.createElement("a");
    link.href = "#";
    link.textContent = row.url;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      options.onOpen?.(row);
    });
    urlCell.appendChild(link);
    tr.insertCell().textContent = row.first_capture;
    tr.insertCell().textContent = row.last_capture;
    const status = tr.insertCell();
    status.textContent = statusColor(row);
    status.className = `status-${statusColor(row)}`;
  }
  container.appendChild(table);

  if (traps.length > 0) {
    const details = document.createElement("details");
    details.className = "trap-group";
    const summary = document.createElement("summary");
    summary.textContent = `${traps.length} trap-flagged row${traps.length === 1 ? "" : "s"} hidden`;
    details.appendChild(summary);
    const list = document.createElement("ul");
    for (const row of traps) {
      const item = document.createElement("li");
      item.textContent = row.url;
      item.className = "trap-row";
      list.appendChild(item);
    }
    details.appendChild(list);
    container.appendChild(details);
  }
}

export function renderError(container: HTMLElement, message: string): void {
  container.textContent = "";
  const error = document.createElement("p");
  error.className = "inline-error";
  error.setAttribute("role", "alert");
  error.textContent = message;
  container.appendChild(error);
}
