/**
 * Client-side row classification.
 *
 * The candidate flag must agree with the server's flag for every row: a
 * page whose first capture predates the early-epoch target and whose last
 * capture postdates the late-epoch target is worth a researcher's look.
 * Both sides compute it from the same 14-digit stamps, which compare
 * correctly as plain strings.
 */

import type { EpochSpec, PrefixRow, StatusColor } from "./types.js";

export function computeCandidateFlag(
  firstCapture: string,
  lastCapture: string,
  epochs: EpochSpec[],
): boolean {
  if (epochs.length === 0) return false;
  const early = epochs[0];
  const late = epochs[epochs.length - 1];
  return firstCapture < early.target && lastCapture > late.target;
}

export function statusColor(row: Pick<PrefixRow, "had_success" | "had_non_success">): StatusColor {
  if (row.had_success && row.had_non_success) return "mixed";
  if (row.had_non_success) return "non-success";
  return "success";
}

/** Compare the locally computed flag against the server's for one row. */
export function flagMatchesServer(row: PrefixRow, epochs: EpochSpec[]): boolean {
  return computeCandidateFlag(row.first_capture, row.last_capture, epochs) === row.candidate_flag;
}
