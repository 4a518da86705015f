import type { Summary } from "./types.js";

/** "9.0% error rate" once anything is scored; withheld before that. */
export function formatErrorRate(summary: Summary): string {
  if (summary.scored === 0) return "error rate available after the first score";
  return `${(summary.human_error_rate * 100).toFixed(1)}% error rate`;
}

export function formatProgress(scored: number, total: number): string {
  return `${scored}/${total} reviewed`;
}

export function progressPercent(scored: number, total: number): number {
  if (total <= 0) return 0;
  return Math.round((scored / total) * 100);
}
