import { ApiClient, NetworkError } from "./api.js";
import type { ScorePayload } from "./types.js";

const STORAGE_KEY = "annotator.pending_scores";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

/** Scores submitted while offline, persisted so a refresh loses nothing. */
export class OfflineQueue {
  constructor(private readonly storage: StorageLike) {}

  pending(): ScorePayload[] {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return [];
    try {
      const items = JSON.parse(raw) as ScorePayload[];
      return Array.isArray(items) ? items : [];
    } catch {
      return [];
    }
  }

  size(): number {
    return this.pending().length;
  }

  private write(items: ScorePayload[]): void {
    this.storage.setItem(STORAGE_KEY, JSON.stringify(items));
  }

  /** Last write wins for the same (annotator, dialogue) pair. */
  enqueue(payload: ScorePayload): void {
    const items = this.pending().filter(
      (item) =>
        item.dialogue_id !== payload.dialogue_id ||
        item.annotator !== payload.annotator,
    );
    items.push(payload);
    this.write(items);
  }

  /** Replay pending scores in order. A 409 means the server already has a
   * score for the pair, so the entry is considered delivered; a 422 can
   * never succeed and is dropped. On the first network failure the rest
   * stay queued, order intact. Returns how many entries were delivered. */
  async replay(client: ApiClient): Promise<number> {
    const items = this.pending();
    const remaining: ScorePayload[] = [];
    let delivered = 0;
    for (const item of items) {
      if (remaining.length > 0) {
        remaining.push(item);
        continue;
      }
      try {
        const outcome = await client.postScore(item);
        if (outcome.kind === "created" || outcome.kind === "duplicate") {
          delivered += 1;
        }
      } catch (err) {
        if (err instanceof NetworkError) {
          remaining.push(item);
          continue;
        }
        throw err;
      }
    }
    this.write(remaining);
    return delivered;
  }
}
