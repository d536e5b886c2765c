/** Offline-safe submission queue.
 *
 * Answers are enqueued (and persisted) before the first network attempt and
 * removed only once the server acknowledges them with 201 -- or 409, which
 * means an identical response is already stored, so the session advances
 * without a duplicate. A NetworkError stops the flush and keeps the rest of
 * the queue for the next attempt; a validation failure (422) is surfaced and
 * the item dropped, since retrying an invalid payload can never succeed.
 */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import type { KeyValueStore } from "./storage.js";
import type { SubmissionBody } from "./types.js";

export interface QueuedSubmission {
  body: SubmissionBody;
  queuedAt: number;
}

export interface FlushReport {
  delivered: SubmissionBody[];
  rejected: { body: SubmissionBody; error: ApiError }[];
  /** true when a network failure interrupted the flush */
  offline: boolean;
}

export class RetryQueue {
  private items: QueuedSubmission[];

  constructor(
    private readonly store: KeyValueStore,
    private readonly key = "outfitgen.queue",
    private readonly now: () => number = Date.now,
  ) {
    const raw = store.get(key);
    this.items = raw ? (JSON.parse(raw) as QueuedSubmission[]) : [];
  }

  private persist(): void {
    this.store.set(this.key, JSON.stringify(this.items));
  }

  get size(): number {
    return this.items.length;
  }

  pending(): SubmissionBody[] {
    return this.items.map((item) => item.body);
  }

  enqueue(body: SubmissionBody): void {
    this.items.push({ body, queuedAt: this.now() });
    this.persist();
  }

  async flush(client: ApiClient): Promise<FlushReport> {
    const report: FlushReport = { delivered: [], rejected: [], offline: false };
    while (this.items.length > 0) {
      const head = this.items[0]!;
      try {
        await client.submitResponse(head.body);
        report.delivered.push(head.body);
      } catch (err) {
        if (err instanceof NetworkError) {
          report.offline = true;
          break; // keep everything, retry later
        }
        if (err instanceof ApiError) {
          report.rejected.push({ body: head.body, error: err });
        } else {
          throw err;
        }
      }
      this.items.shift();
      this.persist();
    }
    return report;
  }
}
