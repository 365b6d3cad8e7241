import type { AnnotationClient } from './api';
import type { Label, Progress, QueueItem } from './types';

export interface SessionEvents {
  onChange(): void;
  onError(message: string): void;
}

const REFILL_THRESHOLD = 3;
const FETCH_COUNT = 10;

/**
 * Annotation queue state machine.
 *
 * Labels apply optimistically: the item leaves the queue and the local
 * progress counter bumps immediately; if the service rejects the write,
 * the item is restored to the front and the counter rolled back.
 */
export class AnnotationSession {
  private queue: QueueItem[] = [];
  private progressState: Progress = { pending: 0, labeled: 0, total: 0 };
  private fetching = false;
  /** Candidate ids this session has successfully labeled, in order. */
  readonly labeled: Array<{ candidateId: string; label: Label }> = [];
  /**
   * Every id handed to a submit, including in-flight ones; keeps a
   * concurrent refill from re-queueing an item whose ack hasn't landed.
   */
  private attempted = new Set<string>();

  constructor(
    private client: AnnotationClient,
    private events: SessionEvents,
  ) {}

  current(): QueueItem | undefined {
    return this.queue[0];
  }

  progress(): Progress {
    return this.progressState;
  }

  queueLength(): number {
    return this.queue.length;
  }

  async start(): Promise<void> {
    await this.refreshProgress();
    await this.refill();
  }

  private async refreshProgress(): Promise<void> {
    try {
      this.progressState = await this.client.fetchProgress();
      this.events.onChange();
    } catch (err) {
      this.events.onError(String(err));
    }
  }

  private async refill(): Promise<void> {
    if (this.fetching) return;
    this.fetching = true;
    try {
      const { items } = await this.client.fetchQueue(FETCH_COUNT);
      const known = new Set(this.queue.map((i) => i.candidate_id));
      for (const item of items) {
        if (!known.has(item.candidate_id) && !this.attempted.has(item.candidate_id)) {
          this.queue.push(item);
        }
      }
      this.events.onChange();
    } catch (err) {
      this.events.onError(String(err));
    } finally {
      this.fetching = false;
    }
  }

  /** Label the current item; resolves once the service has acknowledged. */
  async label(label: Label): Promise<void> {
    const item = this.queue.shift();
    if (!item) return;
    this.attempted.add(item.candidate_id);

    // Optimistic: advance the UI before the round-trip completes.
    this.progressState = {
      ...this.progressState,
      pending: Math.max(0, this.progressState.pending - 1),
      labeled: this.progressState.labeled + 1,
    };
    this.events.onChange();

    try {
      await this.client.submitLabel(item.candidate_id, label);
      this.labeled.push({ candidateId: item.candidate_id, label });
    } catch (err) {
      // Rollback: the label was not durably recorded.
      this.attempted.delete(item.candidate_id);
      this.queue.unshift(item);
      this.progressState = {
        ...this.progressState,
        pending: this.progressState.pending + 1,
        labeled: this.progressState.labeled - 1,
      };
      this.events.onError(String(err));
      this.events.onChange();
      return;
    }

    if (this.queue.length <= REFILL_THRESHOLD) {
      void this.refill();
    }
  }
}
