import type { ExportResponse, Label, LabelAck, Progress, QueueItem } from './types';

export interface ClientConfig {
  /** Service origin, e.g. "http://127.0.0.1:8400". Empty string = same origin. */
  baseUrl: string;
  runId: string;
  annotatorId: string;
  /** Injectable for tests; defaults to the global fetch. */
  fetchFn?: typeof fetch;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Thin typed client over the annotation service's JSON API. */
export class AnnotationClient {
  private fetchFn: typeof fetch;

  constructor(private cfg: ClientConfig) {
    this.fetchFn = cfg.fetchFn ?? fetch;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.cfg.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        detail = (await resp.json()).detail ?? detail;
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  fetchQueue(count: number): Promise<{ items: QueueItem[] }> {
    const q = new URLSearchParams({ annotator: this.cfg.annotatorId, count: String(count) });
    return this.request(`/api/v1/runs/${this.cfg.runId}/queue?${q}`);
  }

  submitLabel(candidateId: string, label: Label): Promise<LabelAck> {
    return this.request(`/api/v1/runs/${this.cfg.runId}/labels`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({
        candidate_id: candidateId,
        label,
        annotator_id: this.cfg.annotatorId,
      }),
    });
  }

  fetchProgress(): Promise<Progress> {
    const q = new URLSearchParams({ annotator: this.cfg.annotatorId });
    return this.request(`/api/v1/runs/${this.cfg.runId}/progress?${q}`);
  }

  fetchExport(resolution: 'majority' | 'any'): Promise<ExportResponse> {
    const q = new URLSearchParams({ resolution });
    return this.request(`/api/v1/runs/${this.cfg.runId}/export?${q}`);
  }

  imageUrl(item: QueueItem): string {
    return `${this.cfg.baseUrl}${item.image_url}`;
  }
}
