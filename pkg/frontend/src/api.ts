// Typed client for the annotation service. GET requests retry with
// exponential backoff on network failure (the UI shows a connection
// banner meanwhile); HTTP error statuses are returned to the caller,
// not retried, because 400/409 carry per-row validation results.

import type { BatchView, MetricsView, SessionView, SubmitResult } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface RetryOptions {
  attempts: number;
  baseDelayMs: number;
}

const DEFAULT_RETRY: RetryOptions = { attempts: 4, baseDelayMs: 250 };

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
    private readonly retry: RetryOptions = DEFAULT_RETRY,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    let lastError: unknown = null;
    for (let attempt = 0; attempt < this.retry.attempts; attempt++) {
      if (attempt > 0) {
        await sleep(this.retry.baseDelayMs * 2 ** (attempt - 1));
      }
      try {
        const resp = await this.fetchFn(this.base + path);
        if (!resp.ok) {
          throw new Error(`${path}: HTTP ${resp.status}`);
        }
        return (await resp.json()) as T;
      } catch (err) {
        lastError = err;
      }
    }
    throw lastError instanceof Error ? lastError : new Error(String(lastError));
  }

  getSession(): Promise<SessionView> {
    return this.getJson<SessionView>("/session");
  }

  getBatch(): Promise<BatchView> {
    return this.getJson<BatchView>("/batch");
  }

  getMetrics(): Promise<MetricsView> {
    return this.getJson<MetricsView>("/metrics");
  }

  async postLabels(
    labels: Record<string, number | string>,
  ): Promise<{ status: number; result: SubmitResult }> {
    const resp = await this.fetchFn(this.base + "/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ labels }),
    });
    const result = (await resp.json()) as SubmitResult;
    return { status: resp.status, result };
  }

  async fetchExport(): Promise<string> {
    const resp = await this.fetchFn(this.base + "/export");
    if (!resp.ok) {
      throw new Error(`/export: HTTP ${resp.status}`);
    }
    return resp.text();
  }

  exportUrl(): string {
    return this.base + "/export";
  }
}
