import type {
  ApiErrorBody,
  CompileVerdict,
  QueueItem,
  StatsResponse,
  VerdictAck,
  VerdictSubmission,
} from './types.ts';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: unknown;
  readonly retryAfterSeconds: number | null;

  constructor(status: number, body: ApiErrorBody, retryAfterSeconds: number | null = null) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.details = body.details;
    this.retryAfterSeconds = retryAfterSeconds;
  }
}

/** Thin fetch client for the review API; configuration is just the base URL. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async queue(round: number): Promise<QueueItem[]> {
    return this.request(`/api/queue?round=${round}`, { method: 'GET' });
  }

  async check(statementText: string): Promise<CompileVerdict> {
    return this.request('/api/check', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ statement_text: statementText }),
    });
  }

  async submitVerdict(submission: VerdictSubmission): Promise<VerdictAck> {
    return this.request('/api/verdict', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(submission),
    });
  }

  async stats(round: number): Promise<StatsResponse> {
    return this.request(`/api/stats?round=${round}`, { method: 'GET' });
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const payload = await response.json();
    if (!response.ok) {
      const retryAfter = response.headers.get('retry-after');
      throw new ApiError(
        response.status,
        payload as ApiErrorBody,
        retryAfter === null ? null : Number(retryAfter),
      );
    }
    return payload as T;
  }
}
