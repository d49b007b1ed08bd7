import {
  ActionOptions,
  ReviewAction,
  RuleInfo,
  SuggestionDetail,
  SuggestionSummary,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body, keep the status line
  }
  return new ApiError(response.status, detail);
}

/**
 * Thin fetch client for the review service. One method per endpoint;
 * non-2xx responses become ApiError so callers can branch on status
 * (409 means a stale transition and the view should refetch).
 */
export class ReviewApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  async listSuggestions(state?: string): Promise<SuggestionSummary[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : '';
    const body = await this.get<{ suggestions: SuggestionSummary[] }>(
      `/suggestions${query}`,
    );
    return body.suggestions;
  }

  async getSuggestion(id: string): Promise<SuggestionDetail> {
    return this.get<SuggestionDetail>(`/suggestions/${encodeURIComponent(id)}`);
  }

  async getDiff(id: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/suggestions/${encodeURIComponent(id)}/diff`,
    );
    if (!response.ok) throw await parseError(response);
    return response.text();
  }

  async getRule(ruleId: string): Promise<RuleInfo> {
    return this.get<RuleInfo>(`/rules/${encodeURIComponent(ruleId)}`);
  }

  async act(
    id: string,
    action: ReviewAction,
    options: ActionOptions = {},
  ): Promise<SuggestionDetail> {
    const payload: Record<string, string> = { action };
    if (options.committedDiff !== undefined) payload.committed_diff = options.committedDiff;
    if (options.adopter !== undefined) payload.adopter = options.adopter;
    if (options.idempotencyKey !== undefined) payload.idempotency_key = options.idempotencyKey;

    const response = await this.fetchFn(
      `${this.baseUrl}/suggestions/${encodeURIComponent(id)}/actions`,
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(payload),
      },
    );
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as SuggestionDetail;
  }
}

/** Fresh idempotency key for one user click; retries of the same click reuse it. */
export function newIdempotencyKey(): string {
  const c = globalThis.crypto;
  if (c && typeof c.randomUUID === 'function') return c.randomUUID();
  return `key-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}
