import { describe, expect, it, vi } from 'vitest';

import { ApiError, ReviewApiClient, newIdempotencyKey } from '../src/api.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

function clientWith(responses: Response[]) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetchFn = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    const next = responses.shift();
    if (!next) throw new Error('no scripted response left');
    return next;
  });
  return { client: new ReviewApiClient('http://svc', fetchFn as typeof fetch), calls };
}

describe('ReviewApiClient', () => {
  it('lists suggestions and unwraps the envelope', async () => {
    const { client, calls } = clientWith([jsonResponse({ suggestions: [{ suggestion_id: 's1' }] })]);
    const listed = await client.listSuggestions();
    expect(listed).toHaveLength(1);
    expect(calls[0].url).toBe('http://svc/suggestions');
  });

  it('passes the state filter as a query parameter', async () => {
    const { client, calls } = clientWith([jsonResponse({ suggestions: [] })]);
    await client.listSuggestions('all');
    expect(calls[0].url).toBe('http://svc/suggestions?state=all');
  });

  it('fetches detail and raw diff text', async () => {
    const { client, calls } = clientWith([
      jsonResponse({ suggestion_id: 's1', unified_diff: 'x' }),
      new Response('--- a/x\n+++ b/x\n', { status: 200 }),
    ]);
    const detail = await client.getSuggestion('s1');
    expect(detail.suggestion_id).toBe('s1');
    const diff = await client.getDiff('s1');
    expect(diff).toBe('--- a/x\n+++ b/x\n');
    expect(calls[1].url).toBe('http://svc/suggestions/s1/diff');
  });

  it('posts actions with snake_case wire fields', async () => {
    const { client, calls } = clientWith([jsonResponse({ suggestion_id: 's1', state: 'staged' })]);
    await client.act('s1', 'stage', { idempotencyKey: 'k1', adopter: 'ann' });
    expect(calls[0].url).toBe('http://svc/suggestions/s1/actions');
    expect(calls[0].init?.method).toBe('POST');
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body).toEqual({ action: 'stage', adopter: 'ann', idempotency_key: 'k1' });
  });

  it('sends committed_diff on commit', async () => {
    const { client, calls } = clientWith([jsonResponse({ state: 'committed' })]);
    await client.act('s1', 'commit', { committedDiff: '--- a/x\n', idempotencyKey: 'k2' });
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body.committed_diff).toBe('--- a/x\n');
  });

  it('wraps non-2xx responses in ApiError with the server detail', async () => {
    const { client } = clientWith([jsonResponse({ detail: 'illegal transition' }, 409)]);
    const err = await client.act('s1', 'stage').catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toBe('illegal transition');
  });

  it('survives non-JSON error bodies', async () => {
    const { client } = clientWith([new Response('gateway exploded', { status: 502 })]);
    const err = await client.getSuggestion('s1').catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.message).toBe('HTTP 502');
  });

  it('escapes ids in paths', async () => {
    const { client, calls } = clientWith([jsonResponse({})]);
    await client.getSuggestion('a/b c');
    expect(calls[0].url).toBe('http://svc/suggestions/a%2Fb%20c');
  });
});

describe('newIdempotencyKey', () => {
  it('mints a distinct key per click', () => {
    const seen = new Set(Array.from({ length: 32 }, () => newIdempotencyKey()));
    expect(seen.size).toBe(32);
  });
});
