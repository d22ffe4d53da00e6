import { describe, expect, it, vi } from 'vitest';
import { ServiceClient, ServiceError, isDone } from '../src/api';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

describe('ServiceClient', () => {
  it('opens a session via POST with a JSON body', async () => {
    const fetchImpl = vi.fn().mockResolvedValue(
      jsonResponse({ session_id: 's1', attributes: [] }, 201),
    );
    const client = new ServiceClient('http://svc', fetchImpl);
    const state = await client.openSession({
      docs: 'd.jsonl',
      nuggets: 'n.jsonl',
      vectors: 'v.txt',
      attributes: ['alpha'],
    });
    expect(state.session_id).toBe('s1');
    const [url, init] = fetchImpl.mock.calls[0];
    expect(url).toBe('http://svc/sessions');
    expect(init.method).toBe('POST');
    expect(JSON.parse(init.body).attributes).toEqual(['alpha']);
  });

  it('parses service error bodies into ServiceError', async () => {
    const fetchImpl = vi.fn().mockResolvedValue(
      jsonResponse({ error: 'conflict', detail: 'stale candidate' }, 409),
    );
    const client = new ServiceClient('http://svc', fetchImpl);
    const err = await client.getSession('s1').catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).status).toBe(409);
    expect((err as ServiceError).kind).toBe('conflict');
    expect((err as ServiceError).detail).toBe('stale candidate');
  });

  it('falls back to status text on non-JSON error bodies', async () => {
    const fetchImpl = vi.fn().mockResolvedValue(
      new Response('gateway exploded', { status: 502, statusText: 'Bad Gateway' }),
    );
    const client = new ServiceClient('http://svc', fetchImpl);
    const err = await client.getSession('s1').catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).kind).toBe('http-502');
  });

  it('url-encodes attribute names', async () => {
    const fetchImpl = vi.fn().mockResolvedValue(jsonResponse({ done: 'budget' }));
    const client = new ServiceClient('http://svc', fetchImpl);
    await client.nextCandidate('s1', 'crash site');
    expect(fetchImpl.mock.calls[0][0]).toBe(
      'http://svc/sessions/s1/attributes/crash%20site/candidate',
    );
  });

  it('returns CSV export as raw text', async () => {
    const fetchImpl = vi.fn().mockResolvedValue(
      new Response('document_id,alpha\nd0,x\n', { status: 200 }),
    );
    const client = new ServiceClient('http://svc', fetchImpl);
    expect(await client.exportCsv('s1')).toBe('document_id,alpha\nd0,x\n');
  });
});

describe('isDone', () => {
  it('distinguishes done markers from candidates', () => {
    expect(isDone({ done: 'threshold' })).toBe(true);
    expect(
      isDone({
        nugget_id: 'a#0-1#L',
        mention: 'x',
        context_sentence: 'x.',
        document_id: 'a',
        label: 'L',
        distance: 0.1,
        parent: null,
      }),
    ).toBe(false);
  });
});
