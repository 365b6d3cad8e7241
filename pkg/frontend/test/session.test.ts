import { describe, expect, it } from 'vitest';

import { AnnotationClient } from '../src/api';
import { AnnotationSession, SessionEvents } from '../src/session';
import { FakeService, makeItems } from './fakeService';

function setup(n = 12, failOnce: string[] = []) {
  const items = makeItems(n);
  const service = new FakeService('run1', items, new Set(failOnce));
  const client = new AnnotationClient({
    baseUrl: '',
    runId: 'run1',
    annotatorId: 'alice',
    fetchFn: service.fetch,
  });
  const errors: string[] = [];
  let changes = 0;
  const events: SessionEvents = {
    onChange: () => {
      changes += 1;
    },
    onError: (m) => errors.push(m),
  };
  const session = new AnnotationSession(client, events);
  return { session, service, items, errors, changes: () => changes };
}

describe('AnnotationSession', () => {
  it('fills the queue and reports progress on start', async () => {
    const { session } = setup();
    await session.start();
    expect(session.current()?.candidate_id).toBe('bg-bg00-c0000');
    expect(session.queueLength()).toBe(10);
    expect(session.progress()).toEqual({ pending: 12, labeled: 0, total: 12 });
  });

  it('labels advance the queue and bump progress optimistically', async () => {
    const { session } = setup();
    await session.start();
    await session.label('accept');
    expect(session.current()?.candidate_id).toBe('bg-bg00-c0001');
    expect(session.progress().labeled).toBe(1);
    expect(session.labeled).toEqual([{ candidateId: 'bg-bg00-c0000', label: 'accept' }]);
  });

  it('refills the queue as it drains, without duplicates', async () => {
    const { session } = setup(12);
    await session.start();
    for (let i = 0; i < 12; i++) {
      await session.label(i % 2 === 0 ? 'accept' : 'reject');
    }
    expect(session.labeled).toHaveLength(12);
    const ids = session.labeled.map((l) => l.candidateId);
    expect(new Set(ids).size).toBe(12);
    expect(session.current()).toBeUndefined();
  });

  it('rolls back the optimistic update when the write fails', async () => {
    const { session, errors } = setup(5, ['bg-bg00-c0000']);
    await session.start();
    await session.label('accept');
    // The failed item is restored to the front and nothing was recorded.
    expect(session.current()?.candidate_id).toBe('bg-bg00-c0000');
    expect(session.progress().labeled).toBe(0);
    expect(session.labeled).toHaveLength(0);
    expect(errors.some((e) => e.includes('500'))).toBe(true);

    // Retry succeeds (the fake only fails once).
    await session.label('accept');
    expect(session.labeled).toEqual([{ candidateId: 'bg-bg00-c0000', label: 'accept' }]);
  });

  it('labeling an empty queue is a no-op', async () => {
    const { session } = setup(0);
    await session.start();
    await session.label('accept');
    expect(session.labeled).toHaveLength(0);
  });
});
