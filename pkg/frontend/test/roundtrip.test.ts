import { describe, expect, it } from 'vitest';

import { AnnotationClient } from '../src/api';
import { AnnotationSession } from '../src/session';
import type { Label } from '../src/types';
import { FakeService, makeItems } from './fakeService';

/**
 * Round-trip: a scripted session labels 10 items through the full client
 * stack, then the service export must contain exactly those 10 labels
 * with matching candidate ids and values.
 */
describe('labeling round-trip', () => {
  it('export equals the scripted session labels', async () => {
    const items = makeItems(10);
    const service = new FakeService('run1', items);
    const client = new AnnotationClient({
      baseUrl: '',
      runId: 'run1',
      annotatorId: 'alice',
      fetchFn: service.fetch,
    });
    const session = new AnnotationSession(client, {
      onChange: () => {},
      onError: (m) => {
        throw new Error(m);
      },
    });

    const script: Label[] = [
      'accept',
      'reject',
      'accept',
      'accept',
      'reject',
      'reject',
      'accept',
      'reject',
      'accept',
      'accept',
    ];
    await session.start();
    const sent = new Map<string, Label>();
    for (const label of script) {
      const item = session.current();
      expect(item).toBeDefined();
      await session.label(label);
      sent.set(item!.candidate_id, label);
    }
    expect(sent.size).toBe(10);
    expect(session.current()).toBeUndefined();

    const exported = await client.fetchExport('majority');
    expect(exported.ties).toEqual([]);
    const got = new Map(exported.labels.map((e) => [e.candidate_id, e.label]));
    expect(got).toEqual(sent);
  });

  it('a relabel overwrites: last write wins in the export', async () => {
    const items = makeItems(3);
    const service = new FakeService('run1', items);
    const client = new AnnotationClient({
      baseUrl: '',
      runId: 'run1',
      annotatorId: 'alice',
      fetchFn: service.fetch,
    });
    await client.submitLabel('bg-bg00-c0000', 'accept');
    await client.submitLabel('bg-bg00-c0000', 'reject');
    const exported = await client.fetchExport('any');
    expect(exported.labels).toEqual([{ candidate_id: 'bg-bg00-c0000', label: 'reject' }]);
  });

  it('disagreeing annotators produce a tie that majority export excludes', async () => {
    const items = makeItems(2);
    const service = new FakeService('run1', items);
    const mk = (annotatorId: string) =>
      new AnnotationClient({ baseUrl: '', runId: 'run1', annotatorId, fetchFn: service.fetch });
    await mk('alice').submitLabel('bg-bg00-c0000', 'accept');
    await mk('bob').submitLabel('bg-bg00-c0000', 'reject');
    await mk('alice').submitLabel('bg-bg00-c0001', 'accept');
    const exported = await mk('alice').fetchExport('majority');
    expect(exported.ties).toEqual(['bg-bg00-c0000']);
    expect(exported.labels).toEqual([
      { candidate_id: 'bg-bg00-c0001', label: 'accept', votes: { accept: 1, reject: 0 } },
    ]);
  });
});
