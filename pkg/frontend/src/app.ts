import { AnnotationClient } from './api';
import { drawOverlays, scoreReadout } from './overlay';
import { AnnotationSession } from './session';
import type { Label } from './types';

export interface AppConfig {
  baseUrl: string;
  runId: string;
  annotatorId: string;
  /** Task instructions shown in the banner; set per labeling campaign. */
  instructions: string;
}

const KEY_BINDINGS: Record<string, Label> = {
  a: 'accept',
  '1': 'accept',
  r: 'reject',
  '2': 'reject',
};

function readConfig(): AppConfig {
  const params = new URLSearchParams(window.location.search);
  return {
    baseUrl: params.get('service') ?? '',
    runId: params.get('run') ?? '',
    annotatorId: params.get('annotator') ?? '',
    instructions:
      params.get('instructions') ??
      'Review each generated image and label it accept or reject. ' +
        'Keys: a/1 = accept, r/2 = reject.',
  };
}

export function mountApp(root: HTMLElement, config: AppConfig = readConfig()): AnnotationSession {
  root.innerHTML = `
    <div class="banner" id="banner"></div>
    <div class="layout">
      <div class="viewer">
        <canvas id="canvas" width="512" height="384"></canvas>
        <div class="buttons">
          <button id="btn-accept">accept (a)</button>
          <button id="btn-reject">reject (r)</button>
        </div>
      </div>
      <aside class="panel">
        <div id="progress"></div>
        <ul id="scores"></ul>
        <div id="status" role="alert"></div>
      </aside>
    </div>`;

  const banner = root.querySelector('#banner') as HTMLElement;
  const canvas = root.querySelector('#canvas') as HTMLCanvasElement;
  const progressEl = root.querySelector('#progress') as HTMLElement;
  const scoresEl = root.querySelector('#scores') as HTMLElement;
  const statusEl = root.querySelector('#status') as HTMLElement;

  banner.textContent = config.instructions;
  if (!config.runId || !config.annotatorId) {
    statusEl.textContent = 'Missing ?run= or ?annotator= in the URL.';
  }

  const client = new AnnotationClient(config);

  const render = () => {
    const item = session.current();
    const p = session.progress();
    progressEl.textContent = `${p.labeled} labeled, ${p.pending} pending of ${p.total}`;

    scoresEl.innerHTML = '';
    for (const line of scoreReadout(item?.score_card ?? null)) {
      const li = document.createElement('li');
      li.textContent = line;
      scoresEl.appendChild(li);
    }

    const ctx = canvas.getContext('2d');
    if (!ctx) return;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (!item) {
      statusEl.textContent = p.pending === 0 && p.total > 0 ? 'Queue complete.' : statusEl.textContent;
      return;
    }
    const img = new Image();
    img.onload = () => {
      const scale = Math.min(canvas.width / img.width, canvas.height / img.height);
      ctx.clearRect(0, 0, canvas.width, canvas.height);
      ctx.drawImage(img, 0, 0, img.width * scale, img.height * scale);
      drawOverlays(ctx, item.mask, item.score_card, scale);
    };
    img.src = client.imageUrl(item);
  };

  const session = new AnnotationSession(client, {
    onChange: render,
    onError: (message) => {
      statusEl.textContent = message;
    },
  });

  const submit = (label: Label) => {
    statusEl.textContent = '';
    void session.label(label);
  };

  root.querySelector('#btn-accept')?.addEventListener('click', () => submit('accept'));
  root.querySelector('#btn-reject')?.addEventListener('click', () => submit('reject'));
  window.addEventListener('keydown', (ev) => {
    const label = KEY_BINDINGS[ev.key];
    if (label && !ev.repeat) submit(label);
  });

  void session.start();
  return session;
}
