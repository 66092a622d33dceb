/** Browser bootstrap: real fetch, native EventSource for run streams. */

import { ApiClient, type RunStreamFactory } from './api.js';
import { App } from './app.js';
import type { RunEvent } from './types.js';

const eventSourceStreams: RunStreamFactory = (url, handlers) => {
  const source = new EventSource(url);
  const kinds = ['dimensionsReady', 'nodeReady', 'nodeFailed', 'done'] as const;
  for (const kind of kinds) {
    source.addEventListener(kind, (message) => {
      const payload = JSON.parse((message as MessageEvent).data);
      handlers.onEvent({ kind, ...payload } as RunEvent);
      if (kind === 'done') {
        source.close();
        handlers.onEnd?.();
      }
    });
  }
  return { close: () => source.close() };
};

const root = document.getElementById('app');
if (root) {
  const api = new ApiClient(
    (url, init) => fetch(url, init),
    eventSourceStreams,
  );
  new App(root, api);
}
