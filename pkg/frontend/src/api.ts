/**
 * Typed client for the gateway. The fetch implementation and the run event
 * stream factory are injectable so tests can script the server.
 */

import type {
  AcceptedRun,
  DocumentWire,
  ExplorationWire,
  FilterWire,
  LayoutWire,
  RunEvent,
  SpaceWire,
} from './types.js';

export interface RunStreamHandlers {
  onEvent(event: RunEvent): void;
  onEnd?(): void;
}

export interface RunStreamHandle {
  close(): void;
}

export type RunStreamFactory = (
  url: string,
  handlers: RunStreamHandlers,
) => RunStreamHandle;

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Parses `event:`/`data:` lines of one SSE chunk into run events. */
export function parseSseChunk(buffer: string): { events: RunEvent[]; rest: string } {
  const events: RunEvent[] = [];
  const parts = buffer.split('\n\n');
  const rest = parts.pop() ?? '';
  for (const part of parts) {
    let kind = '';
    let data = '';
    for (const line of part.split('\n')) {
      if (line.startsWith('event: ')) kind = line.slice(7).trim();
      else if (line.startsWith('data: ')) data = line.slice(6);
    }
    if (!kind || !data) continue;
    const payload = JSON.parse(data);
    events.push({ kind, ...payload } as RunEvent);
  }
  return { events, rest };
}

/** Default stream factory: reads the SSE body via fetch streaming. */
export function fetchRunStream(fetchFn: FetchLike): RunStreamFactory {
  return (url, handlers) => {
    let closed = false;
    void (async () => {
      const response = await fetchFn(url);
      const reader = response.body?.getReader();
      if (!reader) {
        handlers.onEnd?.();
        return;
      }
      const decoder = new TextDecoder();
      let buffer = '';
      while (!closed) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        const { events, rest } = parseSseChunk(buffer);
        buffer = rest;
        for (const event of events) handlers.onEvent(event);
      }
      handlers.onEnd?.();
    })();
    return { close: () => (closed = true) };
  };
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly streamFactory: RunStreamFactory,
    private readonly base = '/api/v1',
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchFn(`${this.base}${path}`, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload.code ?? 'unknown', payload.message ?? 'request failed');
    }
    return payload as T;
  }

  createSpace(body: {
    prompt: string;
    context?: string;
    highlight?: string;
    config?: Record<string, unknown>;
  }): Promise<AcceptedRun> {
    return this.request('POST', '/spaces', body);
  }

  subscribeRun(runId: number, handlers: RunStreamHandlers): RunStreamHandle {
    return this.streamFactory(`${this.base}/runs/${runId}/events`, handlers);
  }

  getSpace(spaceId: number): Promise<{ space: SpaceWire; exploration: ExplorationWire }> {
    return this.request('GET', `/spaces/${spaceId}`);
  }

  switchSpace(spaceId: number): Promise<{ activeSpaceId: number; exploration: ExplorationWire }> {
    return this.request('POST', `/spaces/${spaceId}/active`);
  }

  generateSimilar(spaceId: number, nodeId: string, k?: number): Promise<AcceptedRun> {
    return this.request('POST', `/spaces/${spaceId}/nodes/${nodeId}/similar`, { k });
  }

  generateInSubspace(spaceId: number, filter: FilterWire, k: number): Promise<AcceptedRun> {
    return this.request('POST', `/spaces/${spaceId}/subspace-generate`, { filter, k });
  }

  addDimension(spaceId: number, name: string): Promise<AcceptedRun> {
    return this.request('POST', `/spaces/${spaceId}/dimensions`, { name });
  }

  suggestDimension(spaceId: number): Promise<{ name: string }> {
    return this.request('POST', `/spaces/${spaceId}/dimensions/suggest`);
  }

  search(spaceId: number, query: string): Promise<{ matched: string[]; dimmed: string[] }> {
    return this.request('GET', `/spaces/${spaceId}/search?q=${encodeURIComponent(query)}`);
  }

  applyFilter(spaceId: number, filter: FilterWire): Promise<{ matched: string[] }> {
    return this.request('POST', `/spaces/${spaceId}/filter`, { filter });
  }

  layout(
    spaceId: number,
    selection: { x: string | null; y: string | null },
    viewport: { width: number; height: number },
    seed = 0,
  ): Promise<LayoutWire> {
    return this.request('POST', `/spaces/${spaceId}/layout`, { selection, viewport, seed });
  }

  toggleBookmark(spaceId: number, nodeId: string): Promise<{ bookmarked: boolean }> {
    return this.request('POST', `/spaces/${spaceId}/nodes/${nodeId}/bookmark`);
  }

  selectNode(
    spaceId: number,
    nodeId: string,
  ): Promise<{ document: DocumentWire; blockId: string; replaced: boolean }> {
    return this.request('POST', `/spaces/${spaceId}/nodes/${nodeId}/select`);
  }

  getDocument(): Promise<DocumentWire> {
    return this.request('GET', '/document');
  }

  putDocument(document: DocumentWire): Promise<DocumentWire> {
    return this.request('PUT', '/document', document);
  }
}
