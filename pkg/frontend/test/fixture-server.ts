/**
 * Scripted in-memory double of the gateway for UI tests. It mirrors the
 * server contracts the app relies on (positions pinned to label ticks,
 * document normalization, filter membership) and lets tests deliver run
 * events one at a time so intermediate UI states can be asserted.
 */

import type { RunStreamFactory, RunStreamHandlers, FetchLike } from '../src/api.js';
import type {
  BlockWire,
  DimensionWire,
  DocumentWire,
  ExplorationWire,
  FilterWire,
  NodeWire,
  RunEvent,
  SpaceWire,
} from '../src/types.js';
import { requirementLabel } from '../src/types.js';

interface SpaceRecord {
  space: SpaceWire;
  exploration: ExplorationWire;
}

function emptyExploration(): ExplorationWire {
  return {
    xAxis: null,
    yAxis: null,
    filter: { selections: {}, bookmarkedOnly: false },
    searchQuery: '',
    zoomScale: 1.0,
    selectedNodeId: null,
  };
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json', 'X-Schema-Version': '1' },
  });
}

export function makeDimension(name: string, labels: string[]): DimensionWire {
  return {
    name,
    kind: 'nominal',
    origin: 'generated',
    values: labels.map((label) => ({ label })),
  };
}

let nodeCounter = 0;

export function makeNode(labels: Record<string, string>, id?: string): NodeWire {
  nodeCounter += 1;
  const nodeId = id ?? `n${nodeCounter}`;
  return {
    id: nodeId,
    fullText: `Full text of ${nodeId} covering ${Object.values(labels).join(', ')}.`,
    bundle: {
      keywords: ['alpha', 'beta'],
      summary: `Summary of ${nodeId}.`,
      structure: 'start-middle-end',
      title: `Title ${nodeId}`,
    },
    requirement: Object.entries(labels),
    bookmarked: false,
    provenance: 'initial',
    createdAt: nodeCounter,
  };
}

export class FixtureServer {
  readonly spaces = new Map<number, SpaceRecord>();
  document: DocumentWire = { blocks: [] };
  activeSpaceId: number | null = null;
  requests: { method: string; path: string; body?: unknown }[] = [];

  private nextSpaceId = 1;
  private nextRunId = 1;
  private nextBlockSeq = 1;
  private runSpace = new Map<number, number>();
  private runBacklog = new Map<number, RunEvent[]>();
  private runHandlers = new Map<number, RunStreamHandlers>();
  private lastSubspaceFilter: FilterWire | null = null;

  get fetchFn(): FetchLike {
    return async (url, init) => this.handle(url, init);
  }

  get streamFactory(): RunStreamFactory {
    return (url, handlers) => {
      const match = url.match(/\/runs\/(\d+)\/events$/);
      if (!match) throw new Error(`bad stream url: ${url}`);
      const runId = Number(match[1]);
      this.runHandlers.set(runId, handlers);
      for (const event of this.runBacklog.get(runId) ?? []) handlers.onEvent(event);
      this.runBacklog.delete(runId);
      return { close: () => this.runHandlers.delete(runId) };
    };
  }

  /** Deliver one run event: applied to the model, then pushed to the client. */
  emit(runId: number, event: RunEvent): void {
    const spaceId = this.runSpace.get(runId);
    if (spaceId === undefined) throw new Error(`unknown run ${runId}`);
    this.applyEvent(spaceId, event);
    const handlers = this.runHandlers.get(runId);
    if (handlers) handlers.onEvent(event);
    else this.runBacklog.set(runId, [...(this.runBacklog.get(runId) ?? []), event]);
  }

  latestRunId(): number {
    return this.nextRunId - 1;
  }

  lastSubspaceRequest(): FilterWire | null {
    return this.lastSubspaceFilter;
  }

  space(spaceId: number): SpaceWire {
    const record = this.spaces.get(spaceId);
    if (!record) throw new Error(`no space ${spaceId}`);
    return record.space;
  }

  private applyEvent(spaceId: number, event: RunEvent): void {
    const record = this.spaces.get(spaceId);
    if (!record) return;
    if (event.kind === 'dimensionsReady') {
      for (const dimension of event.dimensions) {
        if (!record.space.dimensions.some((d) => d.name === dimension.name)) {
          record.space.dimensions.push(dimension);
        }
      }
    } else if (event.kind === 'nodeReady') {
      const index = record.space.nodes.findIndex((n) => n.id === event.node.id);
      if (index >= 0) record.space.nodes[index] = event.node;
      else record.space.nodes.push(event.node);
    }
  }

  private createSpace(prompt: string): SpaceRecord {
    const record: SpaceRecord = {
      space: {
        spaceId: this.nextSpaceId,
        prompt,
        contextSnapshot: '',
        highlightSnapshot: '',
        parentSpaceId: null,
        dimensions: [],
        nodes: [],
      },
      exploration: emptyExploration(),
    };
    this.spaces.set(this.nextSpaceId, record);
    this.activeSpaceId = this.nextSpaceId;
    this.nextSpaceId += 1;
    return record;
  }

  private newRun(spaceId: number): number {
    const runId = this.nextRunId;
    this.nextRunId += 1;
    this.runSpace.set(runId, spaceId);
    return runId;
  }

  private async handle(url: string, init?: RequestInit): Promise<Response> {
    const method = init?.method ?? 'GET';
    const [pathWithQuery] = url.split('#');
    const [path, query = ''] = pathWithQuery.split('?');
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.requests.push({ method, path, body });

    let match: RegExpMatchArray | null;

    if (method === 'POST' && path === '/api/v1/spaces') {
      const record = this.createSpace(body.prompt);
      record.space.contextSnapshot = body.context ?? '';
      record.space.highlightSnapshot = body.highlight ?? '';
      const runId = this.newRun(record.space.spaceId);
      return json({ runId, spaceId: record.space.spaceId }, 202);
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)$/)) && method === 'GET') {
      const record = this.spaces.get(Number(match[1]));
      if (!record) return json({ code: 'notFound', message: 'no such space' }, 404);
      const params = new URLSearchParams(query);
      const result: Record<string, unknown> = {
        space: record.space,
        exploration: record.exploration,
      };
      const scale = params.get('scale');
      if (scale !== null) {
        const level = this.resolveLevel(Number(scale));
        result.level = level;
        result.payloads = Object.fromEntries(
          record.space.nodes.map((node) => [node.id, this.levelPayload(node, level)]),
        );
      }
      return json(result);
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)\/active$/)) && method === 'POST') {
      const record = this.spaces.get(Number(match[1]));
      if (!record) return json({ code: 'notFound', message: 'no such space' }, 404);
      this.activeSpaceId = record.space.spaceId;
      return json({
        activeSpaceId: record.space.spaceId,
        exploration: record.exploration,
        changed: true,
      });
    }

    if (
      (match = path.match(/^\/api\/v1\/spaces\/(\d+)\/nodes\/([^/]+)\/similar$/)) &&
      method === 'POST'
    ) {
      const runId = this.newRun(Number(match[1]));
      return json({ runId, spaceId: Number(match[1]) }, 202);
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)\/subspace-generate$/)) && method === 'POST') {
      this.lastSubspaceFilter = body.filter;
      const runId = this.newRun(Number(match[1]));
      return json({ runId, spaceId: Number(match[1]) }, 202);
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)\/dimensions$/)) && method === 'POST') {
      const runId = this.newRun(Number(match[1]));
      return json({ runId, spaceId: Number(match[1]) }, 202);
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)\/search$/)) && method === 'GET') {
      const record = this.spaces.get(Number(match[1]));
      if (!record) return json({ code: 'notFound', message: 'no such space' }, 404);
      const needle = (new URLSearchParams(query).get('q') ?? '').toLowerCase();
      const matched = record.space.nodes
        .filter((n) => n.fullText.toLowerCase().includes(needle))
        .map((n) => n.id);
      const dimmed = record.space.nodes.map((n) => n.id).filter((id) => !matched.includes(id));
      return json({ matched, dimmed });
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)\/filter$/)) && method === 'POST') {
      const record = this.spaces.get(Number(match[1]));
      if (!record) return json({ code: 'notFound', message: 'no such space' }, 404);
      const filter: FilterWire = body.filter;
      record.exploration.filter = filter;
      const matched = record.space.nodes
        .filter((node) => {
          if (filter.bookmarkedOnly && !node.bookmarked) return false;
          return Object.entries(filter.selections).every(([dim, accepted]) =>
            accepted.includes(requirementLabel(node, dim) ?? ''),
          );
        })
        .map((n) => n.id);
      return json({ matched });
    }

    if ((match = path.match(/^\/api\/v1\/spaces\/(\d+)\/layout$/)) && method === 'POST') {
      const record = this.spaces.get(Number(match[1]));
      if (!record) return json({ code: 'notFound', message: 'no such space' }, 404);
      record.exploration.xAxis = body.selection.x ?? null;
      record.exploration.yAxis = body.selection.y ?? null;
      return json(this.layout(record.space, body.selection, body.viewport));
    }

    if (
      (match = path.match(/^\/api\/v1\/spaces\/(\d+)\/nodes\/([^/]+)\/bookmark$/)) &&
      method === 'POST'
    ) {
      const record = this.spaces.get(Number(match[1]));
      const node = record?.space.nodes.find((n) => n.id === match![2]);
      if (!record || !node) return json({ code: 'notFound', message: 'no such node' }, 404);
      node.bookmarked = !node.bookmarked;
      return json({ bookmarked: node.bookmarked });
    }

    if (
      (match = path.match(/^\/api\/v1\/spaces\/(\d+)\/nodes\/([^/]+)\/select$/)) &&
      method === 'POST'
    ) {
      const record = this.spaces.get(Number(match[1]));
      const node = record?.space.nodes.find((n) => n.id === match![2]);
      if (!record || !node) return json({ code: 'notFound', message: 'no such node' }, 404);
      return json(this.selectNode(record.space.spaceId, node));
    }

    if (path === '/api/v1/document' && method === 'GET') {
      return json(this.document);
    }

    if (path === '/api/v1/document' && method === 'PUT') {
      const incoming: DocumentWire = body;
      const normalized = incoming.blocks.map((block) => {
        const previous = this.document.blocks.find((b) => b.id === block.id);
        if (previous && previous.kind === 'aiLinked' && block.text !== previous.text) {
          return { ...block, kind: 'userText' as const, highlighted: false };
        }
        return block;
      });
      this.document = { blocks: normalized };
      return json(this.document);
    }

    return json({ code: 'notFound', message: `no route ${method} ${path}` }, 404);
  }

  private selectNode(spaceId: number, node: NodeWire) {
    const link = { spaceId, nodeId: node.id };
    const pending = this.document.blocks.find((b) => b.highlighted && b.kind === 'aiLinked');
    if (pending) {
      const updated: BlockWire = { ...pending, text: node.fullText, link };
      this.document = {
        blocks: this.document.blocks.map((b) => (b.id === pending.id ? updated : b)),
      };
      return { document: this.document, blockId: pending.id, replaced: true };
    }
    const block: BlockWire = {
      id: `b${this.nextBlockSeq++}`,
      kind: 'aiLinked',
      text: node.fullText,
      link,
      highlighted: true,
    };
    this.document = { blocks: [...this.document.blocks, block] };
    return { document: this.document, blockId: block.id, replaced: false };
  }

  private layout(
    space: SpaceWire,
    selection: { x: string | null; y: string | null },
    viewport: { width: number; height: number },
  ) {
    const ticksFor = (dimension: string, extent: number): [string, number][] => {
      const labels = space.dimensions.find((d) => d.name === dimension)?.values ?? [];
      return labels.map((value, index) => [
        value.label,
        ((index + 0.5) * extent) / labels.length,
      ]);
    };
    const positions: Record<string, [number, number]> = {};
    if (!selection.x && !selection.y) {
      for (const node of space.nodes) {
        positions[node.id] = [viewport.width / 2, viewport.height / 2];
      }
      return { positions, xTicks: [], yTicks: [] };
    }
    const xTicks = selection.x ? ticksFor(selection.x, viewport.width) : [];
    const yTicks = selection.y ? ticksFor(selection.y, viewport.height) : [];
    const xOf = new Map(xTicks);
    const yOf = new Map(yTicks);
    for (const node of space.nodes) {
      const x = selection.x
        ? (xOf.get(requirementLabel(node, selection.x) ?? '') ?? 0)
        : viewport.width / 2;
      const y = selection.y
        ? (yOf.get(requirementLabel(node, selection.y) ?? '') ?? 0)
        : viewport.height / 2;
      positions[node.id] = [x, y];
    }
    return { positions, xTicks, yTicks };
  }

  /** Mirrors the server's zoom bands; the agreement test leans on this. */
  private resolveLevel(scale: number): string {
    if (scale < 0.25) return 'dot';
    if (scale < 0.5) return 'title';
    if (scale < 0.75) return 'keyword';
    if (scale < 1.5) return 'summary';
    return 'fullText';
  }

  private levelPayload(node: NodeWire, level: string) {
    if (level === 'dot') return { id: node.id };
    if (level === 'title') return { id: node.id, title: node.bundle.title };
    if (level === 'keyword') return { id: node.id, keywords: node.bundle.keywords };
    if (level === 'summary') {
      return {
        id: node.id,
        summary: node.bundle.summary,
        tags: node.requirement.map(([name, label]) => `${name}: ${label}`),
      };
    }
    return { id: node.id, fullText: node.fullText };
  }
}
