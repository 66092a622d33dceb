/**
 * Two-pane app: block editor on the left, zoomable exploration canvas on the
 * right. The server stays authoritative for positions, levels of the
 * committed scale, filter membership, and document normalization; this
 * module only wires interactions to endpoints and applies what comes back.
 */

import { ApiClient } from './api.js';
import { ExplorationCanvas } from './canvas.js';
import { BlockEditor } from './editor.js';
import { BAND_MIDPOINTS, resolveLevel, type SemanticLevel } from './levels.js';
import { ViewStateStore } from './state.js';
import { ToastTray } from './toasts.js';
import type { DimensionWire, FilterWire, NodeWire, RunEvent, SpaceWire } from './types.js';

const DEFAULT_VIEWPORT = { width: 1000, height: 700 };
const SIMILAR_COUNT = 5;
const ZOOM_MIN = 0.05;
const ZOOM_MAX = 4.0;

export interface AppOptions {
  viewport?: { width: number; height: number };
  toastAutoDismissMs?: number;
}

export class App {
  readonly states = new ViewStateStore();
  readonly toasts: ToastTray;
  readonly canvas: ExplorationCanvas;
  readonly editor: BlockEditor;

  private space: SpaceWire | null = null;
  private readonly viewport: { width: number; height: number };
  private readonly chipBar: HTMLElement;
  private readonly promptInput: HTMLInputElement;
  private errorBanner!: HTMLElement;
  private pendingHighlight = '';
  private pending: Promise<unknown> = Promise.resolve();

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    options: AppOptions = {},
  ) {
    this.viewport = options.viewport ?? DEFAULT_VIEWPORT;
    const doc = root.ownerDocument;

    const editorPane = doc.createElement('div');
    editorPane.className = 'pane editor-pane';
    const canvasPane = doc.createElement('div');
    canvasPane.className = 'pane canvas-pane';
    root.append(editorPane, canvasPane);

    this.editor = new BlockEditor(editorPane, {
      onBlockEdited: (blockId, text) => this.commitBlockEdit(blockId, text),
      onShowSpace: (spaceId) => void this.switchSpace(spaceId),
    });

    this.promptInput = doc.createElement('input');
    this.promptInput.className = 'prompt-input';
    this.promptInput.placeholder = 'Ask for ideas...';
    this.promptInput.addEventListener('keydown', (event) => {
      if ((event as KeyboardEvent).key === 'Enter' && this.promptInput.value.trim()) {
        void this.submitPrompt(this.promptInput.value);
        this.promptInput.value = '';
      }
    });
    editorPane.appendChild(this.promptInput);

    this.chipBar = doc.createElement('div');
    this.chipBar.className = 'chip-bar';
    canvasPane.appendChild(this.chipBar);

    this.errorBanner = doc.createElement('div');
    this.errorBanner.className = 'error-banner hidden';
    this.errorBanner.addEventListener('click', () => this.errorBanner.classList.add('hidden'));
    canvasPane.appendChild(this.errorBanner);

    const levelBar = doc.createElement('div');
    levelBar.className = 'level-bar';
    for (const level of Object.keys(BAND_MIDPOINTS) as SemanticLevel[]) {
      const icon = doc.createElement('button');
      icon.className = 'level-icon';
      icon.dataset.level = level;
      icon.textContent = level;
      icon.addEventListener('click', () => this.jumpToLevel(level));
      levelBar.appendChild(icon);
    }
    canvasPane.appendChild(levelBar);

    this.toasts = new ToastTray(canvasPane, options.toastAutoDismissMs ?? 4000);
    this.canvas = new ExplorationCanvas(canvasPane, {
      onNodeClick: (nodeId) => void this.selectNode(nodeId),
      onMoreLikeThis: (nodeId) => void this.generateSimilar(nodeId),
      onDoubleClickCanvas: () => this.jumpZoom(),
    });
    this.canvas.element.addEventListener('wheel', (event) => {
      const delta = (event as WheelEvent).deltaY;
      this.setZoom(this.zoomScale * (delta > 0 ? 0.9 : 1.1));
    });
  }

  /** Resolves once all in-flight work, including chained follow-ups, settles. */
  async whenIdle(): Promise<void> {
    let observed: Promise<unknown>;
    do {
      observed = this.pending;
      await observed;
    } while (observed !== this.pending);
  }

  /** Chain work into the idle barrier; failures show the banner instead of
   *  rejecting, so fire-and-forget handlers never leak unhandled rejections. */
  private track<T>(work: Promise<T>): Promise<T | undefined> {
    const observed = work.catch((error: unknown) => {
      this.showError(error instanceof Error ? error.message : String(error));
      return undefined;
    });
    this.pending = this.pending.then(() => observed);
    return observed;
  }

  private showError(message: string): void {
    this.errorBanner.textContent = `${message} (click to dismiss)`;
    this.errorBanner.classList.remove('hidden');
  }

  get visibleError(): string | null {
    return this.errorBanner.classList.contains('hidden')
      ? null
      : this.errorBanner.textContent;
  }

  get currentSpace(): SpaceWire | null {
    return this.space;
  }

  get zoomScale(): number {
    return this.states.activeSpaceId === null ? 1.0 : this.states.current.zoomScale;
  }

  get activeFilter(): FilterWire {
    return this.states.activeSpaceId === null
      ? { selections: {}, bookmarkedOnly: false }
      : this.states.current.filter;
  }

  setHighlightedSelection(text: string): void {
    this.pendingHighlight = text;
  }

  // -- prompting ------------------------------------------------------------

  editorContext(): string {
    return this.editor.blocks.map((b) => b.text).join('\n');
  }

  async submitPrompt(prompt: string): Promise<void> {
    if (!prompt.trim()) return;
    const accepted = await this.track(
      this.api.createSpace({
        prompt,
        context: this.editorContext() || undefined,
        highlight: this.pendingHighlight || undefined,
      }),
    );
    if (!accepted) return;
    this.pendingHighlight = '';
    this.states.setActive(accepted.spaceId);
    this.space = {
      spaceId: accepted.spaceId,
      prompt,
      contextSnapshot: '',
      highlightSnapshot: '',
      parentSpaceId: null,
      dimensions: [],
      nodes: [],
    };
    this.canvas.reset([]);
    this.canvas.setScale(this.zoomScale);
    this.subscribe(accepted.runId, accepted.spaceId);
  }

  private subscribe(runId: number, spaceId: number): void {
    this.api.subscribeRun(runId, {
      onEvent: (event) => this.track(this.handleRunEvent(event, spaceId)),
    });
  }

  private async handleRunEvent(event: RunEvent, spaceId: number): Promise<void> {
    if (this.space === null || this.space.spaceId !== spaceId) return;
    if (event.kind === 'dimensionsReady') {
      for (const dimension of event.dimensions) {
        if (!this.space.dimensions.some((d) => d.name === dimension.name)) {
          this.space.dimensions.push(dimension);
          this.toasts.announceDimension(dimension.name);
        }
      }
      this.renderChips();
      return;
    }
    if (event.kind === 'nodeReady') {
      this.mergeNode(event.node);
      await this.refreshLayout();
      return;
    }
    if (event.kind === 'nodeFailed') {
      return;
    }
    if (event.stats.error) {
      this.toasts.announceNotice(`generation failed: ${event.stats.error}`);
    } else if (event.stats.failed > 0) {
      this.toasts.announceNotice(`${event.stats.failed} failed`);
    }
    await this.refreshSpace();
  }

  private mergeNode(node: NodeWire): void {
    if (!this.space) return;
    const index = this.space.nodes.findIndex((n) => n.id === node.id);
    if (index >= 0) this.space.nodes[index] = node;
    else this.space.nodes.push(node);
    this.canvas.upsertNode(node);
  }

  private async refreshSpace(): Promise<void> {
    if (!this.space) return;
    const detail = await this.api.getSpace(this.space.spaceId);
    this.space = detail.space;
    for (const node of detail.space.nodes) this.canvas.upsertNode(node);
    this.renderChips();
  }

  // -- zoom -------------------------------------------------------------------

  setZoom(scale: number): void {
    const clamped = Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, scale));
    if (this.states.activeSpaceId !== null) {
      this.states.update(this.states.activeSpaceId, { zoomScale: clamped });
    }
    this.canvas.setScale(clamped);
  }

  /** Double-click: empty canvas jumps to full text; from full text back to dots. */
  jumpZoom(): void {
    const level = resolveLevel(this.zoomScale);
    this.setZoom(level === 'fullText' ? BAND_MIDPOINTS.dot : BAND_MIDPOINTS.fullText);
  }

  jumpToLevel(level: SemanticLevel): void {
    this.setZoom(BAND_MIDPOINTS[level]);
  }

  // -- selection and editing -----------------------------------------------------

  async selectNode(nodeId: string): Promise<void> {
    if (!this.space) return;
    const result = await this.track(this.api.selectNode(this.space.spaceId, nodeId));
    if (!result) return;
    this.editor.apply(result.document);
    this.canvas.setSelected(nodeId);
  }

  private async commitBlockEdit(blockId: string, text: string): Promise<void> {
    const blocks = this.editor.blocks.map((b) => (b.id === blockId ? { ...b, text } : b));
    const updated = await this.track(this.api.putDocument({ blocks }));
    if (updated) this.editor.apply(updated);
  }

  async toggleBookmark(nodeId: string): Promise<void> {
    if (!this.space) return;
    const result = await this.track(this.api.toggleBookmark(this.space.spaceId, nodeId));
    if (result) this.canvas.setBookmarked(nodeId, result.bookmarked);
  }

  // -- axes, filters, search ---------------------------------------------------

  async selectAxis(x: string | null, y: string | null = null): Promise<void> {
    if (!this.space) return;
    this.states.update(this.space.spaceId, { xAxis: x, yAxis: y });
    await this.refreshLayout();
  }

  private async refreshLayout(): Promise<void> {
    if (!this.space) return;
    const state = this.states.forSpace(this.space.spaceId);
    const layout = await this.track(
      this.api.layout(this.space.spaceId, { x: state.xAxis, y: state.yAxis }, this.viewport),
    );
    if (layout) this.canvas.applyLayout(layout);
  }

  async toggleValueChip(dimension: string, label: string): Promise<void> {
    if (!this.space) return;
    const filter = structuredClone(this.activeFilter);
    const accepted = new Set(filter.selections[dimension] ?? []);
    if (accepted.has(label)) accepted.delete(label);
    else accepted.add(label);
    if (accepted.size > 0) filter.selections[dimension] = Array.from(accepted);
    else delete filter.selections[dimension];
    await this.applyFilter(filter);
  }

  async applyFilter(filter: FilterWire): Promise<void> {
    if (!this.space) return;
    this.states.update(this.space.spaceId, { filter });
    const empty = Object.keys(filter.selections).length === 0 && !filter.bookmarkedOnly;
    if (empty) {
      this.canvas.setPartition(null);
      this.renderChips();
      return;
    }
    const result = await this.track(this.api.applyFilter(this.space.spaceId, filter));
    if (result) this.canvas.setPartition(new Set(result.matched));
    this.renderChips();
  }

  async clearFilterAndAxes(): Promise<void> {
    if (!this.space) return;
    this.states.update(this.space.spaceId, {
      filter: { selections: {}, bookmarkedOnly: false },
      xAxis: null,
      yAxis: null,
    });
    this.canvas.setPartition(null);
    await this.refreshLayout();
    this.renderChips();
  }

  async search(query: string): Promise<void> {
    if (!this.space) return;
    this.states.update(this.space.spaceId, { searchQuery: query });
    if (!query) {
      this.canvas.setPartition(null);
      return;
    }
    const result = await this.track(this.api.search(this.space.spaceId, query));
    if (result) this.canvas.setPartition(new Set(result.matched));
  }

  // -- regeneration ----------------------------------------------------------------

  async generateSimilar(nodeId: string): Promise<void> {
    if (!this.space) return;
    const accepted = await this.track(
      this.api.generateSimilar(this.space.spaceId, nodeId, SIMILAR_COUNT),
    );
    if (accepted) this.subscribe(accepted.runId, accepted.spaceId);
  }

  async generateMoreInFilter(k = SIMILAR_COUNT): Promise<void> {
    if (!this.space) return;
    const accepted = await this.track(
      this.api.generateInSubspace(this.space.spaceId, this.activeFilter, k),
    );
    if (accepted) this.subscribe(accepted.runId, accepted.spaceId);
  }

  async addDimension(name: string): Promise<void> {
    if (!this.space) return;
    const accepted = await this.track(this.api.addDimension(this.space.spaceId, name));
    if (accepted) this.subscribe(accepted.runId, accepted.spaceId);
  }

  // -- space switching -----------------------------------------------------------------

  async switchSpace(spaceId: number): Promise<void> {
    const result = await this.track(this.api.switchSpace(spaceId));
    if (!result) return;
    const state = this.states.restore(spaceId, result.exploration);
    const detail = await this.track(this.api.getSpace(spaceId));
    if (!detail) return;
    this.space = detail.space;
    this.canvas.reset(detail.space.nodes);
    this.canvas.setScale(state.zoomScale);
    this.renderChips();
    await this.refreshLayout();
    const filterEmpty =
      Object.keys(state.filter.selections).length === 0 && !state.filter.bookmarkedOnly;
    if (!filterEmpty) {
      const matched = await this.track(this.api.applyFilter(spaceId, state.filter));
      if (matched) this.canvas.setPartition(new Set(matched.matched));
    }
  }

  // -- chips ------------------------------------------------------------------------------

  private renderChips(): void {
    this.chipBar.replaceChildren();
    if (!this.space) return;
    const doc = this.chipBar.ownerDocument;
    const filter = this.activeFilter;
    for (const dimension of this.space.dimensions) {
      const group = doc.createElement('div');
      group.className = 'chip-group';
      group.dataset.dimension = dimension.name;
      const title = doc.createElement('button');
      title.className = 'chip-dimension';
      title.textContent = dimension.name;
      title.addEventListener('click', () => void this.selectAxis(dimension.name));
      group.appendChild(title);
      for (const value of dimension.values) {
        const chip = doc.createElement('button');
        chip.className = 'chip-value';
        chip.textContent = value.label;
        chip.dataset.label = value.label;
        const active = (filter.selections[dimension.name] ?? []).includes(value.label);
        chip.classList.toggle('active', active);
        chip.addEventListener('click', () =>
          void this.toggleValueChip(dimension.name, value.label),
        );
        group.appendChild(chip);
      }
      this.chipBar.appendChild(group);
    }
  }

  valueChips(dimension: string): HTMLElement[] {
    return Array.from(
      this.chipBar.querySelectorAll<HTMLElement>(
        `.chip-group[data-dimension="${dimension}"] .chip-value`,
      ),
    );
  }

  dimensionsShown(): DimensionWire[] {
    return this.space?.dimensions ?? [];
  }
}
