/**
 * Exploration canvas: glyphs at server-assigned positions, rendered at the
 * semantic level of the committed zoom scale. The canvas never computes
 * positions or filter membership itself; it applies what the server sent.
 */

import { levelPayload, resolveLevel, type SemanticLevel } from './levels.js';
import type { LayoutWire, NodeWire } from './types.js';

const DIMMED_OPACITY = '0.25';

export interface CanvasCallbacks {
  onNodeClick(nodeId: string): void;
  onMoreLikeThis(nodeId: string): void;
  onDoubleClickCanvas(): void;
}

export class ExplorationCanvas {
  private readonly root: HTMLElement;
  private readonly glyphLayer: HTMLElement;
  private readonly tickLayer: HTMLElement;
  private nodes = new Map<string, NodeWire>();
  private scale = 1.0;
  private matched: Set<string> | null = null;
  private selectedNodeId: string | null = null;

  constructor(container: HTMLElement, private readonly callbacks: CanvasCallbacks) {
    const doc = container.ownerDocument;
    this.root = doc.createElement('div');
    this.root.className = 'canvas';
    this.tickLayer = doc.createElement('div');
    this.tickLayer.className = 'tick-layer';
    this.glyphLayer = doc.createElement('div');
    this.glyphLayer.className = 'glyph-layer';
    this.root.append(this.tickLayer, this.glyphLayer);
    this.root.addEventListener('dblclick', (event) => {
      if (event.target === this.root || event.target === this.glyphLayer) {
        this.callbacks.onDoubleClickCanvas();
      }
    });
    container.appendChild(this.root);
  }

  get element(): HTMLElement {
    return this.root;
  }

  reset(nodes: NodeWire[]): void {
    this.nodes = new Map(nodes.map((n) => [n.id, n]));
    this.matched = null;
    this.selectedNodeId = null;
    this.glyphLayer.replaceChildren();
    for (const node of nodes) this.ensureGlyph(node);
  }

  upsertNode(node: NodeWire): void {
    this.nodes.set(node.id, node);
    this.ensureGlyph(node);
  }

  get glyphCount(): number {
    return this.glyphLayer.children.length;
  }

  glyph(nodeId: string): HTMLElement | null {
    return this.glyphLayer.querySelector<HTMLElement>(`[data-node-id="${nodeId}"]`);
  }

  get currentLevel(): SemanticLevel {
    return resolveLevel(this.scale);
  }

  setScale(scale: number): void {
    this.scale = scale;
    for (const node of this.nodes.values()) this.renderGlyphContent(node);
  }

  applyLayout(layout: LayoutWire): void {
    for (const [nodeId, [x, y]] of Object.entries(layout.positions)) {
      const glyph = this.glyph(nodeId);
      if (!glyph) continue;
      glyph.style.left = `${x}px`;
      glyph.style.top = `${y}px`;
      glyph.dataset.x = String(x);
      glyph.dataset.y = String(y);
    }
    this.tickLayer.replaceChildren();
    const doc = this.root.ownerDocument;
    for (const [label, coord] of layout.xTicks) {
      const tick = doc.createElement('div');
      tick.className = 'tick tick-x';
      tick.textContent = label;
      tick.style.left = `${coord}px`;
      tick.dataset.label = label;
      tick.dataset.coord = String(coord);
      this.tickLayer.appendChild(tick);
    }
    for (const [label, coord] of layout.yTicks) {
      const tick = doc.createElement('div');
      tick.className = 'tick tick-y';
      tick.textContent = label;
      tick.style.top = `${coord}px`;
      tick.dataset.label = label;
      tick.dataset.coord = String(coord);
      this.tickLayer.appendChild(tick);
    }
  }

  /** Dim everything outside the matched set; null clears the partition. */
  setPartition(matched: Set<string> | null): void {
    this.matched = matched;
    for (const node of this.nodes.values()) {
      const glyph = this.glyph(node.id);
      if (!glyph) continue;
      const dimmed = matched !== null && !matched.has(node.id);
      glyph.style.opacity = dimmed ? DIMMED_OPACITY : '1';
      glyph.classList.toggle('dimmed', dimmed);
    }
  }

  setSelected(nodeId: string | null): void {
    this.selectedNodeId = nodeId;
    for (const node of this.nodes.values()) {
      this.glyph(node.id)?.classList.toggle('selected', node.id === nodeId);
    }
  }

  setBookmarked(nodeId: string, bookmarked: boolean): void {
    const node = this.nodes.get(nodeId);
    if (node) node.bookmarked = bookmarked;
    this.glyph(nodeId)?.classList.toggle('bookmarked', bookmarked);
  }

  private ensureGlyph(node: NodeWire): void {
    let glyph = this.glyph(node.id);
    if (!glyph) {
      const doc = this.root.ownerDocument;
      glyph = doc.createElement('div');
      glyph.className = 'glyph';
      glyph.dataset.nodeId = node.id;
      glyph.addEventListener('click', (event) => {
        if ((event.target as HTMLElement).classList.contains('more-like-this')) return;
        this.callbacks.onNodeClick(node.id);
      });
      const more = doc.createElement('button');
      more.className = 'more-like-this';
      more.textContent = '+ more like this';
      more.addEventListener('click', () => this.callbacks.onMoreLikeThis(node.id));
      glyph.appendChild(more);
      const content = doc.createElement('div');
      content.className = 'glyph-content';
      glyph.appendChild(content);
      this.glyphLayer.appendChild(glyph);
    }
    glyph.classList.toggle('bookmarked', node.bookmarked);
    glyph.classList.toggle('selected', node.id === this.selectedNodeId);
    if (this.matched !== null) {
      const dimmed = !this.matched.has(node.id);
      glyph.style.opacity = dimmed ? DIMMED_OPACITY : '1';
      glyph.classList.toggle('dimmed', dimmed);
    }
    this.renderGlyphContent(node);
  }

  private renderGlyphContent(node: NodeWire): void {
    const glyph = this.glyph(node.id);
    if (!glyph) return;
    const level = resolveLevel(this.scale);
    const payload = levelPayload(node, level);
    glyph.dataset.level = level;
    const content = glyph.querySelector<HTMLElement>('.glyph-content');
    if (!content) return;
    content.replaceChildren();
    const doc = glyph.ownerDocument;
    if (level === 'dot') return;
    if (level === 'title') {
      content.textContent = payload.title ?? '';
      return;
    }
    if (level === 'keyword') {
      for (const keyword of payload.keywords ?? []) {
        const chip = doc.createElement('span');
        chip.className = 'keyword';
        chip.textContent = keyword;
        content.appendChild(chip);
      }
      return;
    }
    if (level === 'summary') {
      const summary = doc.createElement('p');
      summary.textContent = payload.summary ?? '';
      content.appendChild(summary);
      const tags = doc.createElement('div');
      tags.className = 'tags';
      for (const tag of payload.tags ?? []) {
        const el = doc.createElement('span');
        el.className = 'tag';
        el.textContent = tag;
        tags.appendChild(el);
      }
      content.appendChild(tags);
      return;
    }
    content.textContent = payload.fullText ?? '';
  }
}
