/**
 * Block editor pane. Linked blocks arrive highlighted in yellow until the
 * writer edits them; editing commits the block as user text through the
 * server, which owns the conversion rule. Linked blocks carry the
 * space-switch affordance.
 */

import type { BlockWire, DocumentWire } from './types.js';

export interface EditorCallbacks {
  onBlockEdited(blockId: string, text: string): void;
  onShowSpace(spaceId: number): void;
}

export class BlockEditor {
  private readonly root: HTMLElement;
  private document: DocumentWire = { blocks: [] };

  constructor(container: HTMLElement, private readonly callbacks: EditorCallbacks) {
    this.root = container.ownerDocument.createElement('div');
    this.root.className = 'editor';
    container.appendChild(this.root);
  }

  get element(): HTMLElement {
    return this.root;
  }

  get blocks(): BlockWire[] {
    return this.document.blocks;
  }

  get highlightedBlocks(): HTMLElement[] {
    return Array.from(this.root.querySelectorAll<HTMLElement>('.block.highlighted'));
  }

  apply(document: DocumentWire): void {
    this.document = document;
    this.root.replaceChildren();
    const doc = this.root.ownerDocument;
    for (const block of document.blocks) {
      const el = doc.createElement('div');
      el.className = 'block';
      el.dataset.blockId = block.id;
      el.dataset.kind = block.kind;
      el.classList.toggle('highlighted', block.highlighted);
      el.classList.toggle('ai-linked', block.kind === 'aiLinked');

      const text = doc.createElement('div');
      text.className = 'block-text';
      text.setAttribute('contenteditable', 'true');
      text.textContent = block.text;
      text.addEventListener('input', () => {
        this.callbacks.onBlockEdited(block.id, text.textContent ?? '');
      });
      el.appendChild(text);

      if (block.link) {
        const spaceId = block.link.spaceId;
        const info = doc.createElement('button');
        info.className = 'show-information';
        info.textContent = `space #${spaceId}`;
        const show = doc.createElement('button');
        show.className = 'show-space';
        show.textContent = 'show space';
        show.addEventListener('click', () => this.callbacks.onShowSpace(spaceId));
        el.append(info, show);
      }
      this.root.appendChild(el);
    }
  }

  /** Simulate a user typing into a block (used by tests and keyboard glue). */
  editBlock(blockId: string, text: string): void {
    const el = this.root.querySelector<HTMLElement>(
      `.block[data-block-id="${blockId}"] .block-text`,
    );
    if (!el) throw new Error(`no block ${blockId}`);
    el.textContent = text;
    this.callbacks.onBlockEdited(blockId, text);
  }
}
