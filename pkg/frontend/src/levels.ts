/**
 * Semantic zoom levels. The thresholds mirror the server's bands and must
 * stay in sync with them; the payload test compares this module's output
 * against GET /spaces/{id}?scale= for agreement.
 */

import type { NodeWire } from './types.js';

export type SemanticLevel = 'dot' | 'title' | 'keyword' | 'summary' | 'fullText';

export const LEVEL_ORDER: SemanticLevel[] = ['dot', 'title', 'keyword', 'summary', 'fullText'];

const BANDS: [number, SemanticLevel][] = [
  [0.25, 'dot'],
  [0.5, 'title'],
  [0.75, 'keyword'],
  [1.5, 'summary'],
];

/** Midpoint scale of each band; the level icons jump straight to these. */
export const BAND_MIDPOINTS: Record<SemanticLevel, number> = {
  dot: 0.125,
  title: 0.375,
  keyword: 0.625,
  summary: 1.125,
  fullText: 2.0,
};

export function resolveLevel(zoomScale: number): SemanticLevel {
  if (zoomScale <= 0) throw new RangeError('zoom scale must be positive');
  for (const [upper, level] of BANDS) {
    if (zoomScale < upper) return level;
  }
  return 'fullText';
}

export interface LevelPayload {
  id: string;
  title?: string;
  keywords?: string[];
  summary?: string;
  tags?: string[];
  fullText?: string;
}

export function levelPayload(node: NodeWire, level: SemanticLevel): LevelPayload {
  switch (level) {
    case 'dot':
      return { id: node.id };
    case 'title':
      return { id: node.id, title: node.bundle.title };
    case 'keyword':
      return { id: node.id, keywords: node.bundle.keywords };
    case 'summary':
      return {
        id: node.id,
        summary: node.bundle.summary,
        tags: node.requirement.map(([name, label]) => `${name}: ${label}`),
      };
    case 'fullText':
      return { id: node.id, fullText: node.fullText };
  }
}
