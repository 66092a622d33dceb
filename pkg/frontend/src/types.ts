/** Wire types for the /api/v1 gateway. Field names match the JSON bodies. */

export type DimensionKind = 'nominal' | 'ordinal';

export interface DimensionValueWire {
  label: string;
  rank?: number;
}

export interface DimensionWire {
  name: string;
  kind: DimensionKind;
  origin: 'generated' | 'user-defined';
  values: DimensionValueWire[];
}

export interface BundleWire {
  keywords: string[];
  summary: string;
  structure: string;
  title: string;
}

export type RequirementWire = [string, string][];

export interface NodeWire {
  id: string;
  fullText: string;
  bundle: BundleWire;
  requirement: RequirementWire;
  bookmarked: boolean;
  provenance: 'initial' | 'more-like-this' | 'subspace' | 'revision';
  createdAt: number;
}

export interface SpaceWire {
  spaceId: number;
  prompt: string;
  contextSnapshot: string;
  highlightSnapshot: string;
  parentSpaceId: number | null;
  dimensions: DimensionWire[];
  nodes: NodeWire[];
}

export interface FilterWire {
  selections: Record<string, string[]>;
  bookmarkedOnly: boolean;
}

export interface ExplorationWire {
  xAxis: string | null;
  yAxis: string | null;
  filter: FilterWire;
  searchQuery: string;
  zoomScale: number;
  selectedNodeId: string | null;
}

export interface LayoutWire {
  positions: Record<string, [number, number]>;
  xTicks: [string, number][];
  yTicks: [string, number][];
}

export interface RunStatsWire {
  requested: number;
  produced: number;
  failed: number;
  calls: number;
  error: string | null;
  notes: string[];
}

export interface BlockLinkWire {
  spaceId: number;
  nodeId: string;
}

export interface BlockWire {
  id: string;
  kind: 'userText' | 'aiLinked';
  text: string;
  link: BlockLinkWire | null;
  highlighted: boolean;
}

export interface DocumentWire {
  blocks: BlockWire[];
}

export type RunEvent =
  | { kind: 'dimensionsReady'; dimensions: DimensionWire[] }
  | { kind: 'nodeReady'; node: NodeWire }
  | { kind: 'nodeFailed'; failure: { nodeId: string; stage: string; message: string } }
  | { kind: 'done'; stats: RunStatsWire };

export interface AcceptedRun {
  runId: number;
  spaceId: number;
}

export function requirementLabel(node: NodeWire, dimension: string): string | undefined {
  const found = node.requirement.find(([name]) => name === dimension);
  return found?.[1];
}
