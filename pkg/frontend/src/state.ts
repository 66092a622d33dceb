/**
 * Per-space view state, mirroring the server-side exploration state after
 * every committed interaction. Switching spaces restores the stored state.
 */

import type { ExplorationWire, FilterWire } from './types.js';

export interface ViewState {
  zoomScale: number;
  panX: number;
  panY: number;
  xAxis: string | null;
  yAxis: string | null;
  filter: FilterWire;
  searchQuery: string;
}

export function defaultViewState(): ViewState {
  return {
    zoomScale: 1.0,
    panX: 0,
    panY: 0,
    xAxis: null,
    yAxis: null,
    filter: { selections: {}, bookmarkedOnly: false },
    searchQuery: '',
  };
}

export function fromExploration(exploration: ExplorationWire): ViewState {
  return {
    ...defaultViewState(),
    zoomScale: exploration.zoomScale > 0 ? exploration.zoomScale : 1.0,
    xAxis: exploration.xAxis,
    yAxis: exploration.yAxis,
    filter: exploration.filter,
    searchQuery: exploration.searchQuery,
  };
}

export class ViewStateStore {
  private states = new Map<number, ViewState>();
  private active: number | null = null;

  get activeSpaceId(): number | null {
    return this.active;
  }

  setActive(spaceId: number): void {
    this.active = spaceId;
    if (!this.states.has(spaceId)) this.states.set(spaceId, defaultViewState());
  }

  forSpace(spaceId: number): ViewState {
    let state = this.states.get(spaceId);
    if (!state) {
      state = defaultViewState();
      this.states.set(spaceId, state);
    }
    return state;
  }

  get current(): ViewState {
    if (this.active === null) throw new Error('no active space');
    return this.forSpace(this.active);
  }

  update(spaceId: number, changes: Partial<ViewState>): ViewState {
    const next = { ...this.forSpace(spaceId), ...changes };
    this.states.set(spaceId, next);
    return next;
  }

  restore(spaceId: number, exploration: ExplorationWire): ViewState {
    const kept = this.states.get(spaceId);
    const restored = kept ?? fromExploration(exploration);
    this.states.set(spaceId, restored);
    this.active = spaceId;
    return restored;
  }
}
