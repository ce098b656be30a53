/**
 * Explorer view state and the transitions the UI is allowed to make.
 *
 * Invariants kept here rather than scattered across handlers:
 *  - selections only ever contain ids of currently rendered points
 *  - at most two selections exist (A, and B in comparison mode)
 *  - a lasso in comparison mode fills B; outside it, replaces A
 */

import type { Report } from "./api.js";

export interface ViewState {
  datasetId: string | null;
  projectionId: string | null;
  nRows: number;
  /** Row-aligned projected coordinates; empty until a projection exists. */
  coords: [number, number][];
  selectionA: number[];
  selectionB: number[];
  /** Explicit toggle — a second lasso never silently starts a comparison. */
  compareMode: boolean;
  report: Report | null;
}

export function initialState(): ViewState {
  return {
    datasetId: null,
    projectionId: null,
    nRows: 0,
    coords: [],
    selectionA: [],
    selectionB: [],
    compareMode: false,
    report: null,
  };
}

/** A new dataset invalidates everything downstream of the old one. */
export function withDataset(datasetId: string, nRows: number): ViewState {
  return {
    ...initialState(),
    datasetId,
    nRows,
  };
}

export function withProjection(
  state: ViewState,
  projectionId: string,
  coords: [number, number][],
): ViewState {
  return {
    ...state,
    projectionId,
    coords,
    selectionA: [],
    selectionB: [],
    report: null,
  };
}

function validIds(ids: number[], nRows: number): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const id of ids) {
    if (Number.isInteger(id) && id >= 0 && id < nRows && !seen.has(id)) {
      seen.add(id);
      out.push(id);
    }
  }
  out.sort((a, b) => a - b);
  return out;
}

/**
 * Apply a completed lasso. In comparison mode the new ids become
 * selection B; otherwise they replace selection A. Ids outside the
 * rendered rows are dropped so selections stay a subset of the plot.
 */
export function applyLasso(state: ViewState, ids: number[]): ViewState {
  const clean = validIds(ids, state.nRows);
  if (state.compareMode && state.selectionA.length > 0) {
    return { ...state, selectionB: clean };
  }
  return { ...state, selectionA: clean, selectionB: [] };
}

export function setCompareMode(state: ViewState, on: boolean): ViewState {
  if (on === state.compareMode) return state;
  // leaving comparison mode discards B so at most one selection remains
  return { ...state, compareMode: on, selectionB: on ? state.selectionB : [] };
}

export function clearSelections(state: ViewState): ViewState {
  return { ...state, selectionA: [], selectionB: [], report: null };
}

export function withReport(state: ViewState, report: Report | null): ViewState {
  return { ...state, report };
}
