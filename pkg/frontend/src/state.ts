import type { ActionDetail, RecommendResponse } from "./types.js";

/** Everything the panels render from. Reducers below are pure so any render
 * is reconstructible from the state object alone. */
export interface SessionState {
  code: string;
  selection: string | null;
  config: string;
  topN: number;
  locked: boolean;
  banner: string | null;
  lastResponse: RecommendResponse | null;
  /** User expand/collapse clicks, keyed by action id. Overlays the expansion
   * state delivered in lastResponse and is cleared by the next unlocked
   * response. */
  overrides: Record<string, boolean>;
  detail: ActionDetail | null;
  detailError: string | null;
}

export const DEFAULT_CONFIG = "A-B-U";
export const DEFAULT_TOP_N = 3;

export function initialState(): SessionState {
  return {
    code: "",
    selection: null,
    config: DEFAULT_CONFIG,
    topN: DEFAULT_TOP_N,
    locked: false,
    banner: null,
    lastResponse: null,
    overrides: {},
    detail: null,
    detailError: null,
  };
}

export function applyEdit(state: SessionState, code: string): SessionState {
  return { ...state, code, selection: null };
}

export function applySelection(state: SessionState, selection: string | null): SessionState {
  return { ...state, selection };
}

export function setConfig(state: SessionState, config: string, topN: number): SessionState {
  return { ...state, config, topN };
}

export function setLocked(state: SessionState, locked: boolean): SessionState {
  return { ...state, locked };
}

export function setBanner(state: SessionState, banner: string | null): SessionState {
  return { ...state, banner };
}

/** A locked panel keeps its content: the new response is dropped whole, user
 * toggles included. Unlocked, the response replaces the panels and resets
 * the toggles. */
export function applyResponse(state: SessionState, response: RecommendResponse): SessionState {
  if (state.locked) {
    return state;
  }
  return {
    ...state,
    lastResponse: response,
    overrides: {},
    banner: null,
    detail: null,
    detailError: null,
  };
}

export function toggleNode(state: SessionState, actionId: string, expanded: boolean): SessionState {
  return { ...state, overrides: { ...state.overrides, [actionId]: expanded } };
}

export function showDetail(state: SessionState, detail: ActionDetail): SessionState {
  return { ...state, detail, detailError: null };
}

export function showDetailError(state: SessionState, message: string): SessionState {
  return { ...state, detail: null, detailError: message };
}
