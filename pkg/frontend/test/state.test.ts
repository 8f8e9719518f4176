import { describe, expect, it } from "vitest";

import {
  applyEdit,
  applyResponse,
  initialState,
  setLocked,
  showDetail,
  showDetailError,
  toggleNode,
} from "../src/state.js";
import { renderDetailPanel, renderTreePanel } from "../src/view.js";
import type { ActionDetail, RecommendResponse } from "../src/types.js";
import q9 from "./fixtures/q9_response.json";

const response = q9 as unknown as RecommendResponse;

describe("session state", () => {
  it("an unlocked panel takes the new response and resets toggles", () => {
    let state = toggleNode(initialState(), "a1", false);
    state = applyResponse(state, response);
    expect(state.lastResponse).toBe(response);
    expect(state.overrides).toEqual({});
  });

  it("a locked panel never re-renders on new responses", () => {
    const locked = setLocked(initialState(), true);
    const after = applyResponse(locked, response);
    expect(after).toBe(locked);
    expect(after.lastResponse).toBeNull();
  });

  it("user collapse state survives until the next unlocked response", () => {
    let state = applyResponse(initialState(), response);
    const rootId = response.hierarchy[0]?.action_id as string;
    state = toggleNode(state, rootId, false);
    expect(renderTreePanel(state)).toContain(`data-action-id="${rootId}" class="node collapsed"`);

    const whileLocked = applyResponse(setLocked(state, true), response);
    expect(whileLocked.overrides).toEqual({ [rootId]: false });

    const afterUnlock = applyResponse(setLocked(whileLocked, false), response);
    expect(afterUnlock.overrides).toEqual({});
  });

  it("editing replaces the code buffer and drops the selection", () => {
    const state = applyEdit({ ...initialState(), selection: "Dialog" }, "int x;");
    expect(state.code).toBe("int x;");
    expect(state.selection).toBeNull();
  });
});

describe("panel rendering from state alone", () => {
  it("is reproducible: the same state renders the same HTML", () => {
    const state = applyResponse(initialState(), response);
    expect(renderTreePanel(state)).toBe(renderTreePanel({ ...state }));
    expect(renderDetailPanel(state)).toBe(renderDetailPanel({ ...state }));
  });

  it("shows ranked recommendations with scores", () => {
    const html = renderDetailPanel(applyResponse(initialState(), response));
    expect(html).toContain(`<span class="rank-badge">1</span>`);
    expect(html).toContain(`<span class="rank-badge">2</span>`);
    expect(html).toContain(`<span class="rank-badge">3</span>`);
    expect(html).toContain("1.8333");
  });

  it("a clicked action detail wins over the recommendation list", () => {
    const detail: ActionDetail = {
      action: {
        id: "a1",
        verb: "remove",
        object: "dialog title",
        label: "remove dialog title",
        sentence: "// remove the dialog title",
        source: "comment",
        page_uri: "dialogs.html",
        anchor: null,
      },
      attributes: { condition: "", goal: "get the Dialog", location: "" },
      relations: [],
      snippets: [],
    };
    const state = showDetail(applyResponse(initialState(), response), detail);
    const html = renderDetailPanel(state);
    expect(html).toContain("remove dialog title");
    expect(html).toContain("goal: get the Dialog");
    expect(html).not.toContain("rank-badge");
  });

  it("a stale action id shows an inline notice", () => {
    const state = showDetailError(
      applyResponse(initialState(), response),
      "that task is no longer in the graph",
    );
    expect(renderDetailPanel(state)).toContain("no longer in the graph");
  });

  it("renders a hint before the first response", () => {
    expect(renderTreePanel(initialState())).toContain("5 second pause");
    expect(renderDetailPanel(initialState())).toBe("");
  });
});
