import { ApiClient, ServiceError } from "./client.js";
import { renderLegend } from "./excerpt.js";
import { IdleTrigger } from "./idle.js";
import {
  applyEdit,
  applyResponse,
  initialState,
  setBanner,
  setConfig,
  setLocked,
  showDetail,
  showDetailError,
  toggleNode,
  type SessionState,
} from "./state.js";
import { findNode, graftChildren, isExpanded } from "./tree.js";
import { renderDetailPanel, renderTreePanel } from "./view.js";

const client = new ApiClient();
let state: SessionState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

const codeEl = el<HTMLTextAreaElement>("code");
const bannerEl = el<HTMLElement>("banner");
const treeEl = el<HTMLElement>("tree");
const detailEl = el<HTMLElement>("detail");
const statusEl = el<HTMLElement>("status");
const lockEl = el<HTMLInputElement>("lock");
const submitEl = el<HTMLButtonElement>("submit-selection");
const granularityEl = el<HTMLSelectElement>("granularity");
const multiplicityEl = el<HTMLSelectElement>("multiplicity");
const unmatchedEl = el<HTMLSelectElement>("unmatched");
const topNEl = el<HTMLInputElement>("top-n");
const configCodeEl = el<HTMLElement>("config-code");

function render(): void {
  bannerEl.hidden = state.banner === null;
  bannerEl.textContent = state.banner ?? "";
  treeEl.innerHTML = renderTreePanel(state);
  detailEl.innerHTML = renderDetailPanel(state);
  configCodeEl.textContent = state.config;
}

function update(next: SessionState): void {
  state = next;
  render();
}

function currentConfig(): string {
  return `${granularityEl.value}-${multiplicityEl.value}-${unmatchedEl.value}`;
}

function describeFailure(err: unknown): string {
  if (err instanceof ServiceError) {
    return `${err.code}: ${err.message}`;
  }
  return "service unreachable; keep editing, nothing is lost";
}

async function requestRecommendation(body: { code: string } | { selection: string }): Promise<void> {
  statusEl.textContent = "asking…";
  try {
    const response = await client.recommend({
      ...body,
      config: state.config,
      top_n: state.topN,
    });
    if (response === null) {
      return; // superseded by a newer request
    }
    update(applyResponse(setBanner(state, null), response));
    statusEl.textContent = state.locked ? "panel locked; response dropped" : "";
  } catch (err) {
    update(setBanner(state, describeFailure(err)));
    statusEl.textContent = "";
  }
}

const idle = new IdleTrigger(() => {
  if (state.code.trim() !== "") {
    void requestRecommendation({ code: state.code });
  }
});

codeEl.addEventListener("input", () => {
  update(applyEdit(state, codeEl.value));
  idle.edit();
});

submitEl.addEventListener("click", () => {
  const selected = codeEl.value.slice(codeEl.selectionStart, codeEl.selectionEnd).trim();
  if (selected === "") {
    update(setBanner(state, "select an API name in the code pane first"));
    return;
  }
  idle.cancel();
  void requestRecommendation({ selection: selected });
});

lockEl.addEventListener("change", () => {
  update(setLocked(state, lockEl.checked));
});

for (const control of [granularityEl, multiplicityEl, unmatchedEl, topNEl]) {
  control.addEventListener("change", () => {
    const topN = Number.parseInt(topNEl.value, 10);
    update(setConfig(state, currentConfig(), Number.isNaN(topN) ? state.topN : topN));
  });
}

treeEl.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const item = target.closest<HTMLElement>("li[data-action-id]");
  if (item === null || state.lastResponse === null) {
    return;
  }
  const actionId = item.dataset["actionId"] ?? "";
  const node = findNode(state.lastResponse.hierarchy, actionId);
  if (node === null) {
    return;
  }
  if (target.closest("button.toggle") !== null) {
    const expanded = isExpanded(node, state.overrides);
    if (!expanded && node.has_children && node.children.length === 0) {
      void client
        .hierarchy(actionId)
        .then((fetched) => {
          if (state.lastResponse === null) {
            return;
          }
          const hierarchy = graftChildren(state.lastResponse.hierarchy, actionId, fetched);
          update(
            toggleNode(
              { ...state, lastResponse: { ...state.lastResponse, hierarchy } },
              actionId,
              true,
            ),
          );
        })
        .catch((err) => update(setBanner(state, describeFailure(err))));
    } else {
      update(toggleNode(state, actionId, !expanded));
    }
    return;
  }
  void client
    .action(actionId)
    .then((detail) => update(showDetail(state, detail)))
    .catch((err) => {
      if (err instanceof ServiceError && err.status === 404) {
        update(showDetailError(state, "that task is no longer in the graph"));
      } else {
        update(setBanner(state, describeFailure(err)));
      }
    });
});

el<HTMLElement>("legend").innerHTML = renderLegend();
void client
  .stats()
  .then((stats) => {
    statusEl.textContent = `corpus ${stats.corpus_id}, ${stats.pages} pages`;
  })
  .catch(() => {
    update(setBanner(state, "service unreachable; keep editing, nothing is lost"));
  });
render();
