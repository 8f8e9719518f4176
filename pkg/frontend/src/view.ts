import { renderExcerpt } from "./excerpt.js";
import { escapeHtml } from "./html.js";
import type { SessionState } from "./state.js";
import { renderTree } from "./tree.js";
import type { ActionDetail, Recommendation } from "./types.js";

function renderRecommendation(rec: Recommendation): string {
  const labels = rec.actions.map((a) => escapeHtml(a.label)).join("; ");
  return (
    `<details class="recommendation" ${rec.rank === 1 ? "open" : ""}>` +
    `<summary><span class="rank-badge">${rec.rank}</span> ` +
    `<span class="score">${rec.score.toFixed(4)}</span> ${labels}</summary>` +
    renderExcerpt(rec.excerpt) +
    `<p class="matched-keys">matched: ${rec.matched_keys.map(escapeHtml).join(", ") || "none"}</p>` +
    `</details>`
  );
}

export function renderActionDetail(detail: ActionDetail): string {
  const attrs = ["condition", "goal", "location"]
    .map((name) => {
      const value = detail.attributes[name];
      return typeof value === "string" && value !== ""
        ? `<li>${name}: ${escapeHtml(value)}</li>`
        : "";
    })
    .join("");
  const snippets = detail.snippets
    .map((s) => `<pre class="excerpt">${escapeHtml(s.text)}</pre>`)
    .join("");
  return (
    `<h3>${escapeHtml(detail.action.label)}</h3>` +
    `<p class="sentence">${escapeHtml(detail.action.sentence)}</p>` +
    (attrs ? `<ul class="attrs">${attrs}</ul>` : "") +
    snippets
  );
}

/** Tree panel HTML, derived from state alone. */
export function renderTreePanel(state: SessionState): string {
  if (state.lastResponse === null) {
    return `<p class="empty">Recommendations appear after a 5 second pause in editing.</p>`;
  }
  return renderTree(state.lastResponse.hierarchy, state.overrides);
}

/** Detail panel HTML, derived from state alone. A clicked action wins over
 * the recommendation list; otherwise the ranked excerpts are shown. */
export function renderDetailPanel(state: SessionState): string {
  if (state.detailError !== null) {
    return `<p class="notice">${escapeHtml(state.detailError)}</p>`;
  }
  if (state.detail !== null) {
    return renderActionDetail(state.detail);
  }
  if (state.lastResponse === null) {
    return "";
  }
  if (state.lastResponse.recommendations.length === 0) {
    return `<p class="empty">No snippet shares an API with this code.</p>`;
  }
  return state.lastResponse.recommendations.map(renderRecommendation).join("");
}
