import { escapeHtml } from "./html.js";
import type { HierarchyNode } from "./types.js";

/** Effective expansion: a user toggle wins over the server-delivered flag. */
export function isExpanded(node: HierarchyNode, overrides: Record<string, boolean>): boolean {
  return overrides[node.action_id] ?? node.expanded;
}

function renderNode(node: HierarchyNode, overrides: Record<string, boolean>): string {
  const expanded = isExpanded(node, overrides);
  const classes = ["node", expanded ? "expanded" : "collapsed"];
  const toggle = node.has_children
    ? `<button class="toggle" type="button" aria-expanded="${expanded}">${expanded ? "▾" : "▸"}</button>`
    : `<span class="toggle leaf">·</span>`;
  const labelClasses = ["label", `src-${node.source}`];
  if (node.rank !== null) {
    labelClasses.push("recommended");
  }
  const badge = node.rank !== null ? `<span class="rank-badge">${node.rank}</span>` : "";
  const children =
    expanded && node.children.length > 0
      ? `<ul>${node.children.map((c) => renderNode(c, overrides)).join("")}</ul>`
      : "";
  return (
    `<li data-action-id="${escapeHtml(node.action_id)}" class="${classes.join(" ")}">` +
    `${toggle}<span class="${labelClasses.join(" ")}">${escapeHtml(node.label)}</span>${badge}${children}</li>`
  );
}

export function renderTree(
  nodes: HierarchyNode[],
  overrides: Record<string, boolean> = {},
): string {
  if (nodes.length === 0) {
    return `<p class="empty">No tasks to show yet.</p>`;
  }
  return `<ul class="tree">${nodes.map((n) => renderNode(n, overrides)).join("")}</ul>`;
}

export function findNode(nodes: HierarchyNode[], actionId: string): HierarchyNode | null {
  for (const node of nodes) {
    if (node.action_id === actionId) {
      return node;
    }
    const hit = findNode(node.children, actionId);
    if (hit !== null) {
      return hit;
    }
  }
  return null;
}

/** Replace the children of actionId with those found for the same node in
 * `fetched` (a forest from GET /api/hierarchy/{id}). Returns a new forest;
 * the original is untouched. */
export function graftChildren(
  nodes: HierarchyNode[],
  actionId: string,
  fetched: HierarchyNode[],
): HierarchyNode[] {
  const source = findNode(fetched, actionId);
  if (source === null) {
    return nodes;
  }
  const replace = (list: HierarchyNode[]): HierarchyNode[] =>
    list.map((node) =>
      node.action_id === actionId
        ? { ...node, children: source.children, has_children: source.has_children }
        : { ...node, children: replace(node.children) },
    );
  return replace(nodes);
}
