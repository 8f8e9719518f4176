"""Relation extraction over the actions of one page.

Builders consume PageItem rows (an action plus its provenance inside the
page) in document order and emit relation edges.  Comment de-duplication is
pluggable: the default detector is token-overlap Jaccard over stopped,
stemmed clause tokens, and a trained classifier can replace it behind the
same two-sentence interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from tutorialkg.model import (
    Action,
    ActionAttributes,
    ActionSource,
    Relation,
    RelationKind,
)
from tutorialkg.textproc import content_tokens


@dataclass(slots=True)
class PageItem:
    """One extracted action with the page coordinates relation building needs."""

    action: Action
    attrs: ActionAttributes
    clause: str
    node_index: int
    sentence_position: int = 0
    pair_index: int = 0
    heading_level: int | None = None  # headings only; 0 marks a synthetic root
    preset_parent: str | None = None  # comments: the section action they attach to
    list_group: int | None = None  # ordered-list run the node belongs to
    parent_id: str | None = None  # filled by build_hierarchy

    @property
    def source(self) -> ActionSource:
        return self.action.source

    @property
    def order_key(self) -> tuple[int, int, int]:
        return (self.node_index, self.sentence_position, self.pair_index)


def build_hierarchy(items: list[PageItem]) -> list[Relation]:
    """Nest heading actions by level, attach text actions to the nearest
    enclosing heading, and comment actions to their preset section action."""
    relations: list[Relation] = []
    stack: list[tuple[int, str]] = []  # (heading level, action id)
    by_id = {item.action.id: item for item in items}
    for item in items:
        if item.source is ActionSource.HEADING:
            level = item.heading_level if item.heading_level is not None else 6
            while stack and stack[-1][0] >= level:
                stack.pop()
            parent = stack[-1][1] if stack else None
            item.parent_id = parent
            if parent is not None:
                relations.append(Relation(RelationKind.HIERARCHICAL, parent, item.action.id))
            stack.append((level, item.action.id))
        elif item.source is ActionSource.TEXT:
            parent = stack[-1][1] if stack else None
            item.parent_id = parent
            if parent is not None:
                relations.append(Relation(RelationKind.HIERARCHICAL, parent, item.action.id))
        else:  # comment
            parent = item.preset_parent
            if parent is not None and parent in by_id and parent != item.action.id:
                item.parent_id = parent
                relations.append(Relation(RelationKind.HIERARCHICAL, parent, item.action.id))
    return relations


def build_descriptive_siblings(items: list[PageItem]) -> list[Relation]:
    """Chain same-parent actions of one sentence, or of adjacent sentences in
    one prose node, in mention order.  Comment actions only chain within the
    same comment segment (code separates segments)."""
    relations: list[Relation] = []
    groups: dict[tuple[str | None, int], list[PageItem]] = {}
    for item in items:
        if item.source is ActionSource.HEADING:
            continue
        groups.setdefault((item.parent_id, item.node_index), []).append(item)
    for (_, _), members in sorted(groups.items(), key=lambda kv: kv[1][0].order_key):
        members.sort(key=lambda m: m.order_key)
        for a, b in zip(members, members[1:]):
            gap = b.sentence_position - a.sentence_position
            if gap == 0 or (gap == 1 and a.source is not ActionSource.COMMENT):
                relations.append(
                    Relation(RelationKind.DESCRIPTIVE_SIBLING, a.action.id, b.action.id)
                )
    return relations


def build_precede_follow(items: list[PageItem]) -> list[Relation]:
    """Chain actions across the items of one ordered list, step to step."""
    relations: list[Relation] = []
    runs: dict[int, list[PageItem]] = {}
    for item in items:
        if item.list_group is not None and item.source is ActionSource.TEXT:
            runs.setdefault(item.list_group, []).append(item)
    for group in sorted(runs):
        members = sorted(runs[group], key=lambda m: m.order_key)
        by_node: dict[int, list[PageItem]] = {}
        for member in members:
            by_node.setdefault(member.node_index, []).append(member)
        nodes = sorted(by_node)
        for prev, nxt in zip(nodes, nodes[1:]):
            relations.append(
                Relation(
                    RelationKind.PRECEDE_FOLLOW,
                    by_node[prev][-1].action.id,
                    by_node[nxt][0].action.id,
                )
            )
    return relations


class DuplicateDetector(Protocol):
    """Decides whether a comment clause restates a text/heading clause.

    Swap-in point for a trained sentence-pair classifier; the pipeline only
    ever calls this method.
    """

    def is_duplicate(self, comment_sentence: str, text_sentence: str) -> bool: ...


@dataclass(slots=True)
class JaccardDuplicateDetector:
    """Default detector: Jaccard over lowercased, punctuation-stripped,
    stopword-free, stemmed tokens (lists shipped in textproc)."""

    threshold: float = 0.25

    def score(self, a: str, b: str) -> float:
        ta = set(content_tokens(a))
        tb = set(content_tokens(b))
        if not ta or not tb:
            return 0.0
        union = ta | tb
        if not union:
            return 0.0
        return len(ta & tb) / len(union)

    def is_duplicate(self, comment_sentence: str, text_sentence: str) -> bool:
        return self.score(comment_sentence, text_sentence) >= self.threshold


def default_duplicate_detector() -> JaccardDuplicateDetector:
    return JaccardDuplicateDetector(threshold=0.25)


@dataclass(slots=True)
class DedupeResult:
    relations: list[Relation] = field(default_factory=list)
    # snippet ids to additionally link onto the duplicate text action
    relinked: list[tuple[str, str]] = field(default_factory=list)  # (action_id, snippet_id)


def dedupe_comment_actions(
    items: list[PageItem], detector: DuplicateDetector | None = None
) -> DedupeResult:
    """Mark comment actions that restate a text or heading sibling.

    Each comment action is tested against every text/heading action under the
    same parent in document order; the first positive wins.  The comment
    action is retained, and its comment-fragment snippet is additionally
    linked to the duplicate target so both reach the same code.
    """
    detector = detector or default_duplicate_detector()
    result = DedupeResult()
    for item in sorted(
        (i for i in items if i.source is ActionSource.COMMENT), key=lambda m: m.order_key
    ):
        siblings = [
            other
            for other in items
            if other.action.id != item.action.id
            and other.parent_id == item.parent_id
            and other.source in (ActionSource.HEADING, ActionSource.TEXT)
        ]
        siblings.sort(key=lambda m: m.order_key)
        for sibling in siblings:
            if not detector.is_duplicate(item.clause, sibling.clause):
                continue
            result.relations.append(
                Relation(RelationKind.DUPLICATE, item.action.id, sibling.action.id)
            )
            for sid in item.attrs.code:
                if sid not in sibling.attrs.code:
                    result.relinked.append((sibling.action.id, sid))
            break
    return result
