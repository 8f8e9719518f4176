"""Core data model: actions, relations, snippets, and the graph container.

A graph is built once by the pipeline and treated as immutable afterwards.
Serialization is canonical JSON (sorted keys, fixed indentation, trailing
newline) so that rebuilding an unchanged corpus yields a byte-identical file.
Identifiers are content-derived hashes, never positional counters.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

log = logging.getLogger(__name__)

FORMAT_VERSION = 1

_ID_BYTES = 8  # 16 hex chars


class ActionSource(str, Enum):
    HEADING = "heading"
    TEXT = "text"
    COMMENT = "comment"


class RelationKind(str, Enum):
    HIERARCHICAL = "hierarchical"
    DESCRIPTIVE_SIBLING = "descriptive_sibling"
    PRECEDE_FOLLOW = "precede_follow"
    DUPLICATE = "duplicate"


class SnippetKind(str, Enum):
    FULL_BLOCK = "full_block"
    COMMENT_FRAGMENT = "comment_fragment"


class ApiKind(str, Enum):
    CLASS = "class"
    METHOD = "method"
    FIELD = "field"
    CONSTANT = "constant"


@dataclass(frozen=True, slots=True)
class ApiRef:
    """A resolved API element.  declaring_class equals fqn for classes."""

    fqn: str
    kind: ApiKind
    declaring_class: str

    @property
    def simple_name(self) -> str:
        return self.fqn.rsplit(".", 1)[-1]

    def to_dict(self) -> dict[str, Any]:
        return {"fqn": self.fqn, "kind": self.kind.value, "declaring_class": self.declaring_class}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ApiRef:
        return cls(fqn=d["fqn"], kind=ApiKind(d["kind"]), declaring_class=d["declaring_class"])


@dataclass(frozen=True, slots=True)
class Action:
    """A programming action: what a developer does, at sentence granularity.

    verb is a lowercase lemma; heading-derived actions may have an empty verb
    when the heading is a plain noun phrase.  sentence keeps the full source
    sentence (or heading / comment text) for display and de-duplication.
    """

    id: str
    verb: str
    object: str
    sentence: str
    source: ActionSource
    page_uri: str
    anchor: str | None = None

    @property
    def label(self) -> str:
        """Display label: headings read as written, others as verb phrase."""
        if self.source is ActionSource.HEADING:
            return self.sentence
        return f"{self.verb} {self.object}".strip()

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "verb": self.verb,
            "object": self.object,
            "sentence": self.sentence,
            "source": self.source.value,
            "page_uri": self.page_uri,
            "anchor": self.anchor,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Action:
        return cls(
            id=d["id"],
            verb=d["verb"],
            object=d["object"],
            sentence=d["sentence"],
            source=ActionSource(d["source"]),
            page_uri=d["page_uri"],
            anchor=d.get("anchor"),
        )


@dataclass(slots=True)
class ActionAttributes:
    """Attributes attached to one action.

    apis come from inline API markup in the action sentence, code holds ids of
    linked snippets.  location/condition/goal are extracted clause texts.
    """

    apis: list[ApiRef] = field(default_factory=list)
    location: str | None = None
    condition: str | None = None
    goal: str | None = None
    code: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "apis": [a.to_dict() for a in self.apis],
            "location": self.location,
            "condition": self.condition,
            "goal": self.goal,
            "code": list(self.code),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ActionAttributes:
        return cls(
            apis=[ApiRef.from_dict(a) for a in d.get("apis", [])],
            location=d.get("location"),
            condition=d.get("condition"),
            goal=d.get("goal"),
            code=list(d.get("code", [])),
        )


# shared empty-attributes fallback for lookups on actions without attributes
_NO_ATTRS = ActionAttributes()


@dataclass(frozen=True, slots=True)
class Relation:
    kind: RelationKind
    src: str
    dst: str

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "src": self.src, "dst": self.dst}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Relation:
        return cls(kind=RelationKind(d["kind"]), src=d["src"], dst=d["dst"])


@dataclass(slots=True)
class CodeSnippet:
    """A code example: a whole block, or the fragment governed by one comment.

    A comment_fragment's text is a contiguous substring of its parent block.
    apis holds one entry per recognized mention, so multiplicity is preserved
    for bag-style matching.
    """

    id: str
    text: str
    kind: SnippetKind
    page_uri: str
    parent_block: str | None = None
    language_hint: str | None = None
    apis: list[ApiRef] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "text": self.text,
            "kind": self.kind.value,
            "page_uri": self.page_uri,
            "parent_block": self.parent_block,
            "language_hint": self.language_hint,
            "apis": [a.to_dict() for a in self.apis],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> CodeSnippet:
        return cls(
            id=d["id"],
            text=d["text"],
            kind=SnippetKind(d["kind"]),
            page_uri=d["page_uri"],
            parent_block=d.get("parent_block"),
            language_hint=d.get("language_hint"),
            apis=[ApiRef.from_dict(a) for a in d.get("apis", [])],
        )


@dataclass(slots=True)
class GraphMeta:
    """Build metadata.  built_at honors SOURCE_DATE_EPOCH and is otherwise
    omitted, so rebuilding an unchanged corpus is byte-identical."""

    corpus_id: str = ""
    built_at: str | None = None
    counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"corpus_id": self.corpus_id, "built_at": self.built_at, "counts": self.counts}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> GraphMeta:
        return cls(
            corpus_id=d.get("corpus_id", ""),
            built_at=d.get("built_at"),
            counts=d.get("counts", {}),
        )


@dataclass(slots=True)
class KnowledgeGraph:
    meta: GraphMeta = field(default_factory=GraphMeta)
    actions: dict[str, Action] = field(default_factory=dict)
    attributes: dict[str, ActionAttributes] = field(default_factory=dict)
    relations: list[Relation] = field(default_factory=list)
    snippets: dict[str, CodeSnippet] = field(default_factory=dict)

    def attrs_for(self, action_id: str) -> ActionAttributes:
        return self.attributes.get(action_id) or ActionAttributes()

    def parent_of(self, action_id: str) -> str | None:
        for rel in self.relations:
            if rel.kind is RelationKind.HIERARCHICAL and rel.dst == action_id:
                return rel.src
        return None

    def children_of(self, action_id: str) -> list[str]:
        return [
            r.dst
            for r in self.relations
            if r.kind is RelationKind.HIERARCHICAL and r.src == action_id
        ]

    def roots(self) -> list[str]:
        with_parent = {
            r.dst for r in self.relations if r.kind is RelationKind.HIERARCHICAL
        }
        return [aid for aid in self.actions if aid not in with_parent]

    def actions_for_snippet(self, snippet_id: str) -> list[str]:
        # walk the actions array, not the attributes map: the map serializes
        # as a sorted JSON object, so only the array keeps document order
        return [
            aid
            for aid in self.actions
            if snippet_id in self.attributes.get(aid, _NO_ATTRS).code
        ]

    def recount(self) -> dict[str, dict[str, int]]:
        """Recompute the meta counts from graph content."""
        by_source = {s.value: 0 for s in ActionSource}
        for action in self.actions.values():
            by_source[action.source.value] += 1
        by_kind = {k.value: 0 for k in RelationKind}
        for rel in self.relations:
            by_kind[rel.kind.value] += 1
        by_snippet = {k.value: 0 for k in SnippetKind}
        for snip in self.snippets.values():
            by_snippet[snip.kind.value] += 1
        return {
            "actions_by_source": by_source,
            "relations_by_kind": by_kind,
            "snippets_by_kind": by_snippet,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": FORMAT_VERSION,
            "meta": self.meta.to_dict(),
            "actions": [a.to_dict() for a in self.actions.values()],
            "attributes": {aid: attrs.to_dict() for aid, attrs in self.attributes.items()},
            "relations": [r.to_dict() for r in self.relations],
            "snippets": [s.to_dict() for s in self.snippets.values()],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> KnowledgeGraph:
        version = d.get("version")
        if version != FORMAT_VERSION:
            raise GraphParseError(f"unsupported graph version {version!r}", field="version")
        graph = cls(meta=GraphMeta.from_dict(_expect(d, "meta", dict)))
        for entry in _expect(d, "actions", list):
            action = Action.from_dict(entry)
            if action.id in graph.actions:
                raise GraphParseError(f"duplicate action id {action.id!r}", field="actions")
            graph.actions[action.id] = action
        for aid, entry in _expect(d, "attributes", dict).items():
            graph.attributes[aid] = ActionAttributes.from_dict(entry)
        for entry in _expect(d, "relations", list):
            graph.relations.append(Relation.from_dict(entry))
        for entry in _expect(d, "snippets", list):
            snip = CodeSnippet.from_dict(entry)
            if snip.id in graph.snippets:
                raise GraphParseError(f"duplicate snippet id {snip.id!r}", field="snippets")
            graph.snippets[snip.id] = snip
        return graph


def _expect(d: dict[str, Any], key: str, typ: type) -> Any:
    if key not in d:
        raise GraphParseError(f"missing required field {key!r}", field=key)
    value = d[key]
    if not isinstance(value, typ):
        raise GraphParseError(
            f"field {key!r} must be {typ.__name__}, got {type(value).__name__}", field=key
        )
    return value


class GraphError(Exception):
    pass


class GraphParseError(GraphError):
    """Malformed graph input.  Carries the byte offset when known."""

    def __init__(self, message: str, *, field: str | None = None, offset: int | None = None):
        self.field = field
        self.offset = offset
        parts = [message]
        if field is not None:
            parts.append(f"field={field}")
        if offset is not None:
            parts.append(f"byte_offset={offset}")
        super().__init__("; ".join(parts))


class GraphValidationError(GraphError):
    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(v.message for v in report.violations[:8])
        more = len(report.violations) - 8
        if more > 0:
            lines += f"; and {more} more"
        super().__init__(f"invalid graph: {lines}")


@dataclass(frozen=True, slots=True)
class Violation:
    code: str
    message: str


@dataclass(slots=True)
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))


def content_id(*parts: str) -> str:
    """Stable content-derived identifier over the given parts."""
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return h.hexdigest()[: _ID_BYTES * 2]


def action_id(
    page_uri: str,
    anchor: str | None,
    sentence: str,
    source: ActionSource,
    verb: str,
    obj: str,
    ordinal: int = 0,
) -> str:
    # verb/object/ordinal keep ids unique when one sentence yields several
    # actions (coordinated clauses share page, anchor, sentence and source).
    return "a" + content_id(
        page_uri, anchor or "", sentence, source.value, verb, obj, str(ordinal)
    )


def snippet_id(page_uri: str, kind: SnippetKind, text: str, span: tuple[int, int]) -> str:
    return "s" + content_id(page_uri, kind.value, text, f"{span[0]}:{span[1]}")


def validate(graph: KnowledgeGraph) -> ValidationReport:
    """Check every structural invariant; return all violations found."""
    report = ValidationReport()
    _validate_actions(graph, report)
    _validate_attributes(graph, report)
    _validate_relations(graph, report)
    _validate_snippets(graph, report)
    _validate_counts(graph, report)
    return report


def _validate_actions(graph: KnowledgeGraph, report: ValidationReport) -> None:
    for aid, action in graph.actions.items():
        if aid != action.id:
            report.add("action.id.mismatch", f"action keyed {aid!r} carries id {action.id!r}")
        if action.source in (ActionSource.TEXT, ActionSource.COMMENT) and not action.verb:
            report.add(
                "action.verb.empty",
                f"{action.source.value} action {aid} has empty verb ({action.sentence!r})",
            )
        if action.source is ActionSource.COMMENT and not graph.attrs_for(aid).code:
            report.add(
                "action.comment.unlinked", f"comment action {aid} has no linked code snippet"
            )


def _validate_attributes(graph: KnowledgeGraph, report: ValidationReport) -> None:
    for aid, attrs in graph.attributes.items():
        if aid not in graph.actions:
            report.add("attributes.orphan", f"attributes for unknown action {aid}")
        seen: set[tuple[str, ApiKind]] = set()
        for ref in attrs.apis:
            key = (ref.fqn, ref.kind)
            if key in seen:
                report.add("attributes.apis.duplicate", f"action {aid} lists {ref.fqn} twice")
            seen.add(key)
        for sid in attrs.code:
            if sid not in graph.snippets:
                report.add("attributes.code.dangling", f"action {aid} links missing snippet {sid}")


def _validate_relations(graph: KnowledgeGraph, report: ValidationReport) -> None:
    parent: dict[str, str] = {}
    for rel in graph.relations:
        if rel.src == rel.dst:
            report.add("relation.self", f"{rel.kind.value} relation loops on {rel.src}")
            continue
        if rel.src not in graph.actions or rel.dst not in graph.actions:
            report.add(
                "relation.dangling",
                f"{rel.kind.value} relation {rel.src} -> {rel.dst} has unknown endpoint",
            )
            continue
        if rel.kind is RelationKind.HIERARCHICAL:
            if rel.dst in parent:
                report.add(
                    "relation.hierarchy.multiparent",
                    f"action {rel.dst} has parents {parent[rel.dst]} and {rel.src}",
                )
            else:
                parent[rel.dst] = rel.src

    # cycle check: follow parent links, marking visited chains
    state: dict[str, int] = {}
    for start in parent:
        if state.get(start):
            continue
        chain = []
        node: str | None = start
        while node is not None and state.get(node) is None:
            state[node] = 1
            chain.append(node)
            node = parent.get(node)
        if node is not None and state.get(node) == 1:
            report.add("relation.hierarchy.cycle", f"hierarchical cycle through {node}")
        for seen in chain:
            state[seen] = 2

    for rel in graph.relations:
        if rel.src not in graph.actions or rel.dst not in graph.actions or rel.src == rel.dst:
            continue
        if rel.kind in (RelationKind.DESCRIPTIVE_SIBLING, RelationKind.PRECEDE_FOLLOW):
            if parent.get(rel.src) != parent.get(rel.dst):
                report.add(
                    "relation.sibling.parent",
                    f"{rel.kind.value} relation {rel.src} -> {rel.dst} crosses parents",
                )
        elif rel.kind is RelationKind.DUPLICATE:
            src = graph.actions[rel.src]
            dst = graph.actions[rel.dst]
            if src.source is not ActionSource.COMMENT:
                report.add(
                    "relation.duplicate.src",
                    f"duplicate relation source {rel.src} is {src.source.value}, not comment",
                )
            if dst.source not in (ActionSource.HEADING, ActionSource.TEXT):
                report.add(
                    "relation.duplicate.dst",
                    f"duplicate relation target {rel.dst} is {dst.source.value}",
                )
            if parent.get(rel.src) != parent.get(rel.dst):
                report.add(
                    "relation.duplicate.parent",
                    f"duplicate relation {rel.src} -> {rel.dst} crosses parents",
                )


def _validate_snippets(graph: KnowledgeGraph, report: ValidationReport) -> None:
    referenced: set[str] = set()
    for attrs in graph.attributes.values():
        referenced.update(attrs.code)
    for sid, snip in graph.snippets.items():
        if sid != snip.id:
            report.add("snippet.id.mismatch", f"snippet keyed {sid!r} carries id {snip.id!r}")
        if snip.kind is SnippetKind.COMMENT_FRAGMENT:
            if snip.parent_block is None:
                report.add("snippet.fragment.orphan", f"fragment {sid} has no parent block")
            elif snip.parent_block not in graph.snippets:
                report.add(
                    "snippet.fragment.dangling",
                    f"fragment {sid} names missing parent {snip.parent_block}",
                )
            elif snip.text not in graph.snippets[snip.parent_block].text:
                report.add(
                    "snippet.fragment.text",
                    f"fragment {sid} text is not a substring of its parent block",
                )
        elif snip.parent_block is not None:
            report.add("snippet.block.parent", f"full block {sid} names a parent block")
        if sid not in referenced:
            report.add("snippet.unreferenced", f"snippet {sid} is referenced by no action")


def _validate_counts(graph: KnowledgeGraph, report: ValidationReport) -> None:
    if not graph.meta.counts:
        report.add("meta.counts.missing", "meta counts are missing")
        return
    actual = graph.recount()
    if graph.meta.counts != actual:
        report.add(
            "meta.counts.stale",
            f"meta counts {graph.meta.counts} do not match recomputed {actual}",
        )


def dumps_graph(graph: KnowledgeGraph) -> str:
    """Canonical serialization: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(graph.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def save_graph(graph: KnowledgeGraph, path: str | Path) -> None:
    """Write the graph to path.  Refuses to persist an invalid graph."""
    report = validate(graph)
    if not report.ok:
        raise GraphValidationError(report)
    Path(path).write_text(dumps_graph(graph), encoding="utf-8")


def loads_graph(payload: str) -> KnowledgeGraph:
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise GraphParseError("graph document must be a JSON object", offset=0)
    graph = KnowledgeGraph.from_dict(doc)
    report = validate(graph)
    if not report.ok:
        raise GraphValidationError(report)
    return graph


def load_graph(path: str | Path) -> KnowledgeGraph:
    """Read and validate a graph file.

    Parse failures name the byte offset and offending field; reference
    failures surface as a validation error listing every violation.
    """
    return loads_graph(Path(path).read_text(encoding="utf-8"))
