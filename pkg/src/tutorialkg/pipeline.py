"""Corpus-to-graph pipeline.

Walks each parsed page in document order: heading actions nest by level,
classified text sentences yield verb/object actions with clause attributes,
code blocks become snippets linked to the maximal run of actions in the
sentences immediately before them (section heading as fallback), and block
comments yield comment actions with per-segment fragment snippets.  Relation
builders and comment de-duplication then run per page.
"""

from __future__ import annotations

import logging
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from tutorialkg.actions import (
    DEFAULT_PATTERNS,
    ActivityClassifier,
    PatternConfig,
    SentenceRecord,
    build_classifier,
    extract_action_phrase,
    split_sentences,
)
from tutorialkg.apis import ApiDictionary, recognize
from tutorialkg.ingest import DocNode, IngestConfig, TutorialDocument, extract_comments, load_corpus
from tutorialkg.model import (
    Action,
    ActionAttributes,
    ActionSource,
    ApiRef,
    CodeSnippet,
    GraphMeta,
    KnowledgeGraph,
    Relation,
    SnippetKind,
    action_id,
    content_id,
    snippet_id,
)
from tutorialkg.relations import (
    DuplicateDetector,
    PageItem,
    build_descriptive_siblings,
    build_hierarchy,
    build_precede_follow,
    default_duplicate_detector,
    dedupe_comment_actions,
)
from tutorialkg.textproc import DEFAULT_TAGGER, PosTagger

log = logging.getLogger(__name__)

_PROSE = ("paragraph", "list_item")


def _built_at() -> str | None:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return None
    try:
        stamp = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    except (ValueError, OverflowError, OSError):
        log.warning("ignoring unparsable SOURCE_DATE_EPOCH %r", epoch)
        return None
    return stamp.isoformat()


def _corpus_fingerprint(documents: Sequence[TutorialDocument]) -> str:
    parts: list[str] = []
    for doc in documents:
        parts.append(doc.page_uri)
        parts.append(doc.title)
        for node in doc.nodes:
            parts.append(node.kind)
            parts.append(node.text)
    return content_id(*parts)


def _list_groups(nodes: Sequence[DocNode]) -> dict[int, int]:
    """Group indexes for runs of consecutive ordered-list items."""
    groups: dict[int, int] = {}
    group = -1
    in_run = False
    for idx, node in enumerate(nodes):
        if node.kind == "list_item" and node.ordered:
            if not in_run:
                group += 1
                in_run = True
            groups[idx] = group
        else:
            in_run = False
    return groups


class _PageExtractor:
    """Single-page state: the heading stack, per-node action index, and the
    ordinal counters that keep content-derived ids unique."""

    def __init__(
        self,
        doc: TutorialDocument,
        dictionary: ApiDictionary,
        ingest_config: IngestConfig,
        pattern_config: PatternConfig,
        tagger: PosTagger,
        classifier: ActivityClassifier,
        detector: DuplicateDetector,
    ) -> None:
        self.doc = doc
        self.dictionary = dictionary
        self.ingest_config = ingest_config
        self.patterns = pattern_config
        self.tagger = tagger
        self.classifier = classifier
        self.detector = detector

        self.items: list[PageItem] = []
        self.snippets: list[CodeSnippet] = []
        self.relations: list[Relation] = []
        self.stack: list[PageItem] = []  # open heading items, innermost last
        self.node_actions: dict[int, dict[int, list[PageItem]]] = {}
        self.node_sentences: dict[int, int] = {}
        self._ordinals: dict[tuple[str, str, str, str, str], int] = {}
        self._groups = _list_groups(doc.nodes)

    # -- helpers -----------------------------------------------------------

    def _new_action(
        self, verb: str, obj: str, sentence: str, source: ActionSource, anchor: str | None
    ) -> Action:
        key = (anchor or "", sentence, source.value, verb, obj)
        ordinal = self._ordinals.get(key, 0)
        self._ordinals[key] = ordinal + 1
        return Action(
            id=action_id(self.doc.page_uri, anchor, sentence, source, verb, obj, ordinal),
            verb=verb,
            object=obj,
            sentence=sentence,
            source=source,
            page_uri=self.doc.page_uri,
            anchor=anchor,
        )

    @property
    def _section(self) -> PageItem | None:
        return self.stack[-1] if self.stack else None

    @property
    def _section_anchor(self) -> str | None:
        return self.stack[-1].action.anchor if self.stack else None

    def _add_item(self, item: PageItem) -> None:
        self.items.append(item)
        per_node = self.node_actions.setdefault(item.node_index, {})
        per_node.setdefault(item.sentence_position, []).append(item)

    def _span_apis(self, record: SentenceRecord) -> list[ApiRef]:
        """Resolve the inline API spans of one sentence to unique refs."""
        texts = [record.text[a:b] for a, b in record.spans if record.text[a:b].strip()]
        if not texts:
            return []
        mentions = recognize(" ".join(texts), self.dictionary)
        out: list[ApiRef] = []
        seen: set[tuple[str, str]] = set()
        for m in mentions:
            key = (m.ref.fqn, m.ref.kind.value)
            if key not in seen:
                seen.add(key)
                out.append(m.ref)
        return out

    # -- root --------------------------------------------------------------

    def _needs_synthetic_root(self) -> bool:
        first_content: DocNode | None = None
        levels: list[int] = []
        for node in self.doc.nodes:
            if node.kind == "heading":
                levels.append(node.level or 6)
            if first_content is None and node.text.strip():
                first_content = node
        if first_content is None:
            return False  # nothing on the page at all
        if not levels:
            return True
        top = min(levels)
        return not (
            first_content.kind == "heading"
            and first_content.level == top
            and levels.count(top) == 1
        )

    def _make_root(self) -> None:
        action = self._new_action("", "", self.doc.title, ActionSource.HEADING, None)
        item = PageItem(
            action=action,
            attrs=ActionAttributes(),
            clause=self.doc.title,
            node_index=-1,
            heading_level=0,
        )
        self._add_item(item)
        self.stack.append(item)

    # -- node handlers -----------------------------------------------------

    def _handle_heading(self, idx: int, node: DocNode) -> None:
        phrases = extract_action_phrase(
            node.text, source=ActionSource.HEADING, tagger=self.tagger, config=self.patterns
        )
        # a heading is one navigation point, so only its first phrase names it
        verb, obj = (phrases[0].verb, phrases[0].object) if phrases else ("", "")
        action = self._new_action(verb, obj, node.text, ActionSource.HEADING, node.anchor)
        item = PageItem(
            action=action,
            attrs=ActionAttributes(),
            clause=node.text,
            node_index=idx,
            heading_level=node.level or 6,
        )
        level = item.heading_level or 6
        while self.stack and (self.stack[-1].heading_level or 6) >= level:
            self.stack.pop()
        self._add_item(item)
        self.stack.append(item)

    def _handle_prose(self, idx: int, node: DocNode) -> None:
        records = split_sentences(
            node.text,
            source=ActionSource.TEXT,
            anchor=self._section_anchor,
            spans=node.inline_api_spans,
        )
        self.node_sentences[idx] = len(records)
        for record in records:
            if not self.classifier.classify(record):
                continue
            phrases = extract_action_phrase(
                record.text, source=ActionSource.TEXT, tagger=self.tagger, config=self.patterns
            )
            apis = self._span_apis(record)
            for k, phrase in enumerate(phrases):
                action = self._new_action(
                    phrase.verb, phrase.object, record.text, ActionSource.TEXT, record.anchor
                )
                attrs = ActionAttributes(
                    apis=list(apis),
                    location=phrase.location,
                    condition=phrase.condition,
                    goal=phrase.goal,
                )
                self._add_item(
                    PageItem(
                        action=action,
                        attrs=attrs,
                        clause=phrase.clause,
                        node_index=idx,
                        sentence_position=record.position,
                        pair_index=k,
                        list_group=self._groups.get(idx),
                    )
                )

    def _handle_code_block(self, idx: int, node: DocNode) -> None:
        if node.is_xml and self.ingest_config.exclude_xml:
            return
        mentions = recognize(node.text, self.dictionary)
        block = CodeSnippet(
            id=snippet_id(self.doc.page_uri, SnippetKind.FULL_BLOCK, node.text, (idx, 0)),
            text=node.text,
            kind=SnippetKind.FULL_BLOCK,
            page_uri=self.doc.page_uri,
            language_hint=node.language_hint,
            apis=[m.ref for m in mentions],
        )
        self.snippets.append(block)

        section = self._section
        for pos, segment in enumerate(extract_comments(node.text, self.ingest_config)):
            record = SentenceRecord(
                text=segment.text,
                source=ActionSource.COMMENT,
                anchor=self._section_anchor,
                position=pos,
            )
            if not self.classifier.classify(record):
                continue
            phrases = extract_action_phrase(
                segment.text, source=ActionSource.COMMENT, tagger=self.tagger, config=self.patterns
            )
            if not phrases:
                continue
            fragment = self._make_fragment(idx, node, block, segment, mentions)
            code_ref = fragment.id if fragment is not None else block.id
            for k, phrase in enumerate(phrases):
                action = self._new_action(
                    phrase.verb,
                    phrase.object,
                    record.text,
                    ActionSource.COMMENT,
                    self._section_anchor,
                )
                attrs = ActionAttributes(
                    location=phrase.location,
                    condition=phrase.condition,
                    goal=phrase.goal,
                    code=[code_ref],
                )
                self._add_item(
                    PageItem(
                        action=action,
                        attrs=attrs,
                        clause=phrase.clause,
                        node_index=idx,
                        sentence_position=pos,
                        pair_index=k,
                        preset_parent=section.action.id if section else None,
                    )
                )

        # link the whole block to the actions just before it
        run = self._preceding_run(idx)
        targets = run if run else ([section] if section else [])
        for target in targets:
            if block.id not in target.attrs.code:
                target.attrs.code.append(block.id)
        if not targets:
            log.warning(
                "%s: code block %d has no preceding action and no section heading",
                self.doc.page_uri,
                idx,
            )

    def _make_fragment(
        self,
        idx: int,
        node: DocNode,
        block: CodeSnippet,
        segment,
        mentions,
    ) -> CodeSnippet | None:
        lo, hi = segment.code_span
        if hi <= lo:
            return None
        text = node.text[lo:hi]
        if not text.strip():
            return None
        apis = [m.ref for m in mentions if lo <= m.span[0] and m.span[1] <= hi]
        fragment = CodeSnippet(
            id=snippet_id(self.doc.page_uri, SnippetKind.COMMENT_FRAGMENT, text, (idx, lo)),
            text=text,
            kind=SnippetKind.COMMENT_FRAGMENT,
            page_uri=self.doc.page_uri,
            parent_block=block.id,
            language_hint=node.language_hint,
            apis=apis,
        )
        self.snippets.append(fragment)
        return fragment

    def _preceding_run(self, idx: int) -> list[PageItem]:
        """The maximal run of actions in the sentences directly before a block.

        Walks back through prose nodes; the collection stops at the first
        sentence without actions, at a heading, or at another code block.
        """
        run: list[PageItem] = []
        j = idx - 1
        while j >= 0:
            node = self.doc.nodes[j]
            if node.kind not in _PROSE:
                break
            count = self.node_sentences.get(j, 0)
            if count == 0:
                break
            broken = False
            for pos in range(count - 1, -1, -1):
                acts = self.node_actions.get(j, {}).get(pos, [])
                if acts:
                    run[:0] = acts
                else:
                    broken = True
                    break
            if broken:
                break
            j -= 1
        return run

    # -- driver ------------------------------------------------------------

    def run(self) -> None:
        if self._needs_synthetic_root():
            self._make_root()
        for idx, node in enumerate(self.doc.nodes):
            if node.kind == "heading":
                self._handle_heading(idx, node)
            elif node.kind in _PROSE:
                self._handle_prose(idx, node)
            elif node.kind == "code_block":
                self._handle_code_block(idx, node)

        self.relations.extend(build_hierarchy(self.items))
        self.relations.extend(build_descriptive_siblings(self.items))
        self.relations.extend(build_precede_follow(self.items))
        result = dedupe_comment_actions(self.items, self.detector)
        self.relations.extend(result.relations)
        by_id = {item.action.id: item for item in self.items}
        for aid, sid in result.relinked:
            code = by_id[aid].attrs.code
            if sid not in code:
                code.append(sid)


def build_graph(
    documents: Sequence[TutorialDocument],
    dictionary: ApiDictionary | None = None,
    *,
    ingest_config: IngestConfig | None = None,
    pattern_config: PatternConfig | None = None,
    tagger: PosTagger | None = None,
    classifier: ActivityClassifier | None = None,
    detector: DuplicateDetector | None = None,
    corpus_id: str | None = None,
) -> KnowledgeGraph:
    """Build a knowledge graph from parsed pages.

    The result is deterministic for a given corpus and dictionary; meta
    timestamps come only from SOURCE_DATE_EPOCH so rebuilds compare equal.
    """
    dictionary = dictionary or ApiDictionary()
    ingest_config = ingest_config or IngestConfig()
    pattern_config = pattern_config or DEFAULT_PATTERNS
    tagger = tagger or DEFAULT_TAGGER
    classifier = classifier or build_classifier(pattern_config)
    detector = detector or default_duplicate_detector()

    actions: dict[str, Action] = {}
    attributes: dict[str, ActionAttributes] = {}
    relations: list[Relation] = []
    snippets: dict[str, CodeSnippet] = {}
    for doc in documents:
        page = _PageExtractor(
            doc, dictionary, ingest_config, pattern_config, tagger, classifier, detector
        )
        page.run()
        for item in page.items:
            if item.action.id in actions:
                log.warning("%s: dropping colliding action id %s", doc.page_uri, item.action.id)
                continue
            actions[item.action.id] = item.action
            attributes[item.action.id] = item.attrs
        for snippet in page.snippets:
            if snippet.id in snippets:
                log.warning("%s: dropping colliding snippet id %s", doc.page_uri, snippet.id)
                continue
            snippets[snippet.id] = snippet
        relations.extend(page.relations)

    graph = KnowledgeGraph(
        meta=GraphMeta(
            corpus_id=corpus_id if corpus_id is not None else _corpus_fingerprint(documents),
            built_at=_built_at(),
        ),
        actions=actions,
        attributes=attributes,
        relations=relations,
        snippets=snippets,
    )
    graph.meta.counts = graph.recount()
    return graph


def build_graph_from_dir(
    corpus_dir: str | Path,
    dictionary: ApiDictionary | None = None,
    *,
    ingest_config: IngestConfig | None = None,
    pattern_config: PatternConfig | None = None,
    detector: DuplicateDetector | None = None,
) -> KnowledgeGraph:
    ingest_config = ingest_config or IngestConfig()
    documents = load_corpus(corpus_dir, ingest_config)
    return build_graph(
        documents,
        dictionary,
        ingest_config=ingest_config,
        pattern_config=pattern_config,
        detector=detector,
    )
