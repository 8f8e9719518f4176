"""HTTP service and the view assembly behind it.

The service is stateless: one graph is loaded at startup, its API dictionary
is derived from the refs the graph already stores, and every request is
answered from those.  View assembly (the action-hierarchy forest and the
annotated tutorial excerpt) lives in plain functions so it can be tested
without HTTP.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from fastapi import Body, FastAPI
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from tutorialkg import __version__
from tutorialkg.apis import ApiDictionary, dictionary_from_graph, recognize
from tutorialkg.ingest import DocNode, TutorialDocument
from tutorialkg.match import (
    DEFAULT_TOP_N,
    ConfigFormatError,
    MatchConfig,
    build_index,
    parse_config,
    query_keys,
    search,
)
from tutorialkg.model import Action, ApiRef, KnowledgeGraph, SnippetKind
from tutorialkg.textproc import stem, tokenize, verb_lemma

log = logging.getLogger(__name__)

_PROSE_KINDS = ("heading", "paragraph", "list_item")
_MAX_TOP_N = 20
_OBJECT_WINDOW = 120  # chars between an action verb and its object


# -- hierarchy view --------------------------------------------------------


def assemble_hierarchy(
    graph: KnowledgeGraph, ranks: Mapping[str, int | None]
) -> list[dict[str, Any]]:
    """Forest of action trees around the given actions.

    Exactly the root-to-target paths are expanded; every child of an
    expanded node is present (collapsed children keep their subtree
    omitted), and target nodes carry their rank.
    """
    expand: set[str] = set()
    root_set: set[str] = set()
    for aid in ranks:
        if aid not in graph.actions:
            continue
        cur = aid
        seen = {aid}
        while True:
            parent = graph.parent_of(cur)
            if parent is None or parent in seen:
                root_set.add(cur)
                break
            expand.add(parent)
            seen.add(parent)
            cur = parent

    def render(aid: str) -> dict[str, Any]:
        action = graph.actions[aid]
        children = graph.children_of(aid)
        node: dict[str, Any] = {
            "action_id": aid,
            "label": action.label,
            "source": action.source.value,
            "rank": ranks.get(aid),
            "expanded": aid in expand,
            "has_children": bool(children),
            "children": [],
        }
        if aid in expand:
            node["children"] = [render(c) for c in children]
        return node

    return [render(aid) for aid in graph.actions if aid in root_set]


# -- annotated excerpt -----------------------------------------------------


def _section_bounds(nodes: Sequence[DocNode], block_idx: int) -> tuple[int, int]:
    start = 0
    level: int | None = None
    for j in range(block_idx, -1, -1):
        if nodes[j].kind == "heading":
            start = j
            level = nodes[j].level or 6
            break
    end = len(nodes)
    if level is not None:
        for j in range(block_idx + 1, len(nodes)):
            if nodes[j].kind == "heading" and (nodes[j].level or 6) <= level:
                end = j
                break
    return start, end


def _find_phrase(text: str, lo: int, hi: int, verb: str, obj: str) -> tuple[int, int] | None:
    """Verb-to-object span inside text[lo:hi], tolerant of inflection."""
    if not verb:
        return None
    verb_stem = stem(verb)
    bare: tuple[int, int] | None = None
    for tok in tokenize(text[lo:hi]):
        w = tok.text.lower()
        if not (w == verb or verb_lemma(w) == verb or stem(w) == verb_stem):
            continue
        vstart, vend = lo + tok.start, lo + tok.end
        if bare is None:
            bare = (vstart, vend)
        if obj:
            m = re.search(re.escape(obj), text[vend:hi], re.IGNORECASE)
            if m is not None and m.start() <= _OBJECT_WINDOW:
                return (vstart, vend + m.end())
        else:
            return (vstart, vend)
    return bare


def _first_occurrence(
    text: str, needle: str, prefer_from: int = 0
) -> tuple[int, int] | None:
    if not needle:
        return None
    pattern = re.compile(re.escape(needle), re.IGNORECASE)
    m = pattern.search(text, prefer_from) or pattern.search(text)
    return (m.start(), m.end()) if m else None


def _prune_overlaps(spans: list[dict[str, Any]]) -> list[dict[str, Any]]:
    """Same-kind spans never overlap; earlier (then longer) spans win."""
    kept: list[dict[str, Any]] = []
    last_end: dict[str, int] = {}
    for span in sorted(spans, key=lambda s: (s["start"], -s["end"], s["kind"])):
        if span["start"] < last_end.get(span["kind"], 0):
            continue
        kept.append(span)
        last_end[span["kind"]] = span["end"]
    return sorted(kept, key=lambda s: (s["start"], s["end"], s["kind"]))


def _degraded_excerpt(
    graph: KnowledgeGraph,
    dictionary: ApiDictionary,
    snippet_id: str,
    matched_keys: set[str],
    config: MatchConfig,
) -> dict[str, Any]:
    snippet = graph.snippets[snippet_id]
    spans: list[dict[str, Any]] = [
        {"start": 0, "end": len(snippet.text), "kind": "recommended_snippet"}
    ]
    for mention in recognize(snippet.text, dictionary):
        key = mention.ref.fqn if config.granularity == "api" else (
            mention.ref.declaring_class or mention.ref.fqn
        )
        if key in matched_keys:
            spans.append(
                {"start": mention.span[0], "end": mention.span[1], "kind": "api_matched"}
            )
    return {
        "page_uri": snippet.page_uri,
        "degraded": True,
        "text": snippet.text,
        "spans": _prune_overlaps(spans),
    }


def annotate_excerpt(
    graph: KnowledgeGraph,
    documents: Mapping[str, TutorialDocument],
    dictionary: ApiDictionary,
    snippet_id: str,
    matched_keys: Iterable[str],
    config: MatchConfig,
    action_ids: Sequence[str],
) -> dict[str, Any]:
    """The tutorial section around one recommended snippet, with highlight
    spans: the snippet region, matched API mentions inside it, prose
    occurrences of the snippet's API names, and the linked actions' verb
    phrases and attribute clauses.

    Falls back to a degraded, snippet-only excerpt when the source page is
    not available.
    """
    matched = set(matched_keys)
    snippet = graph.snippets[snippet_id]
    block = snippet
    if snippet.kind is SnippetKind.COMMENT_FRAGMENT and snippet.parent_block:
        block = graph.snippets.get(snippet.parent_block, snippet)

    doc = documents.get(snippet.page_uri)
    block_idx = None
    if doc is not None:
        for idx, node in enumerate(doc.nodes):
            if node.kind == "code_block" and node.text == block.text:
                block_idx = idx
                break
    if doc is None or block_idx is None:
        return _degraded_excerpt(graph, dictionary, snippet_id, matched, config)

    start, end = _section_bounds(doc.nodes, block_idx)
    offsets: dict[int, tuple[int, int]] = {}
    parts: list[str] = []
    pos = 0
    for j in range(start, end):
        if parts:
            pos += 2  # "\n\n" separator
        offsets[j] = (pos, pos + len(doc.nodes[j].text))
        parts.append(doc.nodes[j].text)
        pos += len(doc.nodes[j].text)
    text = "\n\n".join(parts)

    spans: list[dict[str, Any]] = []
    block_lo, block_hi = offsets[block_idx]

    # the recommended region: the whole block, or the fragment inside it
    snip_lo, snip_hi = block_lo, block_hi
    if snippet is not block:
        rel = block.text.find(snippet.text)
        if rel >= 0:
            snip_lo = block_lo + rel
            snip_hi = snip_lo + len(snippet.text)
    spans.append({"start": snip_lo, "end": snip_hi, "kind": "recommended_snippet"})

    # matched API mentions inside the recommended region
    for mention in recognize(snippet.text, dictionary):
        key = mention.ref.fqn if config.granularity == "api" else (
            mention.ref.declaring_class or mention.ref.fqn
        )
        if key in matched:
            spans.append(
                {
                    "start": snip_lo + mention.span[0],
                    "end": snip_lo + mention.span[1],
                    "kind": "api_matched",
                }
            )

    # API names of the snippet, bolded where prose mentions them
    names: set[str] = set()
    for ref in snippet.apis:
        names.add(ref.simple_name)
        if ref.declaring_class:
            names.add(ref.declaring_class.rsplit(".", 1)[-1])
    for j in range(start, end):
        if doc.nodes[j].kind not in _PROSE_KINDS:
            continue
        lo, hi = offsets[j]
        for name in names:
            for m in re.finditer(rf"\b{re.escape(name)}\b", text[lo:hi]):
                spans.append({"start": lo + m.start(), "end": lo + m.end(), "kind": "api_bold"})

    # linked actions: verb phrase plus attribute clauses
    for aid in action_ids:
        action = graph.actions.get(aid)
        if action is None:
            continue
        attrs = graph.attrs_for(aid)
        lo, hi = 0, len(text)
        if action.source.value == "comment":
            lo, hi = block_lo, block_hi
        else:
            for j in range(start, end):
                if doc.nodes[j].kind in _PROSE_KINDS and action.sentence in doc.nodes[j].text:
                    lo, hi = offsets[j]
                    break
        phrase = _find_phrase(text, lo, hi, action.verb, action.object)
        if phrase is not None:
            spans.append({"start": phrase[0], "end": phrase[1], "kind": "action_phrase"})
        for value, kind in (
            (attrs.goal, "goal"),
            (attrs.location, "location"),
            (attrs.condition, "condition"),
        ):
            if not value:
                continue
            hit = _first_occurrence(text, value, prefer_from=lo)
            if hit is not None:
                spans.append({"start": hit[0], "end": hit[1], "kind": kind})

    return {
        "page_uri": snippet.page_uri,
        "degraded": False,
        "text": text,
        "spans": _prune_overlaps(spans),
    }


# -- HTTP app --------------------------------------------------------------

_FALLBACK_PAGE = """<!doctype html>
<title>tutorialkg</title>
<h1>tutorialkg service</h1>
<p>No UI bundle is installed. The API is live:</p>
<ul>
<li>POST /api/recommend</li>
<li>GET /api/action/{id}</li>
<li>GET /api/hierarchy/{id}</li>
<li>GET /api/stats</li>
</ul>
"""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": {"code": code, "message": message}}, status_code=status)


def _action_dict(action: Action) -> dict[str, Any]:
    return {
        "id": action.id,
        "verb": action.verb,
        "object": action.object,
        "label": action.label,
        "sentence": action.sentence,
        "source": action.source.value,
        "page_uri": action.page_uri,
        "anchor": action.anchor,
    }


def create_app(
    graph: KnowledgeGraph,
    documents: Sequence[TutorialDocument] | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="tutorialkg", version=__version__)
    dictionary = dictionary_from_graph(graph)
    index = build_index(graph)
    docs_by_uri: dict[str, TutorialDocument] = {
        d.page_uri: d for d in (documents or [])
    }
    by_fqn: dict[str, ApiRef] = {r.fqn: r for r in dictionary.entries}

    def resolve_selection(names: list[str]) -> list[ApiRef] | JSONResponse:
        refs: list[ApiRef] = []
        for name in names:
            if not isinstance(name, str) or not name.strip():
                return _error(400, "bad_selection", "selection entries must be API names")
            name = name.strip()
            if name in by_fqn:
                refs.append(by_fqn[name])
                continue
            candidates = dictionary.by_simple_name.get(name.rsplit(".", 1)[-1], [])
            if len(candidates) == 1:
                refs.append(candidates[0])
            elif not candidates:
                return _error(400, "unknown_api", f"no API named {name!r} in this graph")
            else:
                opts = ", ".join(c.fqn for c in candidates[:5])
                return _error(400, "ambiguous_api", f"{name!r} is ambiguous: {opts}")
        return refs

    @app.post("/api/recommend")
    def recommend(payload: dict = Body(...)):
        code = payload.get("code")
        selection = payload.get("selection")
        if (code is None) == (selection is None):
            return _error(400, "bad_request", "provide exactly one of 'code' or 'selection'")
        try:
            config = parse_config(payload.get("config", "A-B-U"))
        except ConfigFormatError as exc:
            return _error(400, "bad_config", str(exc))
        top_n = payload.get("top_n", DEFAULT_TOP_N)
        if not isinstance(top_n, int) or isinstance(top_n, bool) or not 1 <= top_n <= _MAX_TOP_N:
            return _error(400, "bad_top_n", f"top_n must be an integer in 1..{_MAX_TOP_N}")

        if code is not None:
            if not isinstance(code, str) or not code.strip():
                return _error(400, "empty_code", "'code' must be a non-empty string")
            refs = [m.ref for m in recognize(code, dictionary)]
        else:
            if not isinstance(selection, list) or not selection:
                return _error(400, "bad_selection", "'selection' must be a non-empty list")
            resolved = resolve_selection(selection)
            if isinstance(resolved, JSONResponse):
                return resolved
            refs = resolved

        results = search(index, refs, config, top_n)
        ranks: dict[str, int | None] = {}
        for i, cand in enumerate(results, 1):
            for aid in cand.action_ids:
                ranks.setdefault(aid, i)

        recommendations = []
        for i, cand in enumerate(results, 1):
            snippet = graph.snippets[cand.snippet_id]
            recommendations.append(
                {
                    "rank": i,
                    "snippet_id": cand.snippet_id,
                    "score": cand.score,
                    "matched": cand.matched,
                    "unmatched": cand.unmatched,
                    "matched_keys": list(cand.matched_keys),
                    "snippet": snippet.to_dict(),
                    "actions": [
                        _action_dict(graph.actions[aid])
                        for aid in cand.action_ids
                        if aid in graph.actions
                    ],
                    "excerpt": annotate_excerpt(
                        graph,
                        docs_by_uri,
                        dictionary,
                        cand.snippet_id,
                        cand.matched_keys,
                        config,
                        cand.action_ids,
                    ),
                }
            )
        return {
            "config": config.code,
            "top_n": top_n,
            "query_keys": sorted(query_keys(refs, config)),
            "recommendations": recommendations,
            "hierarchy": assemble_hierarchy(graph, ranks),
        }

    @app.get("/api/action/{action_id}")
    def action_detail(action_id: str):
        action = graph.actions.get(action_id)
        if action is None:
            return _error(404, "unknown_action", f"no action {action_id!r}")
        attrs = graph.attrs_for(action_id)
        return {
            "action": _action_dict(action),
            "attributes": attrs.to_dict(),
            "relations": [
                r.to_dict() for r in graph.relations if action_id in (r.src, r.dst)
            ],
            "snippets": [
                graph.snippets[sid].to_dict() for sid in attrs.code if sid in graph.snippets
            ],
        }

    @app.get("/api/hierarchy/{action_id}")
    def hierarchy(action_id: str):
        if action_id not in graph.actions:
            return _error(404, "unknown_action", f"no action {action_id!r}")
        return {"hierarchy": assemble_hierarchy(graph, {action_id: None})}

    @app.get("/api/stats")
    def stats():
        pages = {a.page_uri for a in graph.actions.values()}
        pages.update(s.page_uri for s in graph.snippets.values())
        return {
            "corpus_id": graph.meta.corpus_id,
            "built_at": graph.meta.built_at,
            "pages": len(pages),
            "counts": graph.meta.counts,
        }

    static_path = Path(static_dir) if static_dir else None
    if static_path is not None and (static_path / "index.html").is_file():
        app.mount("/", StaticFiles(directory=static_path, html=True), name="ui")
    else:
        if static_path is not None:
            log.warning("static dir %s has no index.html; serving fallback page", static_path)

        @app.get("/", response_class=HTMLResponse)
        def home() -> str:
            return _FALLBACK_PAGE

    return app
