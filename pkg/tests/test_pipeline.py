"""End-to-end graph construction against the golden corpus fixture."""

from datetime import datetime, timezone

from tutorialkg.ingest import IngestConfig, parse_page
from tutorialkg.model import (
    ActionSource,
    RelationKind,
    SnippetKind,
    dumps_graph,
    loads_graph,
    validate,
)
from tutorialkg.pipeline import build_graph, build_graph_from_dir

from conftest import FIXTURES, action_by, snippet_by


def test_golden_graph_is_byte_exact(monkeypatch, corpus_docs, api_dict):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    built = build_graph(corpus_docs, api_dict)
    golden = (FIXTURES / "golden_kg.json").read_text(encoding="utf-8")
    assert dumps_graph(built) == golden


def test_built_graph_validates_clean(built_graph):
    assert validate(built_graph).violations == []


def test_built_graph_counts(built_graph):
    counts = built_graph.meta.counts
    assert counts["actions_by_source"] == {"heading": 7, "text": 7, "comment": 6}
    assert counts["relations_by_kind"] == {
        "hierarchical": 17,
        "descriptive_sibling": 4,
        "precede_follow": 2,
        "duplicate": 2,
    }
    assert counts["snippets_by_kind"] == {"full_block": 4, "comment_fragment": 4}
    assert len(built_graph.actions) == 20


def test_duplicate_edges_point_comment_to_text(built_graph):
    pairs = set()
    for rel in built_graph.relations:
        if rel.kind is not RelationKind.DUPLICATE:
            continue
        src = built_graph.actions[rel.src]
        dst = built_graph.actions[rel.dst]
        assert src.source is ActionSource.COMMENT
        assert dst.source is ActionSource.TEXT
        pairs.add((src.verb, dst.verb))
    assert pairs == {("replace", "replace"), ("add", "preserve")}


def test_duplicate_relinks_fragment_onto_text_actions(built_graph):
    fragment = snippet_by(
        built_graph, "fragments.html", "comment_fragment", contains="addToBackStack"
    )
    replace_text = action_by(built_graph, "replace", "fragment", source="text")
    preserve_text = action_by(built_graph, "preserve", "previous state", source="text")
    assert fragment.id in built_graph.attrs_for(replace_text.id).code
    assert fragment.id in built_graph.attrs_for(preserve_text.id).code
    # the comment actions keep their own fragment link too
    replace_comment = action_by(built_graph, "replace", "", source="comment")
    assert fragment.id in built_graph.attrs_for(replace_comment.id).code


def test_full_block_links_maximal_preceding_run(built_graph):
    block = snippet_by(built_graph, "fragments.html", "full_block")
    replace_text = action_by(built_graph, "replace", "fragment", source="text")
    preserve_text = action_by(built_graph, "preserve", "previous state", source="text")
    assert block.id in built_graph.attrs_for(replace_text.id).code
    assert block.id in built_graph.attrs_for(preserve_text.id).code


def test_list_run_collects_across_items(built_graph):
    block = snippet_by(built_graph, "layouts.html", "full_block")
    for verb, obj in (("create", "layout file"), ("inflate", "layout"), ("set", "inflated view")):
        action = action_by(built_graph, verb, obj, source="text")
        assert block.id in built_graph.attrs_for(action.id).code


def test_block_without_preceding_actions_links_heading(built_graph):
    block = snippet_by(built_graph, "dialogs.html", "full_block", contains="onCreateDialog")
    heading = next(
        a
        for a in built_graph.actions.values()
        if a.source is ActionSource.HEADING and a.sentence.startswith("Showing a Dialog")
    )
    assert block.id in built_graph.attrs_for(heading.id).code


def test_comment_actions_hang_under_section_heading(built_graph):
    heading = next(
        a
        for a in built_graph.actions.values()
        if a.source is ActionSource.HEADING and "Transactions" in a.sentence
    )
    for verb in ("create", "commit"):
        comment = action_by(built_graph, verb, source="comment")
        assert built_graph.parent_of(comment.id) == heading.id


def test_precede_follow_chains_the_ordered_list(built_graph):
    edges = [
        (built_graph.actions[r.src].verb, built_graph.actions[r.dst].verb)
        for r in built_graph.relations
        if r.kind is RelationKind.PRECEDE_FOLLOW
    ]
    assert edges == [("create", "inflate"), ("inflate", "set")]


def test_snippet_apis_keep_bag_multiplicity(built_graph):
    block = snippet_by(built_graph, "layouts.html", "full_block")
    names = [r.simple_name for r in block.apis]
    assert names.count("Dialog") == 2
    assert len(names) == 6


def test_xml_blocks_follow_the_exclusion_switch(api_dict):
    html = (
        "<h1>Menus</h1><p>Add the menu.</p>"
        "<devsite-code><pre>&lt;menu&gt;&lt;/menu&gt;</pre></devsite-code>"
    )
    doc = parse_page(html, "menus.html")
    excluded = build_graph([doc], api_dict)
    assert excluded.snippets == {}
    included = build_graph([doc], api_dict, ingest_config=IngestConfig(exclude_xml=False))
    assert len(included.snippets) == 1


def test_empty_corpus_builds_a_valid_graph():
    graph = build_graph([], None)
    assert graph.actions == {}
    assert validate(graph).violations == []
    assert loads_graph(dumps_graph(graph)).meta.corpus_id == graph.meta.corpus_id


def test_built_at_honors_source_date_epoch(monkeypatch, corpus_docs, api_dict):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    graph = build_graph(corpus_docs, api_dict)
    expected = datetime.fromtimestamp(1700000000, tz=timezone.utc).isoformat()
    assert graph.meta.built_at == expected
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "not-a-number")
    assert build_graph(corpus_docs, api_dict).meta.built_at is None


def test_corpus_fingerprint_tracks_content(corpus_docs, api_dict):
    baseline = build_graph(corpus_docs, api_dict).meta.corpus_id
    assert build_graph(corpus_docs, api_dict).meta.corpus_id == baseline
    edited = [parse_page("<h1>Other</h1><p>Commit the change.</p>", "x.html")]
    assert build_graph(edited, api_dict).meta.corpus_id != baseline
    override = build_graph(corpus_docs, api_dict, corpus_id="pinned")
    assert override.meta.corpus_id == "pinned"


def test_build_graph_from_dir_matches_in_memory_build(api_dict, built_graph):
    graph = build_graph_from_dir(FIXTURES / "corpus", api_dict)
    assert dumps_graph(graph) == dumps_graph(built_graph)


def test_rebuild_is_identical(corpus_docs, api_dict):
    first = dumps_graph(build_graph(corpus_docs, api_dict))
    second = dumps_graph(build_graph(corpus_docs, api_dict))
    assert first == second
