from pathlib import Path

import pytest

from tutorialkg.apis import load_dictionary
from tutorialkg.ingest import load_corpus
from tutorialkg.match import build_index
from tutorialkg.model import load_graph
from tutorialkg.pipeline import build_graph

FIXTURES = Path(__file__).parent / "fixtures"

Q9_CODE = """public void createDialog() {
    Dialog dialog = new Dialog(getActivity());
    LayoutInflater inflater = getActivity().getLayoutInflater();
    dialog.setContentView(inflater.inflate(R.layout.my_dialog, null));
}
"""


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def api_dict():
    return load_dictionary(FIXTURES / "api_dict.jsonl")


@pytest.fixture(scope="session")
def corpus_docs():
    return load_corpus(FIXTURES / "corpus")


@pytest.fixture(scope="session")
def built_graph(corpus_docs, api_dict):
    return build_graph(corpus_docs, api_dict)


@pytest.fixture(scope="session")
def golden_graph():
    return load_graph(FIXTURES / "golden_kg.json")


@pytest.fixture(scope="session")
def golden_index(golden_graph):
    return build_index(golden_graph)


@pytest.fixture(scope="session")
def q9_code():
    return Q9_CODE


def action_by(graph, verb, obj=None, source=None):
    """The unique action matching the given verb/object/source."""
    hits = [
        a
        for a in graph.actions.values()
        if a.verb == verb
        and (obj is None or a.object == obj)
        and (source is None or a.source.value == source)
    ]
    assert len(hits) == 1, f"{verb}/{obj}/{source}: {[(a.verb, a.object) for a in hits]}"
    return hits[0]


def snippet_by(graph, page, kind, contains=None):
    hits = [
        s
        for s in graph.snippets.values()
        if s.page_uri == page
        and s.kind.value == kind
        and (contains is None or contains in s.text)
    ]
    assert len(hits) == 1, f"{page}/{kind}/{contains}: {[s.id for s in hits]}"
    return hits[0]
