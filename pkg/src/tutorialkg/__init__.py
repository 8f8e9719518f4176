"""Task knowledge graphs mined from programming tutorials.

The package turns a directory of tutorial HTML pages into a knowledge graph
of programming actions (verb + object), the relations between them, and the
code snippets that implement them.  On top of the graph it recommends code
examples for code under development by API overlap, and serves the result
over HTTP for a companion UI.
"""

from tutorialkg.model import (
    Action,
    ActionAttributes,
    ActionSource,
    ApiKind,
    ApiRef,
    CodeSnippet,
    KnowledgeGraph,
    Relation,
    RelationKind,
    SnippetKind,
    load_graph,
    save_graph,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionAttributes",
    "ActionSource",
    "ApiKind",
    "ApiRef",
    "CodeSnippet",
    "KnowledgeGraph",
    "Relation",
    "RelationKind",
    "SnippetKind",
    "load_graph",
    "save_graph",
    "validate",
    "__version__",
]
