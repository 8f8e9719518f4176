"""Snippet scoring and retrieval.

A query is the set of API keys seen in the code under development; a
candidate is any snippet sharing at least one key.  Candidates score

    (2 * matched + unmatched) / |snippet elements|

where matched counts snippet elements whose key the query contains, and the
unmatched term is dropped entirely when the setting excludes it.  Snippet
elements are API occurrences (bag) or distinct APIs (set), keyed by member
fqn or by declaring class.  The three choices combine into eight settings
written "A-B-U" style.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from tutorialkg.model import ApiRef, KnowledgeGraph

MATCHED_WEIGHT = 2
UNMATCHED_WEIGHT = 1
DEFAULT_TOP_N = 3

_GRANULARITY = {"A": "api", "C": "class"}
_MULTIPLICITY = {"B": "bag", "S": "set"}
_UNMATCHED = {"U": "include", "M": "exclude"}


class ConfigFormatError(ValueError):
    """A setting code did not parse."""


@dataclass(frozen=True, slots=True)
class MatchConfig:
    granularity: str = "api"  # api | class
    multiplicity: str = "bag"  # bag | set
    unmatched: str = "include"  # include | exclude

    def __post_init__(self) -> None:
        if self.granularity not in ("api", "class"):
            raise ConfigFormatError(f"unknown granularity {self.granularity!r}")
        if self.multiplicity not in ("bag", "set"):
            raise ConfigFormatError(f"unknown multiplicity {self.multiplicity!r}")
        if self.unmatched not in ("include", "exclude"):
            raise ConfigFormatError(f"unknown unmatched mode {self.unmatched!r}")

    @property
    def code(self) -> str:
        g = "A" if self.granularity == "api" else "C"
        m = "B" if self.multiplicity == "bag" else "S"
        u = "U" if self.unmatched == "include" else "M"
        return f"{g}-{m}-{u}"

    @property
    def unmatched_weight(self) -> int:
        return UNMATCHED_WEIGHT if self.unmatched == "include" else 0


def parse_config(code: str) -> MatchConfig:
    """Parse an "A-B-U" style setting code, naming the offending token."""
    parts = code.strip().upper().split("-")
    if len(parts) != 3:
        raise ConfigFormatError(f"setting {code!r} must have three dash-separated parts")
    g, m, u = parts
    if g not in _GRANULARITY:
        raise ConfigFormatError(f"unknown granularity token {g!r} in {code!r} (want A or C)")
    if m not in _MULTIPLICITY:
        raise ConfigFormatError(f"unknown multiplicity token {m!r} in {code!r} (want B or S)")
    if u not in _UNMATCHED:
        raise ConfigFormatError(f"unknown unmatched token {u!r} in {code!r} (want U or M)")
    return MatchConfig(_GRANULARITY[g], _MULTIPLICITY[m], _UNMATCHED[u])


ALL_SETTINGS = tuple(
    f"{g}-{m}-{u}" for g in ("A", "C") for m in ("B", "S") for u in ("U", "M")
)

DEFAULT_CONFIG = MatchConfig()


def _class_key(ref: ApiRef) -> str:
    return ref.declaring_class or ref.fqn


def query_keys(refs: Iterable[ApiRef], config: MatchConfig) -> frozenset[str]:
    """The query-side key set at the configured granularity."""
    if config.granularity == "api":
        return frozenset(r.fqn for r in refs)
    return frozenset(_class_key(r) for r in refs)


@dataclass(frozen=True, slots=True)
class SnippetEntry:
    snippet_id: str
    api_bag: tuple[str, ...]  # one fqn per recognized mention
    class_bag: tuple[str, ...]  # declaring class per mention, aligned


@dataclass(slots=True)
class SnippetIndex:
    """Inverted index over snippet APIs, covering both key granularities."""

    entries: dict[str, SnippetEntry] = field(default_factory=dict)
    api_postings: dict[str, list[str]] = field(default_factory=dict)
    class_postings: dict[str, list[str]] = field(default_factory=dict)
    action_ids: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def postings(self, config: MatchConfig) -> dict[str, list[str]]:
        return self.api_postings if config.granularity == "api" else self.class_postings

    def elements(self, snippet_id: str, config: MatchConfig) -> tuple[str, ...]:
        entry = self.entries[snippet_id]
        bag = entry.api_bag if config.granularity == "api" else entry.class_bag
        if config.multiplicity == "bag":
            return bag
        return tuple(dict.fromkeys(bag))


def build_index(graph: KnowledgeGraph) -> SnippetIndex:
    index = SnippetIndex()
    for sid, snippet in graph.snippets.items():
        api_bag = tuple(r.fqn for r in snippet.apis)
        class_bag = tuple(_class_key(r) for r in snippet.apis)
        index.entries[sid] = SnippetEntry(sid, api_bag, class_bag)
        for key in set(api_bag):
            index.api_postings.setdefault(key, []).append(sid)
        for key in set(class_bag):
            index.class_postings.setdefault(key, []).append(sid)
        index.action_ids[sid] = tuple(graph.actions_for_snippet(sid))
    for postings in (index.api_postings, index.class_postings):
        for key in postings:
            postings[key].sort()
    return index


@dataclass(frozen=True, slots=True)
class ScoredCandidate:
    snippet_id: str
    score: float
    exact: Fraction
    matched: int
    unmatched: int
    matched_keys: tuple[str, ...]
    action_ids: tuple[str, ...]


def score_elements(
    elements: Sequence[str], keys: frozenset[str], config: MatchConfig
) -> Fraction | None:
    """Exact score of one candidate, or None when it has no elements."""
    n = len(elements)
    if n == 0:
        return None
    matched = sum(1 for e in elements if e in keys)
    return Fraction(MATCHED_WEIGHT * matched + config.unmatched_weight * (n - matched), n)


def search(
    index: SnippetIndex,
    refs: Iterable[ApiRef],
    config: MatchConfig = DEFAULT_CONFIG,
    top_n: int = DEFAULT_TOP_N,
) -> list[ScoredCandidate]:
    """Rank snippets sharing at least one key with the query.

    Orders by score, then by number of distinct matched keys, then by
    snippet id, so results are stable across runs.
    """
    keys = query_keys(refs, config)
    postings = index.postings(config)
    candidate_ids: set[str] = set()
    for key in keys:
        candidate_ids.update(postings.get(key, ()))

    scored: list[ScoredCandidate] = []
    for sid in candidate_ids:
        elements = index.elements(sid, config)
        exact = score_elements(elements, keys, config)
        if exact is None:
            continue
        matched = sum(1 for e in elements if e in keys)
        matched_keys = tuple(sorted(set(e for e in elements if e in keys)))
        scored.append(
            ScoredCandidate(
                snippet_id=sid,
                score=float(exact),
                exact=exact,
                matched=matched,
                unmatched=len(elements) - matched,
                matched_keys=matched_keys,
                action_ids=index.action_ids.get(sid, ()),
            )
        )
    scored.sort(key=lambda c: (-c.exact, -len(c.matched_keys), c.snippet_id))
    return scored[: max(top_n, 0)]


# -- evaluation ------------------------------------------------------------


class EvalInputError(ValueError):
    """An evaluation query is unusable (for example, it has no truth set)."""


@dataclass(frozen=True, slots=True)
class EvalQuery:
    query_id: str
    refs: tuple[ApiRef, ...]
    truth: frozenset[str]


@dataclass(frozen=True, slots=True)
class Metrics:
    accuracy: Fraction
    precision: Fraction
    recall: Fraction

    @property
    def f1(self) -> Fraction:
        denom = self.precision + self.recall
        if denom == 0:
            return Fraction(0)
        return 2 * self.precision * self.recall / denom

    def as_floats(self) -> dict[str, float]:
        return {
            "accuracy": float(self.accuracy),
            "precision": float(self.precision),
            "recall": float(self.recall),
            "f1": float(self.f1),
        }


def evaluate(
    index: SnippetIndex,
    queries: Sequence[EvalQuery],
    config: MatchConfig = DEFAULT_CONFIG,
    top_n: int = DEFAULT_TOP_N,
) -> Metrics:
    """Top-N retrieval metrics over a query set, in exact arithmetic.

    A query hits when any truth snippet ranks in the top N.  Precision uses
    the fixed N as denominator; recall divides by the query's truth count.
    """
    if not queries:
        raise EvalInputError("empty query set")
    hits = Fraction(0)
    precision = Fraction(0)
    recall = Fraction(0)
    for query in queries:
        if not query.truth:
            raise EvalInputError(f"query {query.query_id!r} has an empty truth set")
        results = search(index, query.refs, config, top_n)
        found = sum(1 for c in results if c.snippet_id in query.truth)
        hits += 1 if found else 0
        precision += Fraction(found, top_n)
        recall += Fraction(found, len(query.truth))
    n = len(queries)
    return Metrics(accuracy=hits / n, precision=precision / n, recall=recall / n)
