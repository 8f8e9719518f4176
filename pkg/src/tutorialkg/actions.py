"""Action extraction from sentences: classification, phrases, attributes.

A sentence either instructs (activity) or informs; only activities become
actions.  The default classifier is rule-based and pluggable by name so a
trained model can replace it without touching the pipeline.  Extraction is
clause-aware: coordinated clauses yield one (verb, object) pair each, and
every pair remembers the clause it came from for later de-duplication.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

from tutorialkg.model import ActionSource
from tutorialkg.textproc import (
    ADJ,
    ADP,
    DET,
    DISCOURSE,
    NOUN,
    PRON,
    VERB,
    VERB_LEXICON,
    DEFAULT_TAGGER,
    PosTagger,
    Token,
    split_sentence_spans,
    tokenize,
    verb_lemma,
)

_CLAUSE_CONJ = frozenset(("and", "but", "or", "then"))


@dataclass(frozen=True, slots=True)
class SentenceRecord:
    """One classification/extraction unit with its block position."""

    text: str
    source: ActionSource
    anchor: str | None = None
    position: int = 0
    spans: tuple[tuple[int, int], ...] = ()  # inline API spans, sentence-relative


@dataclass(slots=True)
class PatternConfig:
    """Keyword patterns for classification and attribute extraction."""

    classifier: str = "rule_default"
    modal_verbs: list[str] = field(
        default_factory=lambda: ["can", "need to", "must", "should", "may", "have to"]
    )
    stoplist: list[str] = field(
        default_factory=lambda: ["learn", "see", "read", "find", "refer", "note"]
    )
    condition_intro: list[str] = field(
        default_factory=lambda: ["if", "when", "once", "unless", "before", "after"]
    )
    goal_intro: list[str] = field(default_factory=lambda: ["so that", "in order to"])
    location_preps: list[str] = field(default_factory=lambda: ["in", "inside", "within", "at"])

    @classmethod
    def from_file(cls, path: str | Path) -> PatternConfig:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls()
        for key in (
            "classifier",
            "modal_verbs",
            "stoplist",
            "condition_intro",
            "goal_intro",
            "location_preps",
        ):
            if key in data:
                setattr(cfg, key, data[key])
        return cfg

    def modal_regex(self) -> re.Pattern[str]:
        alts = "|".join(re.escape(m).replace(r"\ ", r"\s+") for m in self.modal_verbs)
        return re.compile(rf"\byou\s+(?:{alts})\s+([A-Za-z_]+)", re.IGNORECASE)


DEFAULT_PATTERNS = PatternConfig()


@dataclass(frozen=True, slots=True)
class ActionPhrase:
    """One extracted action with its clause and clause-level attributes."""

    verb: str
    object: str
    clause: str
    condition: str | None = None
    goal: str | None = None
    location: str | None = None


def split_sentences(
    text: str,
    *,
    source: ActionSource = ActionSource.TEXT,
    anchor: str | None = None,
    spans: Sequence[tuple[int, int]] = (),
) -> list[SentenceRecord]:
    """Text splits on terminal punctuation; headings and comment segments
    pass through as single records."""
    text = text.strip()
    if not text:
        return []
    if source in (ActionSource.HEADING, ActionSource.COMMENT):
        clipped = tuple((max(0, s), min(len(text), e)) for s, e in spans if s < len(text))
        return [SentenceRecord(text=text, source=source, anchor=anchor, position=0, spans=clipped)]
    records = []
    for i, span in enumerate(split_sentence_spans(text, spans)):
        rel = tuple(
            (max(s, span.start) - span.start, min(e, span.end) - span.start)
            for s, e in spans
            if s < span.end and e > span.start
        )
        records.append(
            SentenceRecord(text=span.text, source=source, anchor=anchor, position=i, spans=rel)
        )
    return records


# -- clause analysis -------------------------------------------------------


def _detach_leading(
    text: str, config: PatternConfig
) -> tuple[str | None, str | None, str]:
    """Peel leading "If ...," / "In ...," adjuncts off the sentence."""
    condition: str | None = None
    location: str | None = None
    rest = text.strip()
    while True:
        m = re.match(r"([A-Za-z]+)\b", rest)
        if not m:
            break
        word = m.group(1).lower()
        comma = rest.find(",")
        if comma <= 0:
            break
        if condition is None and word in config.condition_intro:
            condition = rest[m.end() : comma].strip()
            rest = rest[comma + 1 :].strip()
            continue
        if location is None and word in config.location_preps:
            location = rest[m.end() : comma].strip()
            rest = rest[comma + 1 :].strip()
            continue
        break
    return condition, location, rest


def _match_modal(tokens: list[Token], i: int, config: PatternConfig) -> int:
    """Length in tokens of a "you <modal>" prefix at i, or 0."""
    if i >= len(tokens) or tokens[i].text.lower() != "you":
        return 0
    for modal in config.modal_verbs:
        words = modal.split()
        if [t.text.lower() for t in tokens[i + 1 : i + 1 + len(words)]] == words:
            return 1 + len(words)
    return 0


def _clause_head(tokens: list[Token], config: PatternConfig) -> int | None:
    """Index of the head verb token of a clause, or None."""
    i = 0
    while i < len(tokens):
        low = tokens[i].text.lower()
        if low in _CLAUSE_CONJ or low in DISCOURSE:
            i += 1
            continue
        skip = _match_modal(tokens, i, config)
        if skip:
            i += skip
            continue
        break
    if i >= len(tokens):
        return None
    if verb_lemma(tokens[i].text) is None:
        return None
    return i


def _split_clauses(text: str, config: PatternConfig) -> list[str]:
    tokens = tokenize(text)
    cuts = [0]
    for i, tok in enumerate(tokens):
        if i == 0 or tok.text.lower() not in _CLAUSE_CONJ:
            continue
        if _clause_head(tokens[i + 1 :], config) is not None:
            # the conjunction introduces a new finite clause
            cuts.append(tok.start)
    cuts.append(len(text))
    out = []
    for a, b in zip(cuts, cuts[1:]):
        chunk = text[a:b].strip().strip(",").strip()
        if chunk:
            out.append(chunk)
    return out


def _extract_clause(
    clause: str, tagger: PosTagger, config: PatternConfig
) -> ActionPhrase | None:
    tokens = tokenize(clause)
    if not tokens:
        return None
    head = _clause_head(tokens, config)
    if head is None:
        return None
    tags = tagger.tag([t.text for t in tokens])
    lemma = verb_lemma(tokens[head].text)
    if lemma is None:
        return None

    j = head + 1
    object_tokens: list[tuple[Token, str]] = []
    while j < len(tokens) and tags[j] in (NOUN, ADJ, DET):
        object_tokens.append((tokens[j], tags[j]))
        j += 1
    obj = " ".join(t.text for t, tag in object_tokens if tag != DET)

    goal, goal_at = _find_goal(clause, tokens, tags, j, config)
    location = _find_location(tokens, tags, head + 1, goal_at, obj, clause, config)
    return ActionPhrase(verb=lemma, object=obj, clause=clause, goal=goal, location=location)


def _find_goal(
    clause: str,
    tokens: list[Token],
    tags: list[str],
    start: int,
    config: PatternConfig,
) -> tuple[str | None, int]:
    """Trailing purpose clause: "to <verb>", "so that", "in order to"."""
    low = clause.lower()
    best: tuple[int, int] | None = None  # (char pos of goal text, token index)
    for phrase in config.goal_intro:
        at = low.find(phrase)
        if at > 0:
            best = (at + len(phrase), _token_index_at(tokens, at))
            break
    if best is None:
        for k in range(start, len(tokens) - 1):
            if tokens[k].text.lower() != "to":
                continue
            nxt = tokens[k + 1]
            if nxt.text.lower() in VERB_LEXICON and tags[k + 1] == VERB:
                best = (nxt.start, k)
                break
    if best is None:
        return None, len(tokens)
    text = clause[best[0] :].strip().rstrip(".!?:;,").strip()
    return (text or None), best[1]


def _find_location(
    tokens: list[Token],
    tags: list[str],
    start: int,
    stop: int,
    action_object: str,
    clause: str,
    config: PatternConfig,
) -> str | None:
    obj_norm = action_object.lower()
    for k in range(start, min(stop, len(tokens))):
        if tags[k] != ADP or tokens[k].text.lower() not in config.location_preps:
            continue
        j = k + 1
        pp: list[Token] = []
        while j < len(tokens) and tags[j] in (DET, ADJ, NOUN, PRON):
            pp.append(tokens[j])
            j += 1
        if not pp:
            continue
        text = clause[pp[0].start : pp[-1].end]
        bare = " ".join(
            t.text for t, tag in zip(pp, tags[k + 1 : k + 1 + len(pp)]) if tag != DET
        ).lower()
        if bare and bare != obj_norm:
            return text
    return None


def _token_index_at(tokens: list[Token], pos: int) -> int:
    for i, tok in enumerate(tokens):
        if tok.start >= pos:
            return i
    return len(tokens)


def _units(record_text: str, source: ActionSource) -> list[str]:
    """Comment segments may hold several prose sentences; split them here."""
    if source is ActionSource.COMMENT:
        return [s.text for s in split_sentence_spans(record_text)] or [record_text]
    return [record_text]


def extract_action_phrase(
    text: str,
    *,
    source: ActionSource = ActionSource.TEXT,
    tagger: PosTagger = DEFAULT_TAGGER,
    config: PatternConfig = DEFAULT_PATTERNS,
) -> list[ActionPhrase]:
    """All (verb, object) pairs of a sentence, clause by clause.

    Leading "If ...," and "In ...," adjuncts are peeled first; their texts
    attach to every pair extracted from the same unit.
    """
    phrases: list[ActionPhrase] = []
    for unit in _units(text, source):
        condition, lead_location, rest = _detach_leading(unit, config)
        for clause in _split_clauses(rest, config):
            phrase = _extract_clause(clause, tagger, config)
            if phrase is None:
                continue
            location = phrase.location
            if lead_location is not None:
                bare = _strip_determiners(lead_location, tagger).lower()
                if bare != phrase.object.lower():
                    location = lead_location
            if condition is not None or location != phrase.location:
                phrase = ActionPhrase(
                    verb=phrase.verb,
                    object=phrase.object,
                    clause=phrase.clause,
                    condition=condition,
                    goal=phrase.goal,
                    location=location,
                )
            phrases.append(phrase)
    return phrases


def _strip_determiners(text: str, tagger: PosTagger) -> str:
    tokens = tokenize(text)
    if not tokens:
        return text.strip()
    tags = tagger.tag([t.text for t in tokens])
    return " ".join(t.text for t, tag in zip(tokens, tags) if tag != DET)


def extract_attributes(
    text: str,
    *,
    action_object: str = "",
    source: ActionSource = ActionSource.TEXT,
    tagger: PosTagger = DEFAULT_TAGGER,
    config: PatternConfig = DEFAULT_PATTERNS,
) -> dict[str, str | None]:
    """Condition/goal/location of the first extractable clause of a sentence."""
    for phrase in extract_action_phrase(text, source=source, tagger=tagger, config=config):
        if action_object and phrase.object.lower() != action_object.lower():
            continue
        return {"condition": phrase.condition, "goal": phrase.goal, "location": phrase.location}
    return {"condition": None, "goal": None, "location": None}


# -- activity classification ----------------------------------------------


class ActivityClassifier(Protocol):
    """Decides whether a sentence instructs the reader to do something."""

    def classify(self, record: SentenceRecord) -> bool: ...


CLASSIFIER_REGISTRY: dict[str, Callable[[PatternConfig], ActivityClassifier]] = {}


def register_classifier(name: str) -> Callable:
    def wrap(factory: Callable[[PatternConfig], ActivityClassifier]):
        CLASSIFIER_REGISTRY[name] = factory
        return factory

    return wrap


def build_classifier(config: PatternConfig = DEFAULT_PATTERNS) -> ActivityClassifier:
    try:
        factory = CLASSIFIER_REGISTRY[config.classifier]
    except KeyError:
        raise ValueError(
            f"unknown classifier {config.classifier!r}; known: {sorted(CLASSIFIER_REGISTRY)}"
        ) from None
    return factory(config)


@register_classifier("rule_default")
class RuleBasedActivityClassifier:
    """Imperative mood, or a "you <modal> <verb>" pattern, marks activity.

    Third-person comment verbs ("Concatenates ...") count as imperative after
    stemming; the stoplist rejects reading pointers (learn, see, ...) in both
    branches.
    """

    def __init__(self, config: PatternConfig = DEFAULT_PATTERNS, tagger: PosTagger = DEFAULT_TAGGER):
        self.config = config
        self.tagger = tagger
        self._modal_re = config.modal_regex()
        self._stop = frozenset(config.stoplist)

    def classify(self, record: SentenceRecord) -> bool:
        for m in self._modal_re.finditer(record.text):
            lemma = verb_lemma(m.group(1))
            if lemma is not None and lemma not in self._stop:
                return True
        for unit in _units(record.text, record.source):
            _, _, rest = _detach_leading(unit, self.config)
            clauses = _split_clauses(rest, self.config)
            if not clauses:
                continue
            tokens = tokenize(clauses[0])
            head = _clause_head(tokens, self.config)
            if head is None:
                continue
            raw = tokens[head].text.lower()
            if record.source is not ActionSource.COMMENT and raw not in VERB_LEXICON:
                continue  # text must be base form; comments may be inflected
            lemma = verb_lemma(raw)
            if lemma is not None and lemma not in self._stop:
                return True
        return False
