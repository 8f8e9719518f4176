"""Lexicon-driven text processing: tokens, tags, stems, sentence bounds.

No trained models here.  Tagging is closed-class word lists plus a shipped
verb lexicon of base forms and a few suffix heuristics; it is deterministic
and cheap, which the pipeline needs more than it needs broad coverage.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+")

# tagset: VERB NOUN ADJ DET PRON ADP MODAL OTHER
VERB = "VERB"
NOUN = "NOUN"
ADJ = "ADJ"
DET = "DET"
PRON = "PRON"
ADP = "ADP"
MODAL = "MODAL"
OTHER = "OTHER"

DETERMINERS = frozenset(
    """the a an this that these those its your my our their his some any each
    every all both no either neither one another such""".split()
)

PRONOUNS = frozenset("you it they we i he she me him her us them whatever what who".split())

PREPOSITIONS = frozenset(
    """in on at to of with from by into onto for as inside within under over
    about through after before during without via between against per until
    like near behind above below across around""".split()
)

MODALS = frozenset("can could may might must shall should will would".split())

CONJUNCTIONS = frozenset("and but or then so".split())

# leading discourse tokens an imperative may start with
DISCOURSE = frozenset("then now first next finally also optionally simply just here please so".split())

ADJECTIVES = frozenset(
    """new previous current custom full simple small large next last first
    second third own same different multiple single default additional
    specific common separate empty inflated fullscreen embedded other more
    only available""".split()
)

_ADJ_SUFFIXES = ("able", "ible", "ful", "less", "ous", "ive")

VERB_LEXICON = frozenset(
    """create add remove delete set get put call use replace preserve commit
    implement define extend override declare initialize instantiate build make
    show display hide dismiss handle load save read write open close start
    stop run execute perform register unregister bind unbind attach detach
    inflate return pass send receive update insert click tap select choose
    enable disable configure specify provide obtain retrieve store apply
    import include exclude avoid ensure verify check test learn see find
    refer note follow drag drop launch install download upload convert parse
    render draw invoke trigger fire listen observe subscribe unsubscribe
    notify request respond cancel abort retry restore recover persist cache
    fetch query filter sort map reduce iterate loop throw catch raise log
    print debug compile deploy publish share copy move rename edit modify
    change adjust customize format validate sanitize escape encode decode
    encrypt decrypt sign authenticate authorize connect disconnect navigate
    scroll swipe zoom rotate resize measure position align center wrap nest
    group split merge combine concatenate append prepend push pop clear reset
    refresh reload prompt ask want need have do keep let give take begin end
    supply declare assign compare extract generate initialize override tag
    wire mount unmount style""".split()
)

# words whose verb reading never starts an instruction
NON_ACTIONABLE_VERBS = frozenset("learn see read find refer note".split())

STOPWORDS = frozenset(
    """a an the this that these those it its is are was were be been being am
    to of in on at by for with from into onto as and or but so then here
    there you your we our they their he she him her i me my us them can could
    may might must shall should will would need needs have has had do does
    did done not no nor if when while once unless until whatever which what
    who whom whose how why where also just only some any all each every more
    most other another one own such same s t etc""".split()
)

ABBREVIATIONS = frozenset(
    "e.g i.e etc vs cf al fig no dr mr mrs ms st jr sr inc ltd co".split()
)


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def _undouble(stem: str) -> str | None:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
        return stem[:-1]
    return None


def _strip_inflection(word: str) -> list[str]:
    """Candidate base forms for an inflected word, most specific first."""
    out: list[str] = []
    if word.endswith("ies") and len(word) > 4:
        out.append(word[:-3] + "y")
    if word.endswith("es") and len(word) > 3:
        out.append(word[:-2])
    if word.endswith("s") and len(word) > 3 and not word.endswith(("ss", "us", "is")):
        out.append(word[:-1])
    if word.endswith("ing") and len(word) > 4:
        stem = word[:-3]
        out.append(stem)
        out.append(stem + "e")
        undoubled = _undouble(stem)
        if undoubled:
            out.append(undoubled)
    if word.endswith("ed") and len(word) > 3:
        stem = word[:-2]
        out.append(stem)
        out.append(stem + "e" if not stem.endswith("e") else stem)
        undoubled = _undouble(stem)
        if undoubled:
            out.append(undoubled)
    return out


def verb_lemma(word: str) -> str | None:
    """Base form if the word reads as a lexicon verb, else None."""
    low = word.lower()
    if low in VERB_LEXICON:
        return low
    for cand in _strip_inflection(low):
        if cand in VERB_LEXICON:
            return cand
    return None


def stem(word: str) -> str:
    """Light suffix stemmer used for duplicate detection."""
    low = word.lower()
    candidates = _strip_inflection(low)
    for cand in candidates:
        if cand in VERB_LEXICON:
            return cand
    for cand in candidates:
        # otherwise take the first stem that still looks like a word
        if len(cand) >= 3:
            return cand
    return low


def content_tokens(text: str) -> list[str]:
    """Lowercased, punctuation-free, stopword-free, stemmed tokens."""
    out = []
    for tok in tokenize(text):
        low = tok.text.lower()
        if low in STOPWORDS or low.isdigit():
            continue
        out.append(stem(low))
    return out


class PosTagger(Protocol):
    """Pluggable tagger: one label per token from the compact tagset."""

    def tag(self, tokens: Sequence[str]) -> list[str]: ...


class LexiconPosTagger:
    """Default tagger: closed-class lists, a verb lexicon, suffix heuristics.

    A verb-lexicon word right after a determiner, adjective or preposition is
    retagged NOUN ("the state", "a display") so object spans survive.
    """

    def tag(self, tokens: Sequence[str]) -> list[str]:
        tags: list[str] = []
        for tok in tokens:
            low = tok.lower()
            if low in DETERMINERS:
                tags.append(DET)
            elif low in PRONOUNS:
                tags.append(PRON)
            elif low in MODALS:
                tags.append(MODAL)
            elif low in PREPOSITIONS:
                tags.append(ADP)
            elif low in ADJECTIVES:
                tags.append(ADJ)
            elif verb_lemma(low) is not None:
                tags.append(VERB)
            elif low.endswith(_ADJ_SUFFIXES):
                tags.append(ADJ)
            elif low[0].isdigit():
                tags.append(OTHER)
            elif low in CONJUNCTIONS:
                tags.append(OTHER)
            else:
                tags.append(NOUN)
        for i in range(1, len(tags)):
            if tags[i] != VERB or tags[i - 1] not in (DET, ADJ, ADP):
                continue
            # "to" may mark an infinitive, so it never demotes the verb
            if tags[i - 1] == ADP and tokens[i - 1].lower() == "to":
                continue
            tags[i] = NOUN
        return tags


DEFAULT_TAGGER = LexiconPosTagger()


@dataclass(frozen=True, slots=True)
class SentenceSpan:
    text: str
    start: int
    end: int


def split_sentence_spans(
    text: str, protected: Iterable[tuple[int, int]] = ()
) -> list[SentenceSpan]:
    """Split prose into sentences on terminal punctuation.

    Periods inside protected spans (inline code), inside numbers, or ending a
    known abbreviation do not split.
    """
    guarded = sorted(protected)
    bounds: list[int] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?":
            if _inside(guarded, i):
                i += 1
                continue
            if ch == "." and _is_abbreviation(text, i):
                i += 1
                continue
            if ch == "." and 0 < i < n - 1 and text[i - 1].isdigit() and text[i + 1].isdigit():
                i += 1
                continue
            j = i + 1
            while j < n and text[j] in ".!?\"')]":
                j += 1
            if j >= n or text[j].isspace():
                bounds.append(j)
                i = j
                continue
        i += 1
    out: list[SentenceSpan] = []
    prev = 0
    for b in bounds + [n]:
        if b <= prev:
            continue
        chunk = text[prev:b]
        stripped = chunk.strip()
        if stripped:
            lead = len(chunk) - len(chunk.lstrip())
            out.append(SentenceSpan(stripped, prev + lead, prev + lead + len(stripped)))
        prev = b
    return out


def _inside(spans: list[tuple[int, int]], pos: int) -> bool:
    return any(s <= pos < e for s, e in spans)


def _is_abbreviation(text: str, dot: int) -> bool:
    start = dot
    while start > 0 and not text[start - 1].isspace() and text[start - 1] not in "([\"'":
        start -= 1
    token = text[start:dot].rstrip(".").lower()
    if not token:
        return False
    if len(token) == 1 and token.isalpha():
        return True
    return token in ABBREVIATIONS or token.replace(".", "") in {"eg", "ie"}
