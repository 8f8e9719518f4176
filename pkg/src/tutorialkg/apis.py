"""API dictionary and lexical API recognition in code.

Recognition is dictionary-driven: identifier tokens (comments and string
literals masked out) are matched by simple name, then disambiguated by
declaring-class co-occurrence inside the same snippet or method text.
Anything still ambiguous is dropped rather than guessed.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from tutorialkg.model import ApiKind, ApiRef, KnowledgeGraph

log = logging.getLogger(__name__)

IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")

EXACT = "exact"
DISAMBIGUATED = "disambiguated"
UNRESOLVED_DROPPED = "unresolved_dropped"


class DictionaryFormatError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class ApiMention:
    ref: ApiRef
    span: tuple[int, int]
    confidence: str  # exact | disambiguated


@dataclass(slots=True)
class ApiDictionary:
    entries: list[ApiRef] = field(default_factory=list)
    by_simple_name: dict[str, list[ApiRef]] = field(default_factory=dict)
    by_declaring_class: dict[str, list[ApiRef]] = field(default_factory=dict)
    # simple class name -> fqns of classes carrying it
    class_names: dict[str, list[str]] = field(default_factory=dict)

    def add(self, ref: ApiRef) -> None:
        self.entries.append(ref)
        self.by_simple_name.setdefault(ref.simple_name, []).append(ref)
        if ref.kind is ApiKind.CLASS:
            self.class_names.setdefault(ref.simple_name, []).append(ref.fqn)
        else:
            self.by_declaring_class.setdefault(ref.declaring_class, []).append(ref)

    def __len__(self) -> int:
        return len(self.entries)


def build_dictionary(records: Iterable[dict]) -> ApiDictionary:
    """Build the lookup indexes from record dicts.

    First record wins on duplicate fqn; a non-class record without a
    declaring class is rejected.  simple_name is derived when omitted.
    """
    dictionary = ApiDictionary()
    seen: set[str] = set()
    for i, record in enumerate(records):
        fqn = record.get("fqn")
        kind_raw = record.get("kind")
        if not fqn or not kind_raw:
            log.error("dictionary record %d rejected: missing fqn or kind", i)
            continue
        try:
            kind = ApiKind(kind_raw)
        except ValueError:
            log.error("dictionary record %d rejected: unknown kind %r", i, kind_raw)
            continue
        if fqn in seen:
            log.warning("dictionary record %d ignored: duplicate fqn %s", i, fqn)
            continue
        declaring = record.get("declaring_class")
        if kind is ApiKind.CLASS:
            declaring = declaring or fqn
        elif not declaring:
            log.error("dictionary record %d rejected: %s %s has no declaring_class", i, kind_raw, fqn)
            continue
        seen.add(fqn)
        simple = record.get("simple_name")
        ref = ApiRef(fqn=fqn, kind=kind, declaring_class=declaring)
        if simple and simple != ref.simple_name:
            log.warning("dictionary record %d: simple_name %r ignored, derived %r from fqn", i, simple, ref.simple_name)
        dictionary.add(ref)
    for refs in dictionary.by_simple_name.values():
        refs.sort(key=lambda r: r.fqn)
    return dictionary


def _iter_records(path: Path) -> Iterator[dict]:
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DictionaryFormatError(f"{path}:{lineno}: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise DictionaryFormatError(f"{path}:{lineno}: record must be an object")
            yield record


def load_dictionary(path: str | Path) -> ApiDictionary:
    """Load a newline-delimited JSON dictionary file."""
    return build_dictionary(_iter_records(Path(path)))


def dictionary_from_graph(graph: KnowledgeGraph) -> ApiDictionary:
    """Derive a dictionary from every ApiRef stored in a graph.

    Queries only score against APIs the graph knows, so this is sufficient
    for search and for the HTTP service, which load no dictionary file.
    """
    refs: dict[str, ApiRef] = {}
    for snippet in graph.snippets.values():
        for ref in snippet.apis:
            refs.setdefault(ref.fqn, ref)
    for attrs in graph.attributes.values():
        for ref in attrs.apis:
            refs.setdefault(ref.fqn, ref)
    dictionary = ApiDictionary()
    for fqn in sorted(refs):
        dictionary.add(refs[fqn])
    for lst in dictionary.by_simple_name.values():
        lst.sort(key=lambda r: r.fqn)
    return dictionary


def mask_noncode(code: str) -> str:
    """Replace comments and string/char literals with spaces, offsets kept."""
    out = list(code)
    i = 0
    n = len(code)
    state = "code"
    closer = ""
    while i < n:
        ch = code[i]
        nxt = code[i + 1] if i + 1 < n else ""
        if state == "code":
            if ch == "/" and nxt == "/":
                state, closer = "line", ""
                out[i] = out[i + 1] = " "
                i += 2
                continue
            if ch == "/" and nxt == "*":
                state, closer = "block", ""
                out[i] = out[i + 1] = " "
                i += 2
                continue
            if ch in "\"'":
                state, closer = "string", ch
                out[i] = " "
                i += 1
                continue
            i += 1
            continue
        if state == "line":
            if ch == "\n":
                state = "code"
            else:
                out[i] = " "
            i += 1
            continue
        if state == "block":
            if ch == "*" and nxt == "/":
                out[i] = out[i + 1] = " "
                state = "code"
                i += 2
                continue
            if ch != "\n":
                out[i] = " "
            i += 1
            continue
        # string/char literal
        if ch == "\\":
            out[i] = " "
            if i + 1 < n and code[i + 1] != "\n":
                out[i + 1] = " "
            i += 2
            continue
        if ch == closer or ch == "\n":
            out[i] = " " if ch != "\n" else "\n"
            state = "code"
            i += 1
            continue
        if ch != "\n":
            out[i] = " "
        i += 1
    return "".join(out)


def recognize(code: str, dictionary: ApiDictionary) -> list[ApiMention]:
    """Resolve API mentions in code text.

    One mention per surviving token occurrence, ordered by span start, so
    multiplicity is preserved for bag-style matching.  A member candidate
    survives only when its declaring class co-occurs or it is the unique
    candidate for its name; same-named classes need a member co-occurring.
    """
    masked = mask_noncode(code)
    tokens = list(IDENT_RE.finditer(masked))
    token_set = {m.group(0) for m in tokens}

    mentions: list[ApiMention] = []
    for m in tokens:
        name = m.group(0)
        candidates = dictionary.by_simple_name.get(name)
        if not candidates:
            continue
        unique = len(candidates) == 1
        receiver = _receiver_before(masked, m.start())
        pool = candidates
        if receiver and receiver in dictionary.class_names:
            receiver_classes = set(dictionary.class_names[receiver])
            narrowed = [
                r for r in pool if r.kind is not ApiKind.CLASS and r.declaring_class in receiver_classes
            ]
            if narrowed:
                pool = narrowed
        survivors: list[tuple[ApiRef, str]] = []
        for ref in pool:
            if ref.kind is ApiKind.CLASS:
                if unique:
                    survivors.append((ref, EXACT))
                elif _member_cooccurs(ref, dictionary, token_set, exclude=name):
                    survivors.append((ref, DISAMBIGUATED))
            else:
                declaring_simple = ref.declaring_class.rsplit(".", 1)[-1]
                if unique:
                    survivors.append((ref, EXACT))
                elif declaring_simple in token_set:
                    survivors.append((ref, DISAMBIGUATED))
        if len(survivors) == 1:
            ref, confidence = survivors[0]
            mentions.append(ApiMention(ref=ref, span=(m.start(), m.end()), confidence=confidence))
        # zero or several survivors: unresolved, dropped
    return mentions


def _receiver_before(masked: str, pos: int) -> str | None:
    i = pos - 1
    while i >= 0 and masked[i] in " \t":
        i -= 1
    if i < 0 or masked[i] != ".":
        return None
    i -= 1
    while i >= 0 and masked[i] in " \t":
        i -= 1
    end = i + 1
    while i >= 0 and (masked[i].isalnum() or masked[i] in "_$"):
        i -= 1
    if end == i + 1:
        return None
    return masked[i + 1 : end]


def _member_cooccurs(
    ref: ApiRef, dictionary: ApiDictionary, token_set: set[str], *, exclude: str
) -> bool:
    for member in dictionary.by_declaring_class.get(ref.fqn, []):
        simple = member.simple_name
        if simple != exclude and simple in token_set:
            return True
    return False
