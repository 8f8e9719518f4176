"""Tutorial page ingestion: lenient HTML to an ordered node sequence.

Parsing never hard-fails on malformed markup; whatever structure the parser
can recover becomes the document.  Code containers are captured verbatim,
prose keeps character spans for inline API markup, and comment segmentation
happens here because comment layout is a property of the source page.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Any

log = logging.getLogger(__name__)

_WS = re.compile(r"\s+")
_LANG_CLASS = re.compile(r"(?:language|lang)-([A-Za-z0-9_+-]+)")

HEADING_TAGS = {"h1": 1, "h2": 2, "h3": 3, "h4": 4, "h5": 5, "h6": 6}

# block-level tags that implicitly terminate an open paragraph
_BLOCK_TAGS = frozenset(
    """div section article aside header footer main nav table figure
    blockquote form fieldset""".split()
)


@dataclass(slots=True)
class IngestConfig:
    """Corpus-specific knobs, loadable from a JSON file."""

    code_block_selector: str = "devsite-code"
    inline_api_selector: str = "code,tt"
    exclude_xml: bool = True
    comment_styles: list[str] = field(default_factory=lambda: ["//", "/* */"])

    @classmethod
    def from_file(cls, path: str | Path) -> IngestConfig:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls()
        for key in ("code_block_selector", "inline_api_selector", "exclude_xml"):
            if key in data:
                setattr(cfg, key, data[key])
        if "comment_styles" in data:
            cfg.comment_styles = list(data["comment_styles"])
        return cfg


@dataclass(slots=True)
class CommentSegment:
    """One merged run of full-line comments inside a code block.

    span covers the comment lines themselves; code_span covers the code the
    comment governs: from the first code line after it, up to the next
    comment at the same or shallower brace depth, or the block end.
    """

    text: str
    span: tuple[int, int]
    code_span: tuple[int, int]
    depth: int = 0


@dataclass(slots=True)
class DocNode:
    """One document node in source order."""

    kind: str  # heading | paragraph | code_block | list_item
    text: str
    level: int | None = None
    anchor: str | None = None
    ordered: bool | None = None
    index: int | None = None
    inline_api_spans: list[tuple[int, int]] = field(default_factory=list)
    language_hint: str | None = None

    @property
    def is_xml(self) -> bool:
        if self.kind != "code_block":
            return False
        if self.language_hint and self.language_hint.lower() == "xml":
            return True
        return self.text.lstrip().startswith("<")


@dataclass(slots=True)
class TutorialDocument:
    page_uri: str
    title: str
    nodes: list[DocNode] = field(default_factory=list)


def _parse_selector(selector: str) -> list[tuple[str | None, str | None]]:
    """Tiny selector grammar: comma-separated "tag", "tag.class" or ".class"."""
    out: list[tuple[str | None, str | None]] = []
    for item in selector.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if "." in item:
            tag, cls = item.split(".", 1)
            out.append((tag or None, cls or None))
        else:
            out.append((item, None))
    return out


def _matches(rules: list[tuple[str | None, str | None]], tag: str, attrs: dict[str, str | None]) -> bool:
    classes = (attrs.get("class") or "").split()
    for want_tag, want_cls in rules:
        if want_tag is not None and tag != want_tag:
            continue
        if want_cls is not None and want_cls not in classes:
            continue
        return True
    return False


class _TextAccumulator:
    """Collects prose with collapsed whitespace, tracking inline API spans."""

    def __init__(self) -> None:
        self._parts: list[str] = []
        self._len = 0
        self.spans: list[tuple[int, int]] = []
        self._depth = 0
        self._start = 0

    def _ends_space(self) -> bool:
        return bool(self._parts) and self._parts[-1].endswith(" ")

    def add(self, raw: str) -> None:
        norm = _WS.sub(" ", raw)
        if not norm:
            return
        if norm.startswith(" ") and (self._len == 0 or self._ends_space()):
            norm = norm[1:]
        if not norm:
            return
        self._parts.append(norm)
        self._len += len(norm)

    def open_span(self) -> None:
        if self._depth == 0:
            self._start = self._len
        self._depth += 1

    def close_span(self) -> None:
        if self._depth == 0:
            return
        self._depth -= 1
        if self._depth == 0 and self._len > self._start:
            self.spans.append((self._start, self._len))

    def result(self) -> tuple[str, list[tuple[int, int]]]:
        text = "".join(self._parts).rstrip()
        spans = [(s, min(e, len(text))) for s, e in self.spans if s < len(text)]
        return text, spans


class _CodeCapture:
    def __init__(self, tag: str, language_hint: str | None) -> None:
        self.tag = tag
        self.depth = 1
        self.parts: list[str] = []
        self.language_hint = language_hint

    def text(self) -> str:
        raw = "".join(self.parts)
        lines = raw.split("\n")
        while lines and not lines[0].strip():
            lines.pop(0)
        while lines and not lines[-1].strip():
            lines.pop()
        if not lines:
            return ""
        indents = [len(l) - len(l.lstrip()) for l in lines if l.strip()]
        cut = min(indents) if indents else 0
        return "\n".join(l[cut:] if l.strip() else "" for l in lines)


def _language_from_attrs(attrs: dict[str, str | None]) -> str | None:
    for key in ("data-language", "language", "syntax"):
        value = attrs.get(key)
        if value:
            return value.lower()
    m = _LANG_CLASS.search(attrs.get("class") or "")
    if m:
        return m.group(1).lower()
    return None


class _PageParser(HTMLParser):
    def __init__(self, config: IngestConfig) -> None:
        super().__init__(convert_charrefs=True)
        self.config = config
        self.code_rules = _parse_selector(config.code_block_selector)
        self.inline_rules = _parse_selector(config.inline_api_selector)
        self.nodes: list[DocNode] = []
        self.title_parts: list[str] = []
        self._in_title = False
        self._skip_tag: str | None = None
        self._skip_depth = 0
        self._code: _CodeCapture | None = None
        self._text: _TextAccumulator | None = None
        self._text_kind = ""
        self._text_meta: dict[str, Any] = {}
        self._loose = _TextAccumulator()
        self._list_stack: list[list[Any]] = []  # [ordered, counter]

    # -- node emission -----------------------------------------------------

    def _flush_loose(self) -> None:
        text, spans = self._loose.result()
        if text:
            self.nodes.append(DocNode(kind="paragraph", text=text, inline_api_spans=spans))
        self._loose = _TextAccumulator()

    def _emit_text(self) -> None:
        if self._text is None:
            return
        text, spans = self._text.result()
        if text:
            node = DocNode(
                kind=self._text_kind,
                text=text,
                inline_api_spans=spans,
                level=self._text_meta.get("level"),
                anchor=self._text_meta.get("anchor"),
                ordered=self._text_meta.get("ordered"),
                index=self._text_meta.get("index"),
            )
            self.nodes.append(node)
        self._text = None
        self._text_kind = ""
        self._text_meta = {}

    def _emit_code(self) -> None:
        if self._code is None:
            return
        text = self._code.text()
        if text:
            self.nodes.append(
                DocNode(kind="code_block", text=text, language_hint=self._code.language_hint)
            )
        self._code = None

    def _start_text(self, kind: str, **meta: Any) -> None:
        self._flush_loose()
        self._emit_text()
        self._text = _TextAccumulator()
        self._text_kind = kind
        self._text_meta = meta

    # -- parser callbacks --------------------------------------------------

    def handle_starttag(self, tag: str, attr_list: list[tuple[str, str | None]]) -> None:
        attrs = dict(attr_list)
        if self._skip_tag is not None:
            if tag == self._skip_tag:
                self._skip_depth += 1
            return
        if self._code is not None:
            if _matches(self.code_rules, tag, attrs) and tag == self._code.tag:
                self._code.depth += 1
            if self._code.language_hint is None:
                self._code.language_hint = _language_from_attrs(attrs)
            if tag == "br":
                self._code.parts.append("\n")
            return
        if tag in ("script", "style"):
            self._skip_tag = tag
            self._skip_depth = 1
            return
        if tag == "title":
            self._in_title = True
            return
        if _matches(self.code_rules, tag, attrs):
            self._flush_loose()
            self._emit_text()
            self._code = _CodeCapture(tag, _language_from_attrs(attrs))
            return
        if tag in HEADING_TAGS:
            self._start_text("heading", level=HEADING_TAGS[tag], anchor=attrs.get("id"))
            return
        if tag in ("ol", "ul"):
            if self._text_kind != "list_item":
                self._flush_loose()
                self._emit_text()
            self._list_stack.append([tag == "ol", 0])
            return
        if tag == "li":
            if self._text_kind == "list_item":
                self._emit_text()
            if self._list_stack:
                self._list_stack[-1][1] += 1
                ordered, index = self._list_stack[-1]
            else:
                ordered, index = False, 1
            self._start_text("list_item", ordered=ordered, index=index)
            return
        if tag == "p":
            if self._text_kind == "list_item" and self._text is not None:
                self._text.add(" ")
                return
            self._start_text("paragraph")
            return
        if tag == "br":
            target = self._text if self._text is not None else self._loose
            target.add(" ")
            return
        if self._text is not None and _matches(self.inline_rules, tag, attrs):
            self._text.open_span()
            return
        if tag in _BLOCK_TAGS:
            self._flush_loose()
            if self._text_kind == "paragraph":
                self._emit_text()

    def handle_endtag(self, tag: str) -> None:
        if self._skip_tag is not None:
            if tag == self._skip_tag:
                self._skip_depth -= 1
                if self._skip_depth <= 0:
                    self._skip_tag = None
            return
        if self._code is not None:
            if tag == self._code.tag:
                self._code.depth -= 1
                if self._code.depth <= 0:
                    self._emit_code()
            return
        if tag == "title":
            self._in_title = False
            return
        if tag in HEADING_TAGS:
            if self._text_kind == "heading":
                self._emit_text()
            return
        if tag == "p":
            if self._text_kind == "paragraph":
                self._emit_text()
            elif self._text_kind == "list_item" and self._text is not None:
                self._text.add(" ")
            return
        if tag == "li":
            if self._text_kind == "list_item":
                self._emit_text()
            return
        if tag in ("ol", "ul"):
            if self._text_kind == "list_item":
                self._emit_text()
            if self._list_stack:
                self._list_stack.pop()
            return
        if self._text is not None and _matches(self.inline_rules, tag, {}):
            self._text.close_span()

    def handle_data(self, data: str) -> None:
        if self._skip_tag is not None:
            return
        if self._in_title:
            self.title_parts.append(data)
            return
        if self._code is not None:
            self._code.parts.append(data)
            return
        if self._text is not None:
            self._text.add(data)
            return
        self._loose.add(data)

    def finish(self) -> None:
        self.close()
        self._emit_text()
        self._emit_code()
        self._flush_loose()


def parse_page(html: str | bytes, page_uri: str, config: IngestConfig | None = None) -> TutorialDocument:
    """Parse one tutorial page.  Malformed markup degrades, never raises."""
    config = config or IngestConfig()
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")
    parser = _PageParser(config)
    try:
        parser.feed(html)
        parser.finish()
    except Exception:  # pragma: no cover - html.parser rarely throws
        log.exception("parser error on %s; keeping nodes recovered so far", page_uri)
    title = _WS.sub(" ", "".join(parser.title_parts)).strip()
    if not title:
        for node in parser.nodes:
            if node.kind == "heading":
                title = node.text
                break
    if not title:
        title = Path(page_uri).stem
    return TutorialDocument(page_uri=page_uri, title=title, nodes=parser.nodes)


def load_corpus(corpus_dir: str | Path, config: IngestConfig | None = None) -> list[TutorialDocument]:
    """Parse every HTML page under corpus_dir, ordered by relative path."""
    root = Path(corpus_dir)
    pages = sorted(
        p for p in root.rglob("*") if p.suffix.lower() in (".html", ".htm") and p.is_file()
    )
    docs = []
    for page in pages:
        uri = page.relative_to(root).as_posix()
        docs.append(parse_page(page.read_text(encoding="utf-8"), uri, config))
    return docs


# -- comment segmentation --------------------------------------------------


def _comment_markers(styles: list[str]) -> tuple[list[str], list[tuple[str, str]]]:
    line_markers: list[str] = []
    block_markers: list[tuple[str, str]] = []
    for style in styles:
        parts = style.split()
        if len(parts) == 2:
            block_markers.append((parts[0], parts[1]))
        elif len(parts) == 1:
            line_markers.append(parts[0])
    return line_markers, block_markers


def extract_comments(block_text: str, config: IngestConfig | None = None) -> list[CommentSegment]:
    """Find full-line comment segments and the code region each one governs.

    Consecutive comment lines merge into one segment.  A segment's code span
    runs from the first code line after it to the next comment at the same or
    shallower brace depth, or to the block end.
    """
    config = config or IngestConfig()
    line_markers, block_markers = _comment_markers(config.comment_styles)

    lines: list[tuple[int, str]] = []
    offset = 0
    for line in block_text.split("\n"):
        lines.append((offset, line))
        offset += len(line) + 1

    # classify each line: "comment" (with extracted content), "code", "blank"
    kinds: list[str] = []
    contents: list[str] = []
    in_block: tuple[str, str] | None = None
    for _, line in lines:
        stripped = line.strip()
        if in_block is not None:
            opener, closer = in_block
            body = stripped
            if body.endswith(closer):
                body = body[: -len(closer)]
                in_block = None
            body = body.lstrip("*").strip()
            kinds.append("comment")
            contents.append(body)
            continue
        if not stripped:
            kinds.append("blank")
            contents.append("")
            continue
        matched = False
        for marker in line_markers:
            if stripped.startswith(marker):
                kinds.append("comment")
                contents.append(stripped[len(marker):].strip())
                matched = True
                break
        if matched:
            continue
        for opener, closer in block_markers:
            if stripped.startswith(opener):
                body = stripped[len(opener):]
                if body.endswith(closer):
                    body = body[: -len(closer)]
                else:
                    in_block = (opener, closer)
                kinds.append("comment")
                contents.append(body.strip())
                matched = True
                break
        if matched:
            continue
        kinds.append("code")
        contents.append("")

    # brace depth at the start of each line, counted over code lines only
    depths: list[int] = []
    depth = 0
    for i, (_, line) in enumerate(lines):
        depths.append(depth)
        if kinds[i] == "code":
            depth += line.count("{") - line.count("}")

    segments: list[CommentSegment] = []
    i = 0
    n = len(lines)
    while i < n:
        if kinds[i] != "comment":
            i += 1
            continue
        start_line = i
        while i < n and kinds[i] == "comment":
            i += 1
        end_line = i  # exclusive
        seg_depth = depths[start_line]
        text = _WS.sub(" ", " ".join(c for c in contents[start_line:end_line] if c)).strip()
        seg_start = lines[start_line][0]
        seg_end = lines[end_line - 1][0] + len(lines[end_line - 1][1])

        code_start = None
        code_end = len(block_text)
        j = end_line
        while j < n:
            if kinds[j] == "comment" and depths[j] <= seg_depth:
                code_end = lines[j][0]
                break
            if kinds[j] == "code" and code_start is None:
                code_start = lines[j][0]
            j += 1
        if code_start is None or code_start >= code_end:
            code_span = (seg_end, seg_end)
        else:
            code_span = (code_start, _rstrip_offset(block_text, code_start, code_end))
        segments.append(
            CommentSegment(text=text, span=(seg_start, seg_end), code_span=code_span, depth=seg_depth)
        )
    return segments


def _rstrip_offset(text: str, start: int, end: int) -> int:
    while end > start and text[end - 1].isspace():
        end -= 1
    return end
