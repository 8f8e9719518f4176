"""Command line interface: build, search, eval, serve.

Data goes to stdout, logs to stderr.  Exit codes: 0 success, 2 unusable
input or arguments, 3 graph validation failure, 4 environment problems such
as an occupied port.
"""

from __future__ import annotations

import argparse
import json
import logging
import socket
import sys
from fractions import Fraction
from pathlib import Path

from tutorialkg import __version__
from tutorialkg.actions import PatternConfig
from tutorialkg.apis import (
    ApiDictionary,
    DictionaryFormatError,
    dictionary_from_graph,
    load_dictionary,
    recognize,
)
from tutorialkg.ingest import IngestConfig, load_corpus
from tutorialkg.match import (
    ALL_SETTINGS,
    ConfigFormatError,
    EvalInputError,
    EvalQuery,
    build_index,
    evaluate,
    parse_config,
    search,
)
from tutorialkg.model import (
    ApiKind,
    ApiRef,
    GraphParseError,
    GraphValidationError,
    KnowledgeGraph,
    load_graph,
    save_graph,
)
from tutorialkg.pipeline import build_graph

log = logging.getLogger("tutorialkg.cli")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VALIDATION = 3
EXIT_ENVIRONMENT = 4


def _resolve_refs(names: list[str], dictionary: ApiDictionary) -> list[ApiRef]:
    """Map user-supplied API names to graph refs; unknown names keep their
    fqn so the query still runs (it just cannot match anything)."""
    by_fqn = {r.fqn: r for r in dictionary.entries}
    refs: list[ApiRef] = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        if name in by_fqn:
            refs.append(by_fqn[name])
            continue
        candidates = dictionary.by_simple_name.get(name.rsplit(".", 1)[-1], [])
        if len(candidates) == 1:
            refs.append(candidates[0])
        elif len(candidates) > 1:
            raise EvalInputError(
                f"API name {name!r} is ambiguous: " + ", ".join(c.fqn for c in candidates[:5])
            )
        else:
            log.warning("API %r is not in the graph; it will match nothing", name)
            refs.append(ApiRef(fqn=name, kind=ApiKind.CLASS, declaring_class=name))
    return refs


# -- build -----------------------------------------------------------------


def cmd_build(args: argparse.Namespace) -> int:
    ingest_config = (
        IngestConfig.from_file(args.ingest_config) if args.ingest_config else IngestConfig()
    )
    pattern_config = (
        PatternConfig.from_file(args.pattern_config) if args.pattern_config else PatternConfig()
    )
    dictionary = load_dictionary(args.api_dict) if args.api_dict else ApiDictionary()
    documents = load_corpus(args.corpus, ingest_config)
    if not documents:
        log.warning("no HTML pages under %s; building an empty graph", args.corpus)
    graph = build_graph(
        documents,
        dictionary,
        ingest_config=ingest_config,
        pattern_config=pattern_config,
    )
    out = Path(args.out)
    save_graph(graph, out)
    manifest = {
        "kg": out.name,
        "corpus": str(args.corpus),
        "api_dict": str(args.api_dict) if args.api_dict else None,
        "corpus_id": graph.meta.corpus_id,
        "pages": len(documents),
        "counts": graph.meta.counts,
    }
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    actions = sum(graph.meta.counts.get("actions_by_source", {}).values())
    snippets = sum(graph.meta.counts.get("snippets_by_kind", {}).values())
    log.info("built %s: %d actions, %d snippets from %d pages", out, actions, snippets, len(documents))
    return EXIT_OK


# -- search ----------------------------------------------------------------


def _load_kg(path: str) -> KnowledgeGraph:
    return load_graph(path)


def cmd_search(args: argparse.Namespace) -> int:
    graph = _load_kg(args.kg)
    dictionary = dictionary_from_graph(graph)
    config = parse_config(args.config)
    if args.code:
        code = sys.stdin.read() if args.code == "-" else Path(args.code).read_text(encoding="utf-8")
        if not code.strip():
            log.error("query code is empty")
            return EXIT_INPUT
        refs = [m.ref for m in recognize(code, dictionary)]
    else:
        refs = _resolve_refs(args.select, dictionary)
    index = build_index(graph)
    results = search(index, refs, config, args.top)
    if args.json:
        payload = [
            {
                "rank": i,
                "snippet_id": c.snippet_id,
                "score": round(c.score, 4),
                "matched_keys": list(c.matched_keys),
                "page_uri": graph.snippets[c.snippet_id].page_uri,
                "action_ids": list(c.action_ids),
            }
            for i, c in enumerate(results, 1)
        ]
        print(json.dumps({"config": config.code, "results": payload}, indent=2))
    else:
        if not results:
            log.info("no snippet shares an API with the query")
        for i, c in enumerate(results, 1):
            snippet = graph.snippets[c.snippet_id]
            labels = "; ".join(
                graph.actions[aid].label for aid in c.action_ids[:2] if aid in graph.actions
            )
            print(f"{i}\t{c.score:.4f}\t{c.snippet_id}\t{snippet.page_uri}\t{labels}")
    return EXIT_OK


# -- eval ------------------------------------------------------------------


def _load_queries(path: str, dictionary: ApiDictionary) -> list[EvalQuery]:
    queries: list[EvalQuery] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EvalInputError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from exc
            qid = record.get("query_id")
            origin = record.get("origin")
            truth = record.get("truth_snippet_ids")
            if not qid or not isinstance(truth, list) or not truth:
                raise EvalInputError(
                    f"{path}:{lineno}: needs query_id and a non-empty truth_snippet_ids"
                )
            if origin == "all_code":
                code = record.get("code")
                if not isinstance(code, str):
                    raise EvalInputError(f"{path}:{lineno}: all_code query needs 'code'")
                refs = tuple(m.ref for m in recognize(code, dictionary))
            elif origin == "key_api":
                apis = record.get("apis")
                if not isinstance(apis, list) or not apis:
                    raise EvalInputError(f"{path}:{lineno}: key_api query needs 'apis'")
                refs = tuple(_resolve_refs([str(a) for a in apis], dictionary))
            else:
                raise EvalInputError(f"{path}:{lineno}: origin must be all_code or key_api")
            queries.append(EvalQuery(str(qid), refs, frozenset(str(t) for t in truth)))
    if not queries:
        raise EvalInputError(f"{path}: no queries")
    return queries


def cmd_eval(args: argparse.Namespace) -> int:
    graph = _load_kg(args.kg)
    dictionary = dictionary_from_graph(graph)
    queries = _load_queries(args.queries, dictionary)
    codes = list(ALL_SETTINGS) if args.config.lower() == "all" else [args.config]
    index = build_index(graph)
    rows = []
    for code in codes:
        metrics = evaluate(index, queries, parse_config(code), args.top)
        rows.append((code if code in ALL_SETTINGS else parse_config(code).code, metrics))
    if args.json:
        print(
            json.dumps(
                {
                    "queries": len(queries),
                    "top_n": args.top,
                    "rows": [
                        {"config": code, **{k: round(v, 4) for k, v in m.as_floats().items()}}
                        for code, m in rows
                    ],
                },
                indent=2,
            )
        )
    else:
        print(f"{'config':8} {'accuracy':>8} {'precision':>9} {'recall':>8} {'f1':>8}")
        for code, m in rows:
            f = m.as_floats()
            print(
                f"{code:8} {f['accuracy']:8.4f} {f['precision']:9.4f}"
                f" {f['recall']:8.4f} {f['f1']:8.4f}"
            )
    return EXIT_OK


# -- serve -----------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from tutorialkg.service import create_app

    graph = _load_kg(args.kg)
    ingest_config = (
        IngestConfig.from_file(args.ingest_config) if args.ingest_config else IngestConfig()
    )
    documents = load_corpus(args.corpus, ingest_config) if args.corpus else None
    app = create_app(graph, documents, static_dir=args.static)

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        log.error("cannot bind %s:%d: %s", args.host, args.port, exc)
        return EXIT_ENVIRONMENT
    finally:
        probe.close()

    log.info("serving on http://%s:%d", args.host, args.port)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tutorialkg",
        description="Task-oriented API usage recommendations from tutorial pages.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="extract a knowledge graph from an HTML corpus")
    p.add_argument("--corpus", required=True, help="directory of tutorial HTML pages")
    p.add_argument("--api-dict", help="API dictionary (JSON lines)")
    p.add_argument("--ingest-config", help="ingest settings JSON")
    p.add_argument("--pattern-config", help="classifier/pattern settings JSON")
    p.add_argument("--out", required=True, help="output graph JSON path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="recommend snippets for code under development")
    p.add_argument("--kg", required=True, help="graph JSON path")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--code", help="file with the code under development ('-' for stdin)")
    src.add_argument(
        "--select", action="append", default=None, metavar="API", help="key API (repeatable)"
    )
    p.add_argument("--config", default="A-B-U", help="matching setting, e.g. A-B-U")
    p.add_argument("--top", type=int, default=3, help="result count (default 3)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="top-N retrieval metrics over a query file")
    p.add_argument("--kg", required=True, help="graph JSON path")
    p.add_argument("--queries", required=True, help="queries JSON lines file")
    p.add_argument("--config", default="A-B-U", help="setting code, or 'all' for every setting")
    p.add_argument("--top", type=int, default=3, help="cutoff (default 3)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="serve recommendations and the UI over HTTP")
    p.add_argument("--kg", required=True, help="graph JSON path")
    p.add_argument("--corpus", help="corpus directory for excerpt rendering")
    p.add_argument("--ingest-config", help="ingest settings JSON")
    p.add_argument("--static", help="directory with the built UI bundle")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        log.error("missing file: %s", exc)
        return EXIT_INPUT
    except (DictionaryFormatError, GraphParseError, EvalInputError, ConfigFormatError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except GraphValidationError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
