"""CLI subcommands, output formats, and exit codes."""

import io
import json
import socket
import sys

import pytest

from tutorialkg.cli import (
    EXIT_ENVIRONMENT,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_VALIDATION,
    main,
)
from tutorialkg.match import ALL_SETTINGS
from tutorialkg.model import load_graph

from conftest import FIXTURES, Q9_CODE, snippet_by

GOLDEN = str(FIXTURES / "golden_kg.json")
CORPUS = str(FIXTURES / "corpus")
API_DICT = str(FIXTURES / "api_dict.jsonl")
QUERIES = str(FIXTURES / "queries.jsonl")


@pytest.fixture()
def q9_file(tmp_path):
    path = tmp_path / "q9.java"
    path.write_text(Q9_CODE, encoding="utf-8")
    return str(path)


def test_build_writes_graph_and_manifest(tmp_path, monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    out = tmp_path / "kg.json"
    code = main(["build", "--corpus", CORPUS, "--api-dict", API_DICT, "--out", str(out)])
    assert code == EXIT_OK
    assert out.read_text(encoding="utf-8") == (FIXTURES / "golden_kg.json").read_text(
        encoding="utf-8"
    )
    manifest = json.loads((tmp_path / "kg.json.manifest.json").read_text(encoding="utf-8"))
    graph = load_graph(out)
    assert manifest["kg"] == "kg.json"
    assert manifest["pages"] == 3
    assert manifest["corpus_id"] == graph.meta.corpus_id
    assert manifest["counts"] == graph.meta.counts
    assert manifest["api_dict"] == API_DICT


def test_build_empty_corpus_still_writes(tmp_path):
    out = tmp_path / "kg.json"
    code = main(["build", "--corpus", str(tmp_path / "nowhere"), "--out", str(out)])
    assert code == EXIT_OK
    assert load_graph(out).actions == {}


def test_search_human_rows(capsys, q9_file):
    code = main(["search", "--kg", GOLDEN, "--code", q9_file])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    rows = [line.split("\t") for line in lines]
    assert [r[0] for r in rows] == ["1", "2", "3"]
    assert [r[1] for r in rows] == ["1.8333", "1.2500", "1.2000"]
    assert rows[0][3] == "layouts.html"
    assert rows[0][4] == "create layout file; inflate layout"


def test_search_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(Q9_CODE))
    assert main(["search", "--kg", GOLDEN, "--code", "-"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3


def test_search_select_json(capsys, golden_graph):
    code = main(
        [
            "search",
            "--kg",
            GOLDEN,
            "--select",
            "FEATURE_NO_TITLE",
            "--config",
            "c-s-u",
            "--json",
        ]
    )
    assert code == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["config"] == "C-S-U"
    fragment = snippet_by(golden_graph, "dialogs.html", "comment_fragment")
    first = body["results"][0]
    assert first["snippet_id"] == fragment.id
    # class set {Dialog, DialogFragment, Window}, one matched: 4/3
    assert first["score"] == 1.3333
    assert first["page_uri"] == "dialogs.html"
    assert first["action_ids"]


def test_search_unknown_select_matches_nothing(capsys):
    assert main(["search", "--kg", GOLDEN, "--select", "java.util.List"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == ""


def test_search_empty_code_is_input_error(tmp_path):
    empty = tmp_path / "empty.java"
    empty.write_text("   \n", encoding="utf-8")
    assert main(["search", "--kg", GOLDEN, "--code", str(empty)]) == EXIT_INPUT


def test_search_bad_config_is_input_error(q9_file):
    assert main(["search", "--kg", GOLDEN, "--code", q9_file, "--config", "Z-B-U"]) == EXIT_INPUT


def test_missing_files_are_input_errors(tmp_path, q9_file):
    assert main(["search", "--kg", str(tmp_path / "no.json"), "--code", q9_file]) == EXIT_INPUT
    assert main(["eval", "--kg", GOLDEN, "--queries", str(tmp_path / "no.jsonl")]) == EXIT_INPUT


def test_eval_all_settings_table(capsys):
    assert main(["eval", "--kg", GOLDEN, "--queries", QUERIES, "--config", "all"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split()[0] == "config"
    rows = [line.split() for line in lines[1:]]
    assert [r[0] for r in rows] == list(ALL_SETTINGS)
    for row in rows:
        assert row[1:] == ["0.5000", "0.1667", "0.5000", "0.2500"]


def test_eval_single_setting_json(capsys):
    code = main(
        ["eval", "--kg", GOLDEN, "--queries", QUERIES, "--config", "C-S-M", "--json"]
    )
    assert code == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["queries"] == 4
    assert body["top_n"] == 3
    assert body["rows"] == [
        {
            "config": "C-S-M",
            "accuracy": 0.5,
            "precision": 0.1667,
            "recall": 0.5,
            "f1": 0.25,
        }
    ]


def test_eval_reports_bad_query_line(tmp_path, caplog):
    path = tmp_path / "queries.jsonl"
    path.write_text(
        '{"query_id": "q1", "origin": "key_api", "apis": ["View"], "truth_snippet_ids": ["s1"]}\n'
        "this is not json\n",
        encoding="utf-8",
    )
    assert main(["eval", "--kg", GOLDEN, "--queries", str(path)]) == EXIT_INPUT
    assert any(":2:" in r.message for r in caplog.records)


def test_eval_rejects_empty_truth(tmp_path):
    path = tmp_path / "queries.jsonl"
    path.write_text(
        '{"query_id": "q1", "origin": "key_api", "apis": ["View"], "truth_snippet_ids": []}\n',
        encoding="utf-8",
    )
    assert main(["eval", "--kg", GOLDEN, "--queries", str(path)]) == EXIT_INPUT


def test_eval_rejects_unknown_origin(tmp_path):
    path = tmp_path / "queries.jsonl"
    path.write_text(
        '{"query_id": "q1", "origin": "guess", "truth_snippet_ids": ["s1"]}\n',
        encoding="utf-8",
    )
    assert main(["eval", "--kg", GOLDEN, "--queries", str(path)]) == EXIT_INPUT


def test_corrupt_graph_is_validation_error(tmp_path, q9_file):
    doc = json.loads((FIXTURES / "golden_kg.json").read_text(encoding="utf-8"))
    doc["relations"].append({"kind": "hierarchical", "src": "ghost", "dst": "phantom"})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["search", "--kg", str(bad), "--code", q9_file]) == EXIT_VALIDATION


def test_unparsable_graph_is_input_error(tmp_path, q9_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["search", "--kg", str(bad), "--code", q9_file]) == EXIT_INPUT
    bad.write_text('{"version": 99}', encoding="utf-8")
    assert main(["search", "--kg", str(bad), "--code", q9_file]) == EXIT_INPUT


def test_serve_occupied_port_is_environment_error():
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        code = main(["serve", "--kg", GOLDEN, "--port", str(port)])
        assert code == EXIT_ENVIRONMENT
    finally:
        blocker.close()


def test_argparse_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["search", "--kg", GOLDEN])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["search", "--kg", GOLDEN, "--code", "f", "--select", "X"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "tutorialkg 0.1.0" in capsys.readouterr().out
