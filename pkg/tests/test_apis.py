"""API dictionary loading, code masking, and mention recognition."""

import pytest

from tutorialkg.apis import (
    DictionaryFormatError,
    build_dictionary,
    dictionary_from_graph,
    load_dictionary,
    mask_noncode,
    recognize,
)
from tutorialkg.model import ApiKind


def test_build_dictionary_first_wins_and_rejects():
    dictionary = build_dictionary(
        [
            {"fqn": "a.Foo", "kind": "class"},
            {"fqn": "a.Foo", "kind": "method", "declaring_class": "x.Y"},
            {"fqn": "a.Foo.bar", "kind": "method"},
            {"fqn": "a.Foo.baz", "kind": "method", "declaring_class": "a.Foo"},
            {"fqn": "a.Qux", "kind": "widget"},
            {"kind": "class"},
        ]
    )
    assert [r.fqn for r in dictionary.entries] == ["a.Foo", "a.Foo.baz"]
    foo = dictionary.entries[0]
    assert foo.kind is ApiKind.CLASS
    assert foo.declaring_class == "a.Foo"
    assert foo.simple_name == "Foo"
    assert dictionary.by_declaring_class["a.Foo"][0].simple_name == "baz"


def test_load_dictionary_fixture(api_dict):
    assert len(api_dict) == 27
    assert "makeText" in api_dict.by_simple_name
    assert len(api_dict.by_simple_name["makeText"]) == 2
    assert api_dict.class_names["Dialog"] == ["android.app.Dialog"]


def test_load_dictionary_reports_line_of_bad_json(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"fqn": "a.B", "kind": "class"}\nnot json\n', encoding="utf-8")
    with pytest.raises(DictionaryFormatError, match=r"bad\.jsonl:2"):
        load_dictionary(path)
    path.write_text('[1, 2]\n', encoding="utf-8")
    with pytest.raises(DictionaryFormatError, match="must be an object"):
        load_dictionary(path)


def test_mask_noncode_preserves_offsets():
    code = 'call("DialogFragment"); // show it\nint c = \'x\'; /* Dialog */ run();'
    masked = mask_noncode(code)
    assert len(masked) == len(code)
    assert masked.count("\n") == code.count("\n")
    assert "DialogFragment" not in masked
    assert "show" not in masked
    assert "Dialog" not in masked
    assert "call" in masked
    assert "run" in masked
    at = code.index("run")
    assert masked[at : at + 3] == "run"


def test_mask_noncode_handles_escapes_and_unterminated():
    assert "y" not in mask_noncode(r'a = "x \" y";')
    # an unterminated string masks to the end of its line only
    masked = mask_noncode('s = "oops\nnext();')
    assert "next" in masked


def test_recognize_unique_names_match_bare(api_dict):
    mentions = recognize("inflater.inflate(resource, root);", api_dict)
    assert [m.ref.fqn for m in mentions] == ["android.view.LayoutInflater.inflate"]
    assert mentions[0].confidence == "exact"
    lo, hi = mentions[0].span
    assert "inflater.inflate(resource, root);"[lo:hi] == "inflate"


def test_recognize_member_needs_declaring_class_nearby(api_dict):
    # two makeText owners exist, so the bare name stays unresolved
    assert recognize("makeText(context, text, duration);", api_dict) == []
    mentions = recognize("Toast.makeText(context, text, duration);", api_dict)
    fqns = [m.ref.fqn for m in mentions]
    assert "android.widget.Toast" in fqns
    assert "android.widget.Toast.makeText" in fqns
    make = next(m for m in mentions if m.ref.simple_name == "makeText")
    assert make.confidence == "disambiguated"


def test_recognize_receiver_narrows_member_set(api_dict):
    mentions = recognize("Snackbar.makeText(view, text, length);", api_dict)
    make = next(m for m in mentions if m.ref.simple_name == "makeText")
    assert make.ref.declaring_class == "com.google.android.material.snackbar.Snackbar"


def test_recognize_member_via_cooccurring_class_token(api_dict):
    # "show" belongs to both Dialog and DialogFragment; only DialogFragment
    # appears in the code, so that owner wins
    mentions = recognize("DialogFragment df = make();\ndf.show(manager, tag);", api_dict)
    fqns = [m.ref.fqn for m in mentions]
    assert "android.app.DialogFragment.show" in fqns
    # with both owners in scope the bare call is ambiguous and drops
    both = recognize("Dialog d; DialogFragment df; show(x);", api_dict)
    assert "show" not in [m.ref.simple_name for m in both]


def test_recognize_class_disambiguated_by_member():
    dictionary = build_dictionary(
        [
            {"fqn": "a.Foo", "kind": "class"},
            {"fqn": "b.Foo", "kind": "class"},
            {"fqn": "a.Foo.bar", "kind": "method", "declaring_class": "a.Foo"},
        ]
    )
    assert recognize("Foo x;", dictionary) == []
    mentions = recognize("Foo x; x.bar();", dictionary)
    assert [m.ref.fqn for m in mentions] == ["a.Foo", "a.Foo.bar"]
    assert mentions[0].confidence == "disambiguated"


def test_recognize_preserves_multiplicity_and_span_order(api_dict):
    code = "Dialog d = new Dialog(getActivity());"
    mentions = recognize(code, api_dict)
    assert [m.ref.simple_name for m in mentions] == ["Dialog", "Dialog"]
    assert mentions[0].span[0] < mentions[1].span[0]


def test_recognize_ignores_masked_regions(api_dict):
    assert recognize('log("Dialog"); // Dialog', api_dict) == []


def test_recognize_q9_method(api_dict, q9_code):
    fqns = [m.ref.fqn for m in recognize(q9_code, api_dict)]
    assert fqns == [
        "android.app.Dialog",
        "android.app.Dialog",
        "android.view.LayoutInflater",
        "android.app.Dialog.setContentView",
        "android.view.LayoutInflater.inflate",
    ]


def test_dictionary_from_graph_covers_stored_refs(golden_graph):
    derived = dictionary_from_graph(golden_graph)
    names = {r.fqn for r in derived.entries}
    assert "android.view.Window.FEATURE_NO_TITLE" in names
    assert "androidx.fragment.app.FragmentTransaction.replace" in names
    # the derivation deduplicates: one entry per fqn
    assert len(names) == len(derived.entries)
