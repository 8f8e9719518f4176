"""Activity classification and verb/object/attribute extraction."""

import json

import pytest

from tutorialkg.actions import (
    PatternConfig,
    RuleBasedActivityClassifier,
    SentenceRecord,
    build_classifier,
    extract_action_phrase,
    extract_attributes,
    split_sentences,
)
from tutorialkg.model import ActionSource


@pytest.fixture(scope="module")
def clf():
    return RuleBasedActivityClassifier()


def _text(s, **kw):
    return SentenceRecord(text=s, source=ActionSource.TEXT, **kw)


def _comment(s, **kw):
    return SentenceRecord(text=s, source=ActionSource.COMMENT, **kw)


def test_classifier_imperative_sentence(clf):
    assert clf.classify(
        _text("replace one fragment with another, and preserve the previous state to the back stack")
    )


def test_classifier_modal_sentence(clf):
    assert clf.classify(
        _text("you can remove the dialog title, but you must call the superclass to get the Dialog")
    )


def test_classifier_rejects_reading_pointer(clf):
    assert not clf.classify(_text("you can learn more about the other app components"))


def test_classifier_stoplist_applies_to_imperatives_too(clf):
    assert not clf.classify(_text("See the API reference for details."))
    assert not clf.classify(_text("Note the difference between the two."))
    assert not clf.classify(_text("Learn about fragments."))


def test_classifier_modal_variants(clf):
    assert clf.classify(_text("you need to add the fragment to the activity"))
    assert clf.classify(_text("you must commit the transaction"))
    assert not clf.classify(_text("you can see the result in the log"))


def test_classifier_rejects_declaratives(clf):
    assert not clf.classify(_text("A layout defines the structure for a user interface in your app."))
    assert not clf.classify(_text("The dialog appears when the activity starts."))


def test_classifier_comment_verbs_may_be_inflected(clf):
    assert clf.classify(_comment("Creates the dialog and shows it."))
    # prose requires the bare imperative form
    assert not clf.classify(_text("Creates the dialog and shows it."))


def test_classifier_skips_leading_discourse_words(clf):
    assert clf.classify(_text("Then commit the transaction."))


def test_classifier_empty_and_verbless(clf):
    assert not clf.classify(_text(""))
    assert not clf.classify(_text("The back stack."))


def test_phrase_coordinated_clauses():
    phrases = extract_action_phrase(
        "replace one fragment with another, and preserve the previous state to the back stack"
    )
    assert [(p.verb, p.object) for p in phrases] == [
        ("replace", "fragment"),
        ("preserve", "previous state"),
    ]


def test_phrase_drops_determiners():
    phrases = extract_action_phrase("Commit the transaction")
    assert [(p.verb, p.object) for p in phrases] == [("commit", "transaction")]


def test_phrase_empty_input():
    assert extract_action_phrase("") == []


def test_phrase_pronoun_object_is_empty():
    phrases = extract_action_phrase("Commit it.")
    assert [(p.verb, p.object) for p in phrases] == [("commit", "")]


def test_phrase_modal_prefix_stripped():
    phrases = extract_action_phrase("you can remove the dialog title")
    assert [(p.verb, p.object) for p in phrases] == [("remove", "dialog title")]


def test_phrase_goal_after_main_clause():
    phrases = extract_action_phrase("Call the superclass to get the Dialog")
    assert len(phrases) == 1
    assert phrases[0].verb == "call"
    assert phrases[0].goal == "get the Dialog"


def test_phrase_prepositional_to_is_not_a_goal():
    attrs = extract_attributes("add the transaction to the back stack")
    assert attrs["goal"] is None


def test_attributes_leading_condition():
    attrs = extract_attributes("If you want to replace one fragment with another, call replace()")
    assert attrs["condition"] == "you want to replace one fragment with another"


def test_attributes_leading_location():
    phrases = extract_action_phrase("In your onCreateDialog callback, remove the dialog title")
    assert len(phrases) == 1
    assert phrases[0].verb == "remove"
    assert phrases[0].object == "dialog title"
    assert phrases[0].location == "your onCreateDialog callback"


def test_attributes_location_inside_clause():
    attrs = extract_attributes("Add the fragment in the activity")
    assert attrs["location"] == "the activity"


def test_attributes_location_matching_object_suppressed():
    attrs = extract_attributes("Add the fragment in the fragment")
    assert attrs["location"] is None


def test_attributes_filter_by_object():
    sentence = "replace one fragment with another, and preserve the previous state to the back stack"
    attrs = extract_attributes(sentence, action_object="previous state")
    assert attrs == {"condition": None, "goal": None, "location": None}


def test_comment_record_splits_into_units():
    phrases = extract_action_phrase(
        "Remove the dialog title. Call the superclass to get the Dialog.",
        source=ActionSource.COMMENT,
    )
    assert [(p.verb, p.object) for p in phrases] == [
        ("remove", "dialog title"),
        ("call", "superclass"),
    ]


def test_split_sentences_text_positions_and_spans():
    text = "Create a layout. Then inflate LayoutInflater here."
    at = text.index("LayoutInflater")
    records = split_sentences(text, spans=[(at, at + len("LayoutInflater"))])
    assert [r.position for r in records] == [0, 1]
    assert records[0].spans == ()
    (lo, hi), = records[1].spans
    assert records[1].text[lo:hi] == "LayoutInflater"


def test_split_sentences_heading_is_one_record():
    records = split_sentences(
        "Showing a Dialog Fullscreen or as an Embedded Fragment. Extra.",
        source=ActionSource.HEADING,
    )
    assert len(records) == 1
    assert records[0].position == 0


def test_split_sentences_blank():
    assert split_sentences("   ") == []


def test_build_classifier_registry():
    clf = build_classifier(PatternConfig())
    assert isinstance(clf, RuleBasedActivityClassifier)
    with pytest.raises(ValueError, match="unknown classifier"):
        build_classifier(PatternConfig(classifier="nope"))


def test_pattern_config_from_file(tmp_path):
    path = tmp_path / "patterns.json"
    path.write_text(json.dumps({"stoplist": ["skip"], "location_preps": ["in"]}), encoding="utf-8")
    cfg = PatternConfig.from_file(path)
    assert cfg.stoplist == ["skip"]
    assert cfg.location_preps == ["in"]
    assert cfg.classifier == "rule_default"
    clf = build_classifier(cfg)
    assert clf.classify(_text("See the guide."))
    assert not clf.classify(_text("Skip the intro."))
