"""Tokenizer, lemmatizer, stemmer, tagger, and sentence splitter."""

from tutorialkg.textproc import (
    ADP,
    DET,
    MODAL,
    NOUN,
    PRON,
    VERB,
    LexiconPosTagger,
    content_tokens,
    split_sentence_spans,
    stem,
    tokenize,
    verb_lemma,
)


def test_tokenize_yields_word_spans():
    toks = tokenize("Add a fragment_tag, then commit().")
    assert [t.text for t in toks] == ["Add", "a", "fragment_tag", "then", "commit"]
    for t in toks:
        assert "Add a fragment_tag, then commit().".count(t.text[0]) >= 1
        assert "Add a fragment_tag, then commit()."[t.start : t.end] == t.text


def test_tokenize_keeps_numbers_and_underscores():
    toks = tokenize("set FEATURE_NO_TITLE to 42")
    assert [t.text for t in toks] == ["set", "FEATURE_NO_TITLE", "to", "42"]


def test_verb_lemma_inflections():
    assert verb_lemma("creating") == "create"
    assert verb_lemma("creates") == "create"
    assert verb_lemma("created") == "create"
    assert verb_lemma("includes") == "include"
    assert verb_lemma("replaces") == "replace"
    assert verb_lemma("commit") == "commit"
    assert verb_lemma("Shows") == "show"


def test_verb_lemma_rejects_nouns():
    assert verb_lemma("transaction") is None
    assert verb_lemma("layout") is None
    assert verb_lemma("dialog") is None


def test_stem_agrees_across_inflection():
    assert stem("includes") == stem("include")
    assert stem("creating") == stem("create")
    assert stem("replaced") == stem("replace")
    assert stem("transactions") == stem("transaction")


def test_stem_leaves_short_words_alone():
    assert stem("add") == "add"
    assert stem("is") == "is"


def test_content_tokens_drop_stopwords_and_digits():
    got = content_tokens("Add the transaction to the back stack")
    assert got == ["add", "transaction", "back", "stack"]
    got = content_tokens("preserve the previous state in the back stack")
    assert got == ["preserve", "previous", "state", "back", "stack"]
    assert content_tokens("42 of them") == []


def test_content_tokens_keep_new():
    # "new" carries signal in phrases like "new fragment", so it stays
    assert "new" in content_tokens("Create new fragment and transaction")
    assert "whatever" not in content_tokens("Replace whatever is in the container")


def test_tagger_basic_labels():
    tagger = LexiconPosTagger()
    tokens = ["you", "can", "add", "the", "fragment", "to", "the", "activity"]
    tags = tagger.tag(tokens)
    assert tags[0] == PRON
    assert tags[1] == MODAL
    assert tags[2] == VERB
    assert tags[3] == DET
    assert tags[4] == NOUN
    assert tags[5] == ADP


def test_tagger_demotes_verb_after_determiner():
    tagger = LexiconPosTagger()
    # "display" reads as a verb alone but as a noun after a determiner
    assert tagger.tag(["display"])[0] == VERB
    assert tagger.tag(["the", "display"])[1] == NOUN


def test_tagger_keeps_infinitive_after_to():
    tagger = LexiconPosTagger()
    tags = tagger.tag(["to", "display", "the", "dialog"])
    assert tags[1] == VERB


def test_split_plain_sentences():
    spans = split_sentence_spans("Create a layout. Then inflate it.")
    assert [s.text for s in spans] == ["Create a layout.", "Then inflate it."]
    text = "Create a layout. Then inflate it."
    for s in spans:
        assert text[s.start : s.end] == s.text


def test_split_protects_abbreviations_and_numbers():
    spans = split_sentence_spans("Use e.g. the manager. Version 1.2 ships.")
    assert [s.text for s in spans] == ["Use e.g. the manager.", "Version 1.2 ships."]


def test_split_respects_protected_spans():
    text = "Call AlertDialog.Builder now. Then commit."
    dot = text.index("AlertDialog")
    spans = split_sentence_spans(text, protected=[(dot, dot + len("AlertDialog.Builder"))])
    assert [s.text for s in spans] == ["Call AlertDialog.Builder now.", "Then commit."]


def test_split_without_terminal_punctuation():
    spans = split_sentence_spans("Build the dialog layout")
    assert len(spans) == 1
    assert spans[0].text == "Build the dialog layout"


def test_split_handles_question_and_bang():
    spans = split_sentence_spans("Need a title? Remove it! Done.")
    assert [s.text for s in spans] == ["Need a title?", "Remove it!", "Done."]
