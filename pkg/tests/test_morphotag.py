import pytest
from hypothesis import given, strategies as st

from ancientnlp.corpus_io import Corpus, Sentence, TokenRecord, parse_conllu, serialize_conllu
from ancientnlp.errors import AlignmentError, InvalidLabelField, MalformedLabel, TrainingDataEmpty
from ancientnlp.morphotag import (
    MorphLabel,
    TagModel,
    apply_tag_labels,
    compose_label,
    decompose_label,
    predict_tags,
    tag_corpus,
    train_tagger,
)


def corpus_of(rows):
    toks = [TokenRecord(i + 1, form, upos=upos, feats=dict(feats)) for i, (form, upos, feats) in enumerate(rows)]
    return Corpus(sentences=[Sentence(toks)])


def test_compose_sorts_features():
    assert compose_label("NOUN", {"Number": "Sing", "Case": "Nom"}) == "NOUN|Case=Nom|Number=Sing"


def test_compose_no_features():
    assert compose_label("PUNCT", {}) == "PUNCT"


@pytest.mark.parametrize(
    "upos, feats",
    [("X", {"A|B": "1"}), ("X", {"A": "1|2"}), ("", {}), ("N|V", {}), ("X", {"A=B": "1"})],
)
def test_compose_rejects_separator(upos, feats):
    with pytest.raises(InvalidLabelField):
        compose_label(upos, feats)


def test_decompose_examples():
    assert decompose_label("NOUN|Case=Nom|Number=Sing") == ("NOUN", {"Case": "Nom", "Number": "Sing"})
    assert decompose_label("PUNCT") == ("PUNCT", {})


@pytest.mark.parametrize("label", ["", "NOUN|Case", "|Case=Nom", "NOUN|=x", "NOUN|A=1|A=2"])
def test_decompose_malformed(label):
    with pytest.raises(MalformedLabel):
        decompose_label(label)


_name = st.from_regex(r"[A-Z][a-z]{0,6}(\[[a-z]+\])?", fullmatch=True)
_value = st.from_regex(r"[A-Z0-9][a-z0-9]{0,5}(,[A-Z][a-z]{0,3})?", fullmatch=True)
_upos = st.sampled_from(["ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"])


@given(_upos, st.dictionaries(_name, _value, max_size=8))
def test_round_trip(upos, feats):
    assert decompose_label(compose_label(upos, feats)) == (upos, feats)


@given(_upos, st.dictionaries(_name, _value, max_size=8), st.randoms())
def test_compose_ignores_input_order(upos, feats, rnd):
    items = list(feats.items())
    rnd.shuffle(items)
    assert compose_label(upos, dict(items)) == compose_label(upos, feats)


def test_majority_label():
    model = train_tagger(corpus_of([("cat", "NOUN", {}), ("cat", "NOUN", {}), ("cat", "VERB", {})]))
    assert model.form_table["cat"] == "NOUN"


def test_single_token_global_fallback():
    model = train_tagger(corpus_of([("est", "AUX", {"Mood": "Ind"})]))
    assert model.global_fallback == "AUX|Mood=Ind"


def test_empty_training():
    with pytest.raises(TrainingDataEmpty):
        train_tagger(Corpus())
    with pytest.raises(TrainingDataEmpty):
        train_tagger(corpus_of([("x", "", {})]))


def test_predict_backoff_levels():
    model = train_tagger(
        corpus_of(
            [
                ("running", "VERB", {"VerbForm": "Ger"}),
                ("singing", "VERB", {"VerbForm": "Ger"}),
                ("the", "DET", {}),
                ("dog", "NOUN", {}),
                ("cat", "NOUN", {}),
                ("cow", "NOUN", {}),
            ]
        )
    )
    labels = predict_tags(model, ["dog", "talking", "xyz"])
    assert labels[0] == MorphLabel("NOUN")
    # "talking" unseen: longest shared suffix with training is "ing"
    assert labels[1] == MorphLabel("VERB", {"VerbForm": "Ger"})
    assert labels[2] == MorphLabel("NOUN")


def test_tie_break_lexicographic():
    model = train_tagger(corpus_of([("x", "VERB", {}), ("x", "NOUN", {})]))
    assert model.form_table["x"] == "NOUN"


def test_label_space_closed(sample_text):
    corpus = parse_conllu(sample_text)
    model = train_tagger(corpus)
    seen = {compose_label(t.upos, t.feats) for t in corpus.tokens()}
    for form in ["Galliae", "xyz", "legibus", "amant", "a"]:
        assert str(predict_tags(model, [form])[0]) in seen


def test_tag_corpus_reproduces_training(sample_text):
    corpus = parse_conllu(sample_text)
    out = tag_corpus(train_tagger(corpus), corpus)
    # every form in the fixture has a single analysis
    assert [(t.upos, t.feats) for t in out.tokens()] == [(t.upos, t.feats) for t in corpus.tokens()]
    again = parse_conllu(serialize_conllu(out))
    assert [t.form for t in again.tokens()] == [t.form for t in corpus.tokens()]


def test_external_labels():
    corpus = corpus_of([("a", "", {}), ("b", "", {})])
    out = apply_tag_labels(corpus, {0: "NOUN|Number=Sing", 1: "PUNCT"})
    assert [(t.upos, t.feats) for t in out.tokens()] == [("NOUN", {"Number": "Sing"}), ("PUNCT", {})]
    with pytest.raises(AlignmentError):
        apply_tag_labels(corpus, {0: "NOUN"})


def test_json_round_trip(sample_text):
    model = train_tagger(parse_conllu(sample_text))
    again = TagModel.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    assert again.global_fallback == model.global_fallback
