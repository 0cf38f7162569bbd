import random

import pytest
from hypothesis import given, strategies as st

from ancientnlp.corpus_io import Corpus, Sentence, TokenRecord, parse_conllu
from ancientnlp.errors import AlignmentError, EmptyForm, InapplicableRule, MalformedLabel, TrainingDataEmpty
from ancientnlp.lemma import (
    LemmaModel,
    LemmaRule,
    apply_rule,
    apply_rule_labels,
    induce_rule,
    lemmatize_corpus,
    predict_lemmas,
    train_lemmatizer,
    train_lemmatizer_pairs,
)


def brute_force_anchor(form, lemma):
    """Longest common substring by enumerating every substring of ``form``."""
    best = None
    for n in range(len(form), 0, -1):
        for i in range(len(form) - n + 1):
            j = lemma.find(form[i : i + n])
            if j >= 0:
                best = (i, j, n)
                break
        if best:
            return best
    return (0, 0, 0)


def corpus_of(pairs):
    sent = Sentence([TokenRecord(i + 1, f, l) for i, (f, l) in enumerate(pairs)])
    return Corpus(sentences=[sent])


# -- rules ------------------------------------------------------------------

def test_induce_running():
    assert induce_rule("running", "run") == LemmaRule.relative("", "", "ning", "")


def test_induce_went_is_absolute():
    assert brute_force_anchor("went", "go")[2] < 2
    assert induce_rule("went", "go") == LemmaRule.absolute("go")


def test_induce_identity():
    assert induce_rule("cat", "cat") == LemmaRule.relative()


def test_induce_prefix_and_suffix_edit():
    rule = induce_rule("gegangen", "gehen")
    assert rule.apply("gegangen") == "gehen"
    i, j, n = brute_force_anchor("gegangen", "gehen")
    assert rule == LemmaRule.relative("gegangen"[:i], "gehen"[:j], "gegangen"[i + n :], "gehen"[j + n :])


def test_induce_empty_form():
    with pytest.raises(EmptyForm):
        induce_rule("", "x")


def test_apply_examples():
    rule = LemmaRule.relative("", "", "ning", "")
    assert apply_rule(rule, "running") == "run"
    assert apply_rule(LemmaRule.absolute("go"), "anything") == "go"
    with pytest.raises(InapplicableRule):
        apply_rule(rule, "cats")


def test_apply_requires_room_for_both_edits():
    rule = LemmaRule.relative("ab", "", "ba", "")
    with pytest.raises(InapplicableRule):
        rule.apply("aba")
    assert rule.apply("abba") == ""


def test_anchor_matches_brute_force():
    rng = random.Random(11)
    for _ in range(2000):
        form = "".join(rng.choice("abc") for _ in range(rng.randint(1, 9)))
        lemma = "".join(rng.choice("abc") for _ in range(rng.randint(0, 9)))
        i, j, n = brute_force_anchor(form, lemma)
        rule = induce_rule(form, lemma)
        if n < 2:
            assert rule.kind == "absolute"
        else:
            assert (rule.form_prefix, rule.form_suffix) == (form[:i], form[i + n :])
            assert (rule.lemma_prefix, rule.lemma_suffix) == (lemma[:j], lemma[j + n :])


_text = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=10)


@given(_text.filter(bool), _text)
def test_self_consistency(form, lemma):
    assert induce_rule(form, lemma).apply(form) == lemma


@given(_text.filter(bool), _text)
def test_label_round_trip(form, lemma):
    rule = induce_rule(form, lemma)
    assert LemmaRule.from_label(rule.to_label()) == rule


def test_label_escaping():
    rule = LemmaRule.relative("a|", "→b", "\\", "x|→")
    label = rule.to_label()
    assert label.count("|") == 3
    assert LemmaRule.from_label(label) == rule
    assert LemmaRule.absolute("a|b→c").to_label() == "A:a|b→c"


@pytest.mark.parametrize("label", ["", "X:abc", "R:a→b", "R:a|b→c→d", "R:a\\qb→|→"])
def test_malformed_labels(label):
    with pytest.raises(MalformedLabel):
        LemmaRule.from_label(label)


# -- training / prediction --------------------------------------------------

def test_inventory_example():
    model = train_lemmatizer(corpus_of([("running", "run"), ("walked", "walk")]))
    assert set(model.form_table) == {"running", "walked"}
    assert model.suffix_table["ed"] == LemmaRule.relative("", "", "ed", "")


def test_dictionary_mode():
    model = train_lemmatizer(corpus_of([("之", "之")]), mode="dictionary")
    assert model.predict("之") == "之"
    assert model.predict("也") == "也"


def test_empty_training():
    with pytest.raises(TrainingDataEmpty):
        train_lemmatizer(Corpus())
    with pytest.raises(TrainingDataEmpty):
        train_lemmatizer(corpus_of([("a", "")]))


def test_predict_seen_form():
    model = train_lemmatizer_pairs([("running", "run")])
    assert predict_lemmas(model, ["running"]) == ["run"]


def test_predict_suffix_backoff():
    model = train_lemmatizer_pairs([("walked", "walk")])
    # "talked" unseen: suffixes "alked" ... "ed" all map to the rule -ed -> ""
    assert model.predict("talked") == "talk"


def test_predict_identity_fallback():
    model = train_lemmatizer_pairs([("walked", "walk")])
    assert model.predict("xyz") == "xyz"


def test_inapplicable_suffix_rule_falls_through():
    # suffix "s" maps to a rule with prefix edit "un"; "cats" does not start with it
    model = train_lemmatizer_pairs([("unhappys", "happy"), ("dogs", "dog"), ("unkinds", "kind")])
    assert model.suffix_table["s"].form_prefix == "un"
    assert model.predict("cats") == "cats"


def test_majority_and_tie_break():
    model = train_lemmatizer_pairs([("est", "sum"), ("est", "edo"), ("est", "sum")])
    assert model.predict("est") == "sum"
    tie = train_lemmatizer_pairs([("est", "sum"), ("est", "edo")], mode="dictionary")
    assert tie.predict("est") == "edo"


def test_seen_form_accuracy_on_fixture(sample_text):
    corpus = parse_conllu(sample_text)
    model = train_lemmatizer(corpus)
    for tok in corpus.tokens():
        assert model.predict(tok.form) == tok.lemma


def test_dictionary_accuracy_matches_brute_force():
    rng = random.Random(5)
    forms = [f"f{i}" for i in range(30)]
    train = [(f, rng.choice(["x", "y", "z"])) for f in rng.choices(forms, k=200)]
    test = [(f, rng.choice(["x", "y", "z"])) for f in rng.choices(forms + ["new1", "new2"], k=100)]
    model = train_lemmatizer_pairs(train, mode="dictionary")
    acc = sum(model.predict(f) == l for f, l in test) / len(test)

    counts = {}
    for f, l in train:
        counts.setdefault(f, {}).setdefault(l, 0)
        counts[f][l] += 1
    majority = {f: sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[0][0] for f, c in counts.items()}
    expected = sum(1 for f, l in test if majority.get(f, f) == l) / len(test)
    assert acc == expected


def test_model_json_round_trip(sample_text):
    model = train_lemmatizer(parse_conllu(sample_text))
    again = LemmaModel.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    assert again.form_table == model.form_table


def test_lemmatize_corpus_copies(sample_text):
    corpus = parse_conllu(sample_text)
    model = train_lemmatizer(corpus)
    for tok in corpus.tokens():
        tok.lemma = ""
    out = lemmatize_corpus(model, corpus)
    assert all(t.lemma == "" for t in corpus.tokens())
    assert [t.lemma for t in out.sentences[0].tokens][:2] == ["Gallia", "sum"]


def test_external_rule_labels():
    corpus = corpus_of([("running", "_"), ("went", "_"), ("cats", "_")])
    labels = {0: "R:→|ning→", 1: "A:go", 2: "R:→|ning→"}
    assert apply_rule_labels(corpus, labels) == [["run", "go", "cats"]]
    with pytest.raises(AlignmentError):
        apply_rule_labels(corpus, {0: "A:x"})
