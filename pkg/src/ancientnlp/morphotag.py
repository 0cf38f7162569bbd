"""Joint POS + morphology labels and a lookup/backoff baseline tagger.

The UPOS tag and the full feature bundle of a token are fused into one class
string ("NOUN|Case=Nom|Number=Sing"), features sorted by name, so a tagger
only ever predicts combinations it has seen.
"""
from __future__ import annotations

import os
from collections import Counter, defaultdict
from copy import deepcopy
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import persist
from .corpus_io import Corpus, Sentence
from .errors import AlignmentError, InvalidLabelField, MalformedLabel, TrainingDataEmpty

SEP = "|"
MAX_SUFFIX = 5


@dataclass(frozen=True)
class MorphLabel:
    upos: str
    feats: Mapping[str, str] = field(default_factory=dict)

    def __str__(self):
        return compose_label(self.upos, self.feats)

    def __eq__(self, other):
        if not isinstance(other, MorphLabel):
            return NotImplemented
        return self.upos == other.upos and dict(self.feats) == dict(other.feats)

    def __hash__(self):
        return hash(str(self))

    @classmethod
    def parse(cls, label: str) -> "MorphLabel":
        return cls(*decompose_label(label))


def compose_label(upos: str, feats: Mapping[str, str]) -> str:
    if not upos or SEP in upos:
        raise InvalidLabelField(f"bad UPOS {upos!r}")
    parts = [upos]
    for name in sorted(feats):
        value = feats[name]
        if not name or SEP in name or "=" in name or SEP in value:
            raise InvalidLabelField(f"bad feature {name!r}={value!r}")
        parts.append(f"{name}={value}")
    return SEP.join(parts)


def decompose_label(label: str) -> tuple[str, dict[str, str]]:
    if not label:
        raise MalformedLabel("empty label")
    upos, *segments = label.split(SEP)
    if not upos:
        raise MalformedLabel(f"label {label!r} has no UPOS")
    feats = {}
    for seg in segments:
        name, eq, value = seg.partition("=")
        if not eq or not name or name in feats:
            raise MalformedLabel(f"bad feature segment {seg!r} in {label!r}")
        feats[name] = value
    return upos, feats


def _majority(counts: Mapping[str, int]) -> str:
    return min(counts, key=lambda k: (-counts[k], k))


class TagModel:
    def __init__(self, form_counts, suffix_counts, global_counts):
        self.form_counts = {k: dict(v) for k, v in form_counts.items()}
        self.suffix_counts = {k: dict(v) for k, v in suffix_counts.items()}
        self.global_counts = dict(global_counts)
        self.form_table = {k: _majority(v) for k, v in self.form_counts.items()}
        self.suffix_table = {k: _majority(v) for k, v in self.suffix_counts.items()}
        self.global_fallback = _majority(self.global_counts)

    @property
    def labels(self) -> set[str]:
        return set(self.global_counts)

    def predict_label(self, form: str) -> str:
        hit = self.form_table.get(form)
        if hit is not None:
            return hit
        for n in range(min(MAX_SUFFIX, len(form)), 0, -1):
            hit = self.suffix_table.get(form[-n:])
            if hit is not None:
                return hit
        return self.global_fallback

    def to_json(self) -> str:
        doc = persist.header("tagger")
        doc.update(form_counts=self.form_counts, suffix_counts=self.suffix_counts, global_counts=self.global_counts)
        return persist.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "TagModel":
        doc = persist.loads(text, "tagger")
        return cls(doc["form_counts"], doc["suffix_counts"], doc["global_counts"])

    def save(self, path: str | os.PathLike) -> None:
        persist.write_text(path, self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "TagModel":
        return cls.from_json(persist.read_text(path))


def train_tagger_pairs(pairs: Iterable[tuple[str, str]]) -> TagModel:
    """Train from (form, composed label) pairs."""
    form_counts: dict[str, Counter] = defaultdict(Counter)
    suffix_counts: dict[str, Counter] = defaultdict(Counter)
    global_counts: Counter = Counter()
    for form, label in pairs:
        form_counts[form][label] += 1
        global_counts[label] += 1
        for n in range(1, min(MAX_SUFFIX, len(form)) + 1):
            suffix_counts[form[-n:]][label] += 1
    if not global_counts:
        raise TrainingDataEmpty("no UPOS-annotated tokens")
    return TagModel(form_counts, suffix_counts, global_counts)


def train_tagger(corpus: Corpus) -> TagModel:
    pairs = ((t.form, compose_label(t.upos, t.feats)) for t in corpus.tokens() if t.upos)
    return train_tagger_pairs(pairs)


def predict_tags(model: TagModel, sentence: Sentence | Iterable[str]) -> list[MorphLabel]:
    forms = sentence.forms if isinstance(sentence, Sentence) else list(sentence)
    return [MorphLabel.parse(model.predict_label(f)) for f in forms]


def _write_labels(corpus: Corpus, labels: Iterable[Iterable[MorphLabel]]) -> Corpus:
    out = deepcopy(corpus)
    for sent, sent_labels in zip(out.sentences, labels):
        for tok, lab in zip(sent.tokens, sent_labels):
            tok.upos = lab.upos
            tok.feats = dict(sorted(lab.feats.items()))
    return out


def tag_corpus(model: TagModel, corpus: Corpus) -> Corpus:
    """Copy of ``corpus`` with UPOS and FEATS predicted for every word token."""
    return _write_labels(corpus, (predict_tags(model, s) for s in corpus.sentences))


def apply_tag_labels(corpus: Corpus, labels: Mapping[int, str]) -> Corpus:
    """Copy of ``corpus`` annotated from externally predicted label strings.

    ``labels`` maps the corpus-wide 0-based token index to a composed label.
    """
    n_tokens = sum(len(s.tokens) for s in corpus.sentences)
    if len(labels) != n_tokens:
        raise AlignmentError(f"{len(labels)} predicted labels for {n_tokens} tokens")
    per_sentence = []
    idx = 0
    for sent in corpus.sentences:
        row = []
        for _ in sent.tokens:
            if idx not in labels:
                raise AlignmentError(f"no predicted label for token index {idx}")
            row.append(MorphLabel.parse(labels[idx]))
            idx += 1
        per_sentence.append(row)
    return _write_labels(corpus, per_sentence)
