"""Edit-script lemmatization.

A form/lemma pair is turned into a rule that keeps their longest common
substring and rewrites what surrounds it (a prefix edit and a suffix edit).
Pairs without a common substring of length 2 get an absolute rule that
simply names the lemma.  Rules serialize to single-string labels, so any
token classifier can predict them; the baseline here predicts by exact form
lookup with suffix backoff.
"""
from __future__ import annotations

import os
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import persist
from .corpus_io import Corpus, Sentence
from .errors import AlignmentError, EmptyForm, InapplicableRule, MalformedLabel, TrainingDataEmpty

MIN_ANCHOR = 2
MAX_SUFFIX = 5
ARROW = "→"
BAR = "|"
_ESCAPED = ("\\", ARROW, BAR)


@dataclass(frozen=True)
class LemmaRule:
    kind: str  # "absolute" | "relative"
    lemma: str = ""
    form_prefix: str = ""
    lemma_prefix: str = ""
    form_suffix: str = ""
    lemma_suffix: str = ""

    @classmethod
    def absolute(cls, lemma: str) -> "LemmaRule":
        return cls("absolute", lemma=lemma)

    @classmethod
    def relative(cls, form_prefix="", lemma_prefix="", form_suffix="", lemma_suffix="") -> "LemmaRule":
        return cls("relative", "", form_prefix, lemma_prefix, form_suffix, lemma_suffix)

    def applicable(self, form: str) -> bool:
        if self.kind == "absolute":
            return True
        return (
            len(form) >= len(self.form_prefix) + len(self.form_suffix)
            and form.startswith(self.form_prefix)
            and form.endswith(self.form_suffix)
        )

    def apply(self, form: str) -> str:
        if self.kind == "absolute":
            return self.lemma
        if not self.applicable(form):
            raise InapplicableRule(f"rule {self.to_label()!r} does not fit {form!r}")
        middle = form[len(self.form_prefix) : len(form) - len(self.form_suffix)]
        return self.lemma_prefix + middle + self.lemma_suffix

    def to_label(self) -> str:
        if self.kind == "absolute":
            return "A:" + self.lemma
        e = _escape
        return (
            f"R:{e(self.form_prefix)}{ARROW}{e(self.lemma_prefix)}"
            f"{BAR}{e(self.form_suffix)}{ARROW}{e(self.lemma_suffix)}"
        )

    @classmethod
    def from_label(cls, label: str) -> "LemmaRule":
        if label.startswith("A:"):
            return cls.absolute(label[2:])
        if not label.startswith("R:"):
            raise MalformedLabel(f"unknown rule label {label!r}")
        fields, seps = _split_escaped(label[2:])
        if seps != [ARROW, BAR, ARROW]:
            raise MalformedLabel(f"bad relative rule label {label!r}")
        return cls.relative(*fields)

    def __str__(self):
        return self.to_label()


IDENTITY = LemmaRule.relative()


def _escape(s: str) -> str:
    for ch in _ESCAPED:
        s = s.replace(ch, "\\" + ch)
    return s


def _split_escaped(s: str) -> tuple[list[str], list[str]]:
    fields, seps, cur = [], [], []
    it = iter(s)
    for ch in it:
        if ch == "\\":
            nxt = next(it, None)
            if nxt not in _ESCAPED:
                raise MalformedLabel(f"bad escape in rule label {s!r}")
            cur.append(nxt)
        elif ch in (ARROW, BAR):
            fields.append("".join(cur))
            seps.append(ch)
            cur = []
        else:
            cur.append(ch)
    fields.append("".join(cur))
    return fields, seps


def longest_common_substring(a: str, b: str) -> tuple[int, int, int]:
    """Return (start in a, start in b, length); ties prefer leftmost in a, then in b."""
    best = (0, 0, 0)
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                n = prev[j - 1] + 1
                cur[j] = n
                if n > best[2]:
                    best = (i - n, j - n, n)
        prev = cur
    return best


def induce_rule(form: str, lemma: str) -> LemmaRule:
    if not form:
        raise EmptyForm("cannot induce a rule from an empty form")
    i, j, n = longest_common_substring(form, lemma)
    if n < MIN_ANCHOR:
        return LemmaRule.absolute(lemma)
    return LemmaRule.relative(form[:i], lemma[:j], form[i + n :], lemma[j + n :])


def apply_rule(rule: LemmaRule, form: str) -> str:
    return rule.apply(form)


def _majority(counts: Mapping[str, int]) -> str:
    return min(counts, key=lambda k: (-counts[k], k))


class LemmaModel:
    """Baseline lemmatizer.

    ``mode="rules"`` stores per-form and per-suffix rule label counts;
    ``mode="dictionary"`` stores per-form lemma counts and does plain lookup.
    """

    def __init__(self, mode: str, form_counts, suffix_counts=None):
        if mode not in ("rules", "dictionary"):
            raise ValueError(f"unknown lemmatizer mode {mode!r}")
        self.mode = mode
        self.form_counts = {k: dict(v) for k, v in form_counts.items()}
        self.suffix_counts = {k: dict(v) for k, v in (suffix_counts or {}).items()}
        if mode == "rules":
            self.form_table = {f: LemmaRule.from_label(_majority(c)) for f, c in self.form_counts.items()}
            self.suffix_table = {s: LemmaRule.from_label(_majority(c)) for s, c in self.suffix_counts.items()}
        else:
            self.form_table = {f: _majority(c) for f, c in self.form_counts.items()}
            self.suffix_table = {}

    def predict(self, form: str) -> str:
        hit = self.form_table.get(form)
        if self.mode == "dictionary":
            return form if hit is None else hit
        if hit is not None and hit.applicable(form):
            return hit.apply(form)
        for n in range(min(MAX_SUFFIX, len(form)), 0, -1):
            rule = self.suffix_table.get(form[-n:])
            if rule is not None and rule.applicable(form):
                return rule.apply(form)
        return form

    def to_json(self) -> str:
        doc = persist.header("lemmatizer")
        doc.update(mode=self.mode, form_counts=self.form_counts, suffix_counts=self.suffix_counts)
        return persist.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "LemmaModel":
        doc = persist.loads(text, "lemmatizer")
        return cls(doc["mode"], doc["form_counts"], doc["suffix_counts"])

    def save(self, path: str | os.PathLike) -> None:
        persist.write_text(path, self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "LemmaModel":
        return cls.from_json(persist.read_text(path))


def train_lemmatizer_pairs(pairs: Iterable[tuple[str, str]], mode: str = "rules") -> LemmaModel:
    form_counts: dict[str, Counter] = defaultdict(Counter)
    suffix_counts: dict[str, Counter] = defaultdict(Counter)
    n = 0
    for form, lemma in pairs:
        n += 1
        if mode == "dictionary":
            form_counts[form][lemma] += 1
            continue
        label = induce_rule(form, lemma).to_label()
        form_counts[form][label] += 1
        for k in range(1, min(MAX_SUFFIX, len(form)) + 1):
            suffix_counts[form[-k:]][label] += 1
    if not n:
        raise TrainingDataEmpty("no lemma-annotated tokens")
    return LemmaModel(mode, form_counts, suffix_counts if mode == "rules" else None)


def train_lemmatizer(corpus: Corpus, mode: str = "rules") -> LemmaModel:
    pairs = ((t.form, t.lemma) for t in corpus.tokens() if t.form and t.lemma)
    return train_lemmatizer_pairs(pairs, mode)


def predict_lemmas(model: LemmaModel, sentence: Sentence | Iterable[str]) -> list[str]:
    forms = sentence.forms if isinstance(sentence, Sentence) else list(sentence)
    return [model.predict(f) for f in forms]


def lemmatize_corpus(model: LemmaModel, corpus: Corpus) -> Corpus:
    """Copy of ``corpus`` with every word token's LEMMA predicted by ``model``."""
    from copy import deepcopy

    out = deepcopy(corpus)
    for sent in out.sentences:
        for tok, lemma in zip(sent.tokens, predict_lemmas(model, sent)):
            tok.lemma = lemma
    return out


def apply_rule_labels(corpus: Corpus, labels: Mapping[int, str]) -> list[list[str]]:
    """Lemmas obtained by applying externally predicted rule labels.

    ``labels`` maps the corpus-wide 0-based token index to a rule label.  A
    rule that does not fit its form leaves the form unchanged.
    """
    out = []
    idx = 0
    for sent in corpus.sentences:
        lemmas = []
        for tok in sent.tokens:
            if idx not in labels:
                raise AlignmentError(f"no predicted rule for token index {idx}")
            rule = LemmaRule.from_label(labels[idx])
            lemmas.append(rule.apply(tok.form) if rule.applicable(tok.form) else tok.form)
            idx += 1
        out.append(lemmas)
    if len(labels) != idx:
        raise AlignmentError(f"{len(labels)} predicted labels for {idx} tokens")
    return out
