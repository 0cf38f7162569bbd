"""Task accuracies and the overall (mean over available tasks) score.

All task metrics are micro-averaged exact-match accuracies over their
scoring units: tokens for pos/feats/lemma, masked words for word_fill and
masked characters for char_fill.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .corpus_io import Corpus
from .errors import AlignmentError, NoScores
from .gapfill_char import GAP
from .gapfill_word import MASK_TOKEN
from .morphotag import SEP

TASKS = ("pos", "lemma", "feats", "char_fill", "word_fill")


@dataclass(frozen=True)
class TaskScore:
    task: str
    correct: int
    counted: int

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.counted <= 0:
            raise NoScores(f"no scoring units for task {self.task!r}")

    @property
    def accuracy(self) -> float:
        return self.correct / self.counted

    def to_dict(self) -> dict:
        return {"task": self.task, "accuracy": self.accuracy, "correct": self.correct, "counted": self.counted}


def report_round(x: float) -> float:
    """Round half-up to two decimals, the precision of a leaderboard table."""
    return float(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def score_task(task: str, gold: Sequence, pred: Sequence) -> TaskScore:
    if len(gold) != len(pred):
        raise AlignmentError(f"{task}: {len(gold)} gold units vs {len(pred)} predicted")
    correct = sum(1 for g, p in zip(gold, pred) if g == p)
    return TaskScore(task, correct, len(gold))


def overall_score(scores: Iterable[TaskScore | float]) -> float:
    values = [s.accuracy if isinstance(s, TaskScore) else float(s) for s in scores]
    if not values:
        raise NoScores("overall score needs at least one task score")
    return sum(values) / len(values)


def _feats_unit(feats: dict[str, str]) -> str:
    return SEP.join(f"{k}={v}" for k, v in sorted(feats.items())) or "_"


def corpus_units(task: str, corpus: Corpus) -> list[list[str]]:
    if task == "pos":
        unit = lambda t: t.upos
    elif task == "feats":
        unit = lambda t: _feats_unit(t.feats)
    elif task == "lemma":
        unit = lambda t: t.lemma
    else:
        raise ValueError(f"task {task!r} is not scored on CoNLL-U corpora")
    return [[unit(t) for t in sent.tokens] for sent in corpus.sentences]


def score_corpora(task: str, gold: Corpus, pred: Corpus) -> TaskScore:
    g_units, p_units = corpus_units(task, gold), corpus_units(task, pred)
    if len(g_units) != len(p_units):
        raise AlignmentError(f"{len(g_units)} gold sentences vs {len(p_units)} predicted")
    for i, (g, p) in enumerate(zip(g_units, p_units)):
        if len(g) != len(p):
            raise AlignmentError(f"sentence {i}: {len(g)} gold tokens vs {len(p)} predicted")
    return score_task(task, [u for s in g_units for u in s], [u for s in p_units for u in s])


def gap_characters(masked: str, text: str) -> list[str]:
    """Characters of ``text`` sitting where ``masked`` has gaps.

    An unfilled gap left in ``text`` comes back as the gap literal itself.
    """
    out = []
    i = j = 0
    while i < len(masked):
        if j >= len(text):
            raise AlignmentError(f"{text!r} is shorter than masked line {masked!r}")
        if masked.startswith(GAP, i):
            if text.startswith(GAP, j):
                out.append(GAP)
                j += len(GAP)
            else:
                out.append(text[j])
                j += 1
            i += len(GAP)
        else:
            i += 1
            j += 1
    if j != len(text):
        raise AlignmentError(f"{text!r} does not align with masked line {masked!r}")
    return out


def masked_words(masked: str, text: str) -> list[str]:
    m_words, t_words = masked.split(), text.split()
    if len(m_words) != len(t_words):
        raise AlignmentError(f"{len(t_words)} words do not align with {len(m_words)} in masked line")
    return [t for m, t in zip(m_words, t_words) if m == MASK_TOKEN]


def score_gap_lines(task: str, masked: Sequence[str], gold: Sequence[str], pred: Sequence[str]) -> TaskScore:
    if not len(masked) == len(gold) == len(pred):
        raise AlignmentError("masked, gold and predicted files differ in line count")
    if task == "char_fill":
        units = gap_characters
    elif task == "word_fill":
        units = masked_words
    else:
        raise ValueError(f"task {task!r} is not a gap-filling task")
    g_all, p_all = [], []
    for m, g, p in zip(masked, gold, pred):
        g_all.extend(units(m, g))
        p_all.extend(units(m, p))
    return score_task(task, g_all, p_all)


@dataclass
class EvalReport:
    language: str
    scores: dict[str, TaskScore] = field(default_factory=dict)

    def add(self, score: TaskScore) -> None:
        self.scores[score.task] = score

    @property
    def overall(self) -> float:
        return overall_score(self.scores.values())

    def to_dict(self) -> dict:
        return {
            self.language: {
                "overall": self.overall,
                "tasks": {t: s.to_dict() for t, s in self.scores.items()},
            }
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)

    def to_table(self) -> str:
        cols = ["overall"] + [t for t in TASKS if t in self.scores]
        vals = [self.overall] + [self.scores[t].accuracy for t in cols[1:]]
        head = "lang".ljust(6) + "".join(c.rjust(11) for c in cols)
        row = self.language.ljust(6) + "".join(f"{report_round(v):11.2f}" for v in vals)
        return head + "\n" + row
