"""Character-level gap filling by dictionary lookup.

Every whitespace-free string seen in training text is a candidate word.  A
masked word ("c[_]t") is matched against all candidates of the same length,
each gap standing for exactly one character.  When nothing matches and the
word has a single gap, the gap may have hidden a space: if a part on either
side of it is a known word, the gap is filled with " ".
"""
from __future__ import annotations

import os
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import persist
from .errors import MalformedMaskInput, NotApplicable

GAP = "[_]"
SPACE = " "
DEFAULT_LIMIT = 3
# decomposition-based filling would be needed for Hanzi
NOT_APPLICABLE = frozenset({"lzh"})

Reranker = Callable[["MaskedWord", list[str]], list[str]]


class CandidateVocab:
    def __init__(self, counts: dict[str, int] | None = None):
        self.counts = Counter({w: c for w, c in (counts or {}).items() if c > 0})
        buckets = defaultdict(list)
        for w in self.counts:
            buckets[len(w)].append(w)
        # each bucket is pre-ranked so a scan yields matches in answer order
        self.buckets = {n: sorted(ws, key=lambda w: (-self.counts[w], w)) for n, ws in buckets.items()}

    def __contains__(self, word):
        return word in self.counts

    def __len__(self):
        return len(self.counts)

    def to_json(self) -> str:
        doc = persist.header("charvocab")
        doc["counts"] = dict(self.counts)
        return persist.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "CandidateVocab":
        return cls(persist.loads(text, "charvocab")["counts"])

    def save(self, path: str | os.PathLike) -> None:
        persist.write_text(path, self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CandidateVocab":
        return cls.from_json(persist.read_text(path))


def build_candidate_vocab(lines: Iterable[str]) -> CandidateVocab:
    return CandidateVocab(Counter(w for line in lines for w in line.split()))


@dataclass(frozen=True)
class MaskedWord:
    """A word whose units are literal characters or gaps (``None``)."""

    units: tuple[str | None, ...]

    def __post_init__(self):
        if None not in self.units:
            raise MalformedMaskInput("masked word has no gap")

    @classmethod
    def parse(cls, text: str) -> "MaskedWord":
        units: list[str | None] = []
        i = 0
        while i < len(text):
            if text.startswith(GAP, i):
                units.append(None)
                i += len(GAP)
            else:
                if text[i].isspace():
                    raise MalformedMaskInput(f"whitespace inside masked word {text!r}")
                units.append(text[i])
                i += 1
        return cls(tuple(units))

    def __len__(self):
        return len(self.units)

    def __str__(self):
        return "".join(GAP if u is None else u for u in self.units)

    @property
    def gap_positions(self) -> list[int]:
        return [i for i, u in enumerate(self.units) if u is None]

    def regex(self) -> re.Pattern:
        body = "".join("." if u is None else re.escape(u) for u in self.units)
        return re.compile(body, re.DOTALL)

    def fill(self, chars: Sequence[str]) -> str:
        it = iter(chars)
        return "".join(next(it) if u is None else u for u in self.units)


@dataclass
class CharFillResult:
    matches: list[str] = field(default_factory=list)
    replacements: list[list[str]] = field(default_factory=list)
    used_split: bool = False
    resolved: bool = False

    @property
    def best(self) -> list[str] | None:
        """Characters for the gaps according to the top-ranked match."""
        return self.replacements[0] if self.resolved else None


def _in_vocab(vocab: CandidateVocab, part: str) -> bool:
    return bool(part) and part in vocab


def fill_masked_word(
    vocab: CandidateVocab,
    masked: MaskedWord,
    limit: int | None = DEFAULT_LIMIT,
    strict_split: bool = False,
    reranker: Reranker | None = None,
) -> CharFillResult:
    pattern = masked.regex()
    bucket = vocab.buckets.get(len(masked), [])
    if reranker is None and limit is not None:
        matches = []
        for w in bucket:
            if pattern.fullmatch(w):
                matches.append(w)
                if len(matches) == limit:
                    break
    else:
        matches = [w for w in bucket if pattern.fullmatch(w)]
        if reranker is not None:
            matches = list(reranker(masked, matches))
        if limit is not None:
            matches = matches[:limit]

    gaps = masked.gap_positions
    if matches:
        return CharFillResult(
            matches=matches,
            replacements=[[w[i] for i in gaps] for w in matches],
            resolved=True,
        )
    if len(gaps) == 1:
        left = "".join(masked.units[: gaps[0]])
        right = "".join(masked.units[gaps[0] + 1 :])
        hits = [_in_vocab(vocab, left), _in_vocab(vocab, right)]
        if all(hits) if strict_split else any(hits):
            return CharFillResult(
                matches=[left + SPACE + right],
                replacements=[[SPACE]],
                used_split=True,
                resolved=True,
            )
    return CharFillResult()


def fill_sentence_chars_detailed(
    vocab: CandidateVocab, line: str, **options
) -> tuple[str, list[str | None]]:
    """Fill every gap in ``line``.

    Returns the filled line and, per gap in reading order, the character
    chosen for it (``None`` where the gap was left unresolved).
    """
    out = []
    chosen: list[str | None] = []
    for seg in re.split(r"(\s+)", line):
        if GAP not in seg:
            out.append(seg)
            continue
        masked = MaskedWord.parse(seg)
        result = fill_masked_word(vocab, masked, **options)
        if result.resolved:
            out.append(masked.fill(result.best))
            chosen.extend(result.best)
        else:
            out.append(seg)
            chosen.extend([None] * len(masked.gap_positions))
    return "".join(out), chosen


def fill_sentence_chars(vocab: CandidateVocab, line: str, **options) -> str:
    return fill_sentence_chars_detailed(vocab, line, **options)[0]


def check_applicable(language: str) -> None:
    if language in NOT_APPLICABLE:
        raise NotApplicable(f"character gap filling by lookup is not applicable to {language!r}")
