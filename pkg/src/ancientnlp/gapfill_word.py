"""Word-level gap filling over a masked-token scorer.

A scorer maps a piece-id sequence with one masked position to a probability
vector over the piece vocabulary.  The decoder fills each ``<mask>`` word
left to right: it commits the best word-initial piece, then looks ahead up
to ``k`` times for a continuation piece, stopping early when the best
next piece would start a new word.

``NGramScorer`` is a small reference scorer: additive-smoothed n-gram
counts, with a candidate scored by the product of the probabilities of all
n-gram windows that cover the masked position.
"""
from __future__ import annotations

import json
import os
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from . import persist
from .errors import InvalidOrder, MalformedMaskInput, MissingQuery, NoWordInitialPiece
from .subword import MASK_ID, SPECIALS, SubwordModel

MASK_TOKEN = "<mask>"
_BOS = -1
_EOS = -2


class MaskScorer(Protocol):
    vocab_size: int

    def mask_distribution(self, pieces: Sequence[int], mask_index: int) -> np.ndarray:
        """Probabilities (indexed by piece id) for the piece at ``mask_index``."""


class NGramScorer:
    def __init__(self, order: int, alpha: float, vocab_size: int, counts=None, mask_id: int = MASK_ID):
        if order < 2:
            raise InvalidOrder(f"n-gram order must be at least 2, got {order}")
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.order = order
        self.alpha = float(alpha)
        self.vocab_size = vocab_size
        self.mask_id = mask_id
        # context tuple -> {next symbol: count}; symbols are piece ids, _BOS or _EOS
        self.counts: dict[tuple[int, ...], dict[int, int]] = {k: dict(v) for k, v in (counts or {}).items()}
        self.totals = {ctx: sum(nxt.values()) for ctx, nxt in self.counts.items()}
        # outcomes: every piece plus the end marker
        self._outcomes = vocab_size + 1

    def count(self, context: Sequence[int], nxt: int) -> int:
        return self.counts.get(tuple(context), {}).get(nxt, 0)

    def prob(self, context: Sequence[int], nxt: int) -> float:
        ctx = tuple(context)
        c = self.counts.get(ctx, {}).get(nxt, 0)
        return (c + self.alpha) / (self.totals.get(ctx, 0) + self.alpha * self._outcomes)

    def _padded(self, pieces: Sequence[int]) -> list[int]:
        return [_BOS] * (self.order - 1) + list(pieces) + [_EOS]

    def mask_distribution(self, pieces: Sequence[int], mask_index: int) -> np.ndarray:
        if not 0 <= mask_index < len(pieces):
            raise IndexError(f"mask index {mask_index} outside sequence of length {len(pieces)}")
        n = self.order
        V = self.vocab_size
        seq = self._padded(pieces)
        q = mask_index + n - 1
        others = {i + n - 1 for i, p in enumerate(pieces) if p == self.mask_id and i != mask_index}
        logp = np.zeros(V)
        denom_add = self.alpha * self._outcomes
        for start in range(q - n + 1, q + 1):
            end = start + n  # exclusive
            if end > len(seq):
                break
            # windows touching another unresolved mask carry no evidence
            if any(start <= o < end for o in others):
                continue
            slot = q - start
            if slot == n - 1:
                ctx = tuple(seq[start:q])
                row = np.full(V, self.alpha)
                for t, c in self.counts.get(ctx, {}).items():
                    if 0 <= t < V:
                        row[t] += c
                logp += np.log(row / (self.totals.get(ctx, 0) + denom_add))
            else:
                left = tuple(seq[start:q])
                right = tuple(seq[q + 1 : end - 1])
                nxt = seq[end - 1]
                vals = np.empty(V)
                for t in range(V):
                    ctx = left + (t,) + right
                    c = self.counts.get(ctx)
                    hit = c.get(nxt, 0) if c else 0
                    vals[t] = (hit + self.alpha) / (self.totals.get(ctx, 0) + denom_add)
                logp += np.log(vals)
        if V == 0:
            return logp
        probs = np.exp(logp - logp.max())
        return probs / probs.sum()

    def to_json(self) -> str:
        doc = persist.header("ngram")
        doc.update(
            order=self.order,
            alpha=self.alpha,
            vocab_size=self.vocab_size,
            mask_id=self.mask_id,
            counts=sorted([list(ctx), nxt, c] for ctx, row in self.counts.items() for nxt, c in row.items()),
        )
        return persist.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "NGramScorer":
        doc = persist.loads(text, "ngram")
        counts: dict = defaultdict(dict)
        for ctx, nxt, c in doc["counts"]:
            counts[tuple(ctx)][nxt] = c
        return cls(doc["order"], doc["alpha"], doc["vocab_size"], counts, doc["mask_id"])

    def save(self, path: str | os.PathLike) -> None:
        persist.write_text(path, self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "NGramScorer":
        return cls.from_json(persist.read_text(path))


def train_ngram_scorer(
    token_lines: Iterable[Sequence[int]],
    order: int = 3,
    alpha: float = 0.1,
    vocab_size: int | None = None,
) -> NGramScorer:
    if order < 2:
        raise InvalidOrder(f"n-gram order must be at least 2, got {order}")
    counts: dict = defaultdict(lambda: defaultdict(int))
    top = -1
    for line in token_lines:
        seq = [_BOS] * (order - 1) + list(line) + [_EOS]
        top = max([top, *line])
        for i in range(len(seq) - order + 1):
            counts[tuple(seq[i : i + order - 1])][seq[i + order - 1]] += 1
    if vocab_size is None:
        vocab_size = top + 1
    return NGramScorer(order, alpha, vocab_size, counts)


def train_ngram_from_text(model: SubwordModel, lines: Iterable[str], order: int = 3, alpha: float = 0.1) -> NGramScorer:
    return train_ngram_scorer((model.encode(line) for line in lines), order, alpha, len(model))


def mask_distribution(scorer: MaskScorer, pieces: Sequence[int], mask_index: int) -> np.ndarray:
    return scorer.mask_distribution(pieces, mask_index)


def _query_key(pieces: Sequence[int], mask_index: int) -> str:
    return json.dumps([list(pieces), mask_index])


class RecordingScorer:
    """Wraps a scorer and keeps every query and answer it served."""

    def __init__(self, inner: MaskScorer):
        self.inner = inner
        self.vocab_size = inner.vocab_size
        self.records: list[dict] = []

    def mask_distribution(self, pieces, mask_index):
        probs = self.inner.mask_distribution(pieces, mask_index)
        self.records.append({"pieces": list(pieces), "mask_index": mask_index, "probs": probs.tolist()})
        return probs

    def dump(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)


class PrecomputedScorer:
    """Serves distributions computed elsewhere, e.g. by a neural masked LM.

    Input is JSON lines, one query per line:
    ``{"pieces": [...], "mask_index": i, "probs": [p_0, ..., p_{V-1}]}``.
    """

    def __init__(self, records: Iterable[dict]):
        self._table: dict[str, np.ndarray] = {}
        self.vocab_size = None
        for rec in records:
            probs = np.asarray(rec["probs"], dtype=np.float64)
            if self.vocab_size is None:
                self.vocab_size = len(probs)
            elif len(probs) != self.vocab_size:
                raise ValueError("records disagree on vocabulary size")
            self._table[_query_key(rec["pieces"], rec["mask_index"])] = probs

    @classmethod
    def from_jsonl(cls, text: str) -> "PrecomputedScorer":
        return cls(json.loads(line) for line in text.splitlines() if line.strip())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PrecomputedScorer":
        return cls.from_jsonl(persist.read_text(path))

    def mask_distribution(self, pieces, mask_index):
        try:
            return self._table[_query_key(pieces, mask_index)]
        except KeyError:
            raise MissingQuery(f"no precomputed distribution for mask {mask_index} in {list(pieces)}") from None


@dataclass(frozen=True)
class DecoderConfig:
    k: int = 1
    single_token_mode: bool = False

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("look-ahead k must be nonnegative")

    @classmethod
    def for_language(cls, code: str, k: int = 1) -> "DecoderConfig":
        return cls(k=k, single_token_mode=code == "lzh")


def _argmax(probs: np.ndarray, allowed: np.ndarray) -> int:
    # np.argmax returns the first maximum, i.e. the smallest piece id on ties
    return int(np.argmax(np.where(allowed, probs, -np.inf)))


def _piece_text(model: SubwordModel, pid: int) -> str:
    p = model.pieces[pid]
    return p[1:] if p.startswith(model.boundary_marker) else p


def fill_word_masks_detailed(
    scorer: MaskScorer, model: SubwordModel, line: str, config: DecoderConfig = DecoderConfig()
) -> tuple[str, list[str]]:
    """Fill every ``<mask>`` in ``line``; also return the predicted words in order."""
    if scorer.vocab_size != len(model):
        raise ValueError(f"scorer vocabulary ({scorer.vocab_size}) differs from tokenizer ({len(model)})")
    segments = re.split(r"(\s+)", line)
    mask_segments = []
    seq: list[int] = []
    for si, seg in enumerate(segments):
        if not seg or seg.isspace():
            continue
        if seg == MASK_TOKEN:
            mask_segments.append(si)
            seq.append(MASK_ID)
        elif MASK_TOKEN in seg:
            raise MalformedMaskInput(f"mask inside word {seg!r}")
        else:
            seq.extend(model.encode_word(seg))
    if not mask_segments:
        return line, []

    n_special = len(SPECIALS)
    ids = np.arange(len(model))
    regular = ids >= n_special
    word_initial = np.array([model.starts_word(i) and len(model.pieces[i]) > 1 for i in ids])
    if not config.single_token_mode and not word_initial.any():
        raise NoWordInitialPiece("tokenizer has no word-initial pieces")

    words = []
    for si in mask_segments:
        p = seq.index(MASK_ID)
        if config.single_token_mode:
            t = _argmax(scorer.mask_distribution(seq, p), regular)
            seq[p] = t
            words.append(_piece_text(model, t))
            segments[si] = words[-1]
            continue
        t = _argmax(scorer.mask_distribution(seq, p), word_initial)
        seq[p] = t
        committed = [t]
        for _ in range(config.k):
            seq.insert(p + 1, MASK_ID)
            t = _argmax(scorer.mask_distribution(seq, p + 1), regular)
            if model.starts_word(t):
                del seq[p + 1]
                break
            seq[p + 1] = t
            committed.append(t)
            p += 1
        words.append("".join(model.pieces[c] for c in committed)[1:])
        segments[si] = words[-1]
    return "".join(segments), words


def fill_word_masks(
    scorer: MaskScorer, model: SubwordModel, line: str, config: DecoderConfig = DecoderConfig()
) -> str:
    return fill_word_masks_detailed(scorer, model, line, config)[0]
