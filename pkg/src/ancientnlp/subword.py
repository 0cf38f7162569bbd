"""Subword tokenizers, coverage statistics and embedding transfer.

Tokenization is greedy longest-match over a learned vocabulary.  Words are
marked with a leading boundary character ("▁") so word starts survive the
split into pieces.  Vocabularies are learned by adjacent-pair merging.
"""
from __future__ import annotations

import heapq
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import persist
from .errors import DimensionMismatch, InvalidPieceId, ModelFormatError, TrainingDataEmpty, VocabSizeTooSmall

BOUNDARY = "▁"
SPECIALS = ("<unk>", "<mask>", "<pad>", "<s>", "</s>")
UNK_ID, MASK_ID, PAD_ID, BOS_ID, EOS_ID = range(len(SPECIALS))

DEFAULT_VOCAB_SIZE = 3000
VOCAB_SIZE_OVERRIDES = {"lzh": 10000}


class SubwordModel:
    """Piece inventory with dense ids; ids 0-4 are the reserved specials."""

    def __init__(self, pieces: Sequence[str], boundary_marker: str = BOUNDARY):
        pieces = list(pieces)
        if len(boundary_marker) != 1:
            raise ValueError("boundary marker must be a single character")
        if tuple(pieces[: len(SPECIALS)]) != SPECIALS:
            raise ValueError(f"the first pieces must be the specials {SPECIALS}")
        seen = set()
        for p in pieces:
            if not p:
                raise ValueError("empty piece")
            if p in seen:
                raise ValueError(f"duplicate piece {p!r}")
            if boundary_marker in p[1:]:
                raise ValueError(f"boundary marker inside piece {p!r}")
            seen.add(p)
        self.pieces = pieces
        self.boundary_marker = boundary_marker
        self.vocab = {p: i for i, p in enumerate(pieces)}
        normal = pieces[len(SPECIALS):]
        self._max_len = max((len(p) for p in normal), default=0)

    def __len__(self):
        return len(self.pieces)

    def __eq__(self, other):
        if not isinstance(other, SubwordModel):
            return NotImplemented
        return self.pieces == other.pieces and self.boundary_marker == other.boundary_marker

    def __repr__(self):
        return f"SubwordModel({len(self.pieces)} pieces)"

    def is_special(self, piece_id: int) -> bool:
        return 0 <= piece_id < len(SPECIALS)

    def starts_word(self, piece_id: int) -> bool:
        return not self.is_special(piece_id) and self.pieces[piece_id][0] == self.boundary_marker

    def encode_word(self, word: str) -> list[int]:
        """Longest-match segmentation of one whitespace-free word."""
        s = self.boundary_marker + word
        ids = []
        i = 0
        n = len(s)
        while i < n:
            for length in range(min(self._max_len, n - i), 0, -1):
                pid = self.vocab.get(s[i : i + length])
                if pid is not None and pid >= len(SPECIALS):
                    ids.append(pid)
                    i += length
                    break
            else:
                ids.append(UNK_ID)
                i += 1
        return ids

    def encode(self, text: str) -> list[int]:
        ids = []
        for word in text.split():
            ids.extend(self.encode_word(word))
        return ids

    def decode(self, ids: Iterable[int]) -> str:
        parts = []
        for pid in ids:
            if not 0 <= pid < len(self.pieces):
                raise InvalidPieceId(f"piece id {pid} out of range 0..{len(self.pieces) - 1}")
            if pid in (PAD_ID, BOS_ID, EOS_ID):
                continue
            parts.append(self.pieces[pid])
        text = "".join(parts).replace(self.boundary_marker, " ")
        return text[1:] if text.startswith(" ") else text

    def to_json(self) -> str:
        doc = persist.header("subword")
        doc.update(
            boundary_marker=self.boundary_marker,
            specials=list(SPECIALS),
            pieces=[[p, i] for i, p in enumerate(self.pieces)],
        )
        return persist.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SubwordModel":
        doc = persist.loads(text, "subword")
        if doc.get("specials") != list(SPECIALS):
            raise ModelFormatError("unexpected special pieces")
        entries = sorted(doc["pieces"], key=lambda e: e[1])
        if [e[1] for e in entries] != list(range(len(entries))):
            raise ModelFormatError("piece ids are not dense")
        return cls([e[0] for e in entries], doc["boundary_marker"])

    def save(self, path: str | os.PathLike) -> None:
        persist.write_text(path, self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "SubwordModel":
        return cls.from_json(persist.read_text(path))


@dataclass(frozen=True)
class TokenizerConfig:
    vocab_size: int = DEFAULT_VOCAB_SIZE

    def __post_init__(self):
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")

    @classmethod
    def for_language(cls, code: str) -> "TokenizerConfig":
        return cls(VOCAB_SIZE_OVERRIDES.get(code, DEFAULT_VOCAB_SIZE))


def _initial_symbols(word: str) -> list[str]:
    return [BOUNDARY + word[0]] + list(word[1:])


def _merge_symbols(symbols: list[str], a: str, b: str) -> list[str]:
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def train_tokenizer(lines: Iterable[str], config: TokenizerConfig = TokenizerConfig()) -> SubwordModel:
    word_freq = Counter(w for line in lines for w in line.split())
    if not word_freq:
        raise TrainingDataEmpty("no words in tokenizer training data")

    types = sorted(word_freq)
    words = [_initial_symbols(w) for w in types]
    freqs = [word_freq[w] for w in types]

    base = {BOUNDARY}
    for w in types:
        base.update(w)
        base.add(BOUNDARY + w[0])
    pieces = list(SPECIALS) + sorted(base)
    if config.vocab_size < len(pieces):
        raise VocabSizeTooSmall(
            f"vocab_size {config.vocab_size} is below the {len(pieces)} specials and base characters"
        )
    known = set(pieces)

    pair_counts: dict[tuple[str, str], int] = defaultdict(int)
    where: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, (syms, f) in enumerate(zip(words, freqs)):
        for pair in zip(syms, syms[1:]):
            pair_counts[pair] += f
            where[pair].add(idx)
    # max-count first; ties go to the lexicographically smaller merged piece
    heap = [(-c, a + b, a, b) for (a, b), c in pair_counts.items()]
    heapq.heapify(heap)

    while len(pieces) < config.vocab_size and heap:
        neg, merged, a, b = heapq.heappop(heap)
        if pair_counts.get((a, b), 0) != -neg or neg == 0:
            continue  # stale entry
        if merged not in known:
            known.add(merged)
            pieces.append(merged)
        touched = set()
        for idx in sorted(where.pop((a, b), ())):
            old = words[idx]
            f = freqs[idx]
            new = _merge_symbols(old, a, b)
            for pair in zip(old, old[1:]):
                pair_counts[pair] -= f
                touched.add(pair)
            for pair in zip(new, new[1:]):
                pair_counts[pair] += f
                touched.add(pair)
            for pair in set(zip(old, old[1:])) - set(zip(new, new[1:])):
                where[pair].discard(idx)
            for pair in zip(new, new[1:]):
                where[pair].add(idx)
            words[idx] = new
        for pair in touched:
            c = pair_counts.get(pair, 0)
            if c <= 0:
                pair_counts.pop(pair, None)
            else:
                heapq.heappush(heap, (-c, pair[0] + pair[1], pair[0], pair[1]))
    return SubwordModel(pieces)


@dataclass(frozen=True)
class CoverageReport:
    total_tokens: int
    unknown_fraction: float
    unk_rank: int | None
    unknown_count: int | None = None

    @property
    def unknown_percent(self) -> float:
        return 100.0 * self.unknown_fraction


@dataclass(frozen=True)
class CoveragePolicy:
    unknown_threshold_percent: float = 5.0
    top_rank: int = 10

    def __post_init__(self):
        if self.unknown_threshold_percent <= 0:
            raise ValueError("unknown_threshold_percent must be positive")
        if self.top_rank < 1:
            raise ValueError("top_rank must be at least 1")


def coverage_from_ids(ids: Iterable[int]) -> CoverageReport:
    counts = Counter(ids)
    total = sum(counts.values())
    unk = counts.get(UNK_ID, 0)
    rank = None
    if unk:
        rank = 1 + sum(1 for c in counts.values() if c > unk)
    return CoverageReport(
        total_tokens=total,
        unknown_fraction=unk / total if total else 0.0,
        unk_rank=rank,
        unknown_count=unk,
    )


def coverage_report(model: SubwordModel, lines: Iterable[str]) -> CoverageReport:
    return coverage_from_ids(pid for line in lines for pid in model.encode(line))


def needs_custom_tokenizer(report: CoverageReport, policy: CoveragePolicy = CoveragePolicy()) -> bool:
    # compare as fractions: 100 * 0.05 is not exactly 5.0 in binary floating point
    too_many = report.unknown_fraction > policy.unknown_threshold_percent / 100
    ranked = report.unk_rank is not None and report.unk_rank <= policy.top_rank
    return too_many or ranked


@dataclass
class EmbeddingMatrix:
    dimension: int
    rows: dict[str, list[float]] = field(default_factory=dict)

    def as_array(self, model: SubwordModel) -> np.ndarray:
        return np.array([self.rows[p] for p in model.pieces], dtype=np.float64).reshape(len(model), self.dimension)

    def to_json(self) -> str:
        doc = persist.header("embeddings")
        doc.update(dimension=self.dimension, rows=self.rows)
        return persist.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "EmbeddingMatrix":
        doc = persist.loads(text, "embeddings")
        return cls(int(doc["dimension"]), {k: [float(x) for x in v] for k, v in doc["rows"].items()})

    def save(self, path: str | os.PathLike) -> None:
        persist.write_text(path, self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "EmbeddingMatrix":
        return cls.from_json(persist.read_text(path))


@dataclass(frozen=True)
class InitPolicy:
    kind: str = "zero"  # "zero" or "gaussian"
    mean: float = 0.0
    sigma: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("zero", "gaussian"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def transfer_embeddings(
    old_model: SubwordModel,
    old_matrix: EmbeddingMatrix,
    new_model: SubwordModel,
    init: InitPolicy = InitPolicy(),
) -> EmbeddingMatrix:
    """Build rows for ``new_model``: shared pieces keep their old vectors."""
    dim = old_matrix.dimension
    if dim < 1:
        raise DimensionMismatch("embedding dimension must be positive")
    for piece in old_model.pieces:
        row = old_matrix.rows.get(piece)
        if row is None:
            raise DimensionMismatch(f"matrix has no row for piece {piece!r}")
        if len(row) != dim:
            raise DimensionMismatch(f"row for {piece!r} has length {len(row)}, expected {dim}")

    missing = [p for p in new_model.pieces if p not in old_model.vocab]
    if init.kind == "gaussian":
        rng = np.random.default_rng(init.seed)
        fresh = rng.normal(init.mean, init.sigma, size=(len(missing), dim)).tolist()
    else:
        fresh = [[0.0] * dim for _ in missing]
    fresh_rows = dict(zip(missing, fresh))

    rows = {}
    for piece in new_model.pieces:
        if piece in fresh_rows:
            rows[piece] = fresh_rows[piece]
        else:
            rows[piece] = list(old_matrix.rows[piece])
    return EmbeddingMatrix(dim, rows)
