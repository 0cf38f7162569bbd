"""CoNLL-U reading/writing and the shared-task language registry.

Only the columns the tasks need (ID, FORM, LEMMA, UPOS, FEATS) are decoded;
the other five are kept verbatim so that an unmodified corpus serializes back
to exactly the bytes it was parsed from.  Multiword ranges ("1-2") and empty
nodes ("1.1") are carried as raw lines and never become prediction targets.
"""
from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ParseError, UnknownLanguage

N_COLUMNS = 10
EMPTY = "_"


@dataclass(frozen=True)
class LanguageInfo:
    code: str
    name: str
    train_sentences: int
    valid_sentences: int
    test_sentences: int
    # Irish variants ship gap-filling data only: no LEMMA/UPOS/FEATS
    gap_fill_only: bool = False


_REGISTRY = [
    LanguageInfo("grc", "Ancient Greek", 24800, 3100, 3101),
    LanguageInfo("hbo", "Ancient Hebrew", 1263, 158, 158),
    LanguageInfo("lzh", "Classical Chinese", 68991, 8624, 8624),
    LanguageInfo("cop", "Coptic", 1730, 216, 217),
    LanguageInfo("got", "Gothic", 4320, 540, 541),
    LanguageInfo("isl", "Medieval Icelandic", 21820, 2728, 2728),
    LanguageInfo("lat", "Classical and Late Latin", 16769, 2096, 2097),
    LanguageInfo("latm", "Medieval Latin", 30176, 3772, 3773),
    LanguageInfo("chu", "Old Church Slavonic", 18102, 2263, 2263),
    LanguageInfo("orv", "Old East Slavic", 24788, 3098, 3099),
    LanguageInfo("fro", "Old French", 3113, 389, 390),
    LanguageInfo("san", "Vedic Sanskrit", 3197, 400, 400),
    LanguageInfo("ohu", "Old Hungarian", 21346, 2668, 2669),
    LanguageInfo("sga", "Old Irish", 8748, 1093, 1094, gap_fill_only=True),
    LanguageInfo("mga", "Middle Irish", 14308, 1789, 1789, gap_fill_only=True),
    LanguageInfo("ghc", "Early Modern Irish", 24440, 3055, 3056, gap_fill_only=True),
]
LANGUAGES: dict[str, LanguageInfo] = {info.code: info for info in _REGISTRY}
OTHER = "other"


def language_info(code: str) -> LanguageInfo:
    try:
        return LANGUAGES[code]
    except KeyError:
        raise UnknownLanguage(code) from None


def check_language(code: str) -> str:
    if code != OTHER and code not in LANGUAGES:
        raise UnknownLanguage(code)
    return code


@dataclass
class TokenRecord:
    id: int
    form: str
    lemma: str = ""
    upos: str = ""
    feats: dict[str, str] = field(default_factory=dict)
    # XPOS, HEAD, DEPREL, DEPS, MISC
    passthrough: list[str] = field(default_factory=lambda: [EMPTY] * 5)

    def to_line(self) -> str:
        feats = "|".join(f"{k}={v}" for k, v in self.feats.items()) or EMPTY
        xpos, *rest = self.passthrough
        cols = [str(self.id), self.form, self.lemma or EMPTY, self.upos or EMPTY, xpos, feats]
        return "\t".join(cols + rest)


@dataclass
class Sentence:
    tokens: list[TokenRecord] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    # (number of word tokens preceding the line, raw line) for multiword
    # ranges, empty nodes and comments that appear after the first token
    extras: list[tuple[int, str]] = field(default_factory=list)

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def lines(self) -> list[str]:
        out = list(self.comments)
        extras = sorted(self.extras, key=lambda e: e[0])
        ei = 0
        for i, tok in enumerate(self.tokens):
            while ei < len(extras) and extras[ei][0] <= i:
                out.append(extras[ei][1])
                ei += 1
            out.append(tok.to_line())
        out.extend(line for _, line in extras[ei:])
        return out


@dataclass
class Corpus:
    language: str = OTHER
    sentences: list[Sentence] = field(default_factory=list)

    def __post_init__(self):
        check_language(self.language)

    def tokens(self) -> Iterator[TokenRecord]:
        for sent in self.sentences:
            yield from sent.tokens

    def __len__(self):
        return len(self.sentences)


def _parse_feats(raw: str, line_no: int) -> dict[str, str]:
    if raw == EMPTY:
        return {}
    feats: dict[str, str] = {}
    for item in raw.split("|"):
        name, eq, value = item.partition("=")
        if not eq or not name:
            raise ParseError(f"malformed feature {item!r}", line_no)
        if name in feats:
            raise ParseError(f"duplicate feature {name!r}", line_no)
        feats[name] = value
    return feats


def _parse_token(line: str, line_no: int, expected_id: int) -> TokenRecord | None:
    cols = line.split("\t")
    if len(cols) != N_COLUMNS:
        raise ParseError(f"expected {N_COLUMNS} columns, got {len(cols)}", line_no)
    raw_id = cols[0]
    if "-" in raw_id or "." in raw_id:
        return None
    try:
        tok_id = int(raw_id)
    except ValueError:
        raise ParseError(f"non-integer token id {raw_id!r}", line_no) from None
    if tok_id != expected_id:
        raise ParseError(f"expected token id {expected_id}, got {tok_id}", line_no)
    return TokenRecord(
        id=tok_id,
        form=cols[1],
        lemma="" if cols[2] == EMPTY else cols[2],
        upos="" if cols[3] == EMPTY else cols[3],
        feats=_parse_feats(cols[5], line_no),
        passthrough=[cols[4]] + cols[6:],
    )


def parse_conllu(text: str, language: str = OTHER) -> Corpus:
    corpus = Corpus(language=language)
    sent = Sentence()
    started = False

    def flush():
        nonlocal sent, started
        if started:
            corpus.sentences.append(sent)
        sent, started = Sentence(), False

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            flush()
            continue
        started = True
        if line.startswith("#"):
            if sent.tokens or sent.extras:
                sent.extras.append((len(sent.tokens), line))
            else:
                sent.comments.append(line)
            continue
        tok = _parse_token(line, line_no, len(sent.tokens) + 1)
        if tok is None:
            sent.extras.append((len(sent.tokens), line))
        else:
            sent.tokens.append(tok)
    flush()
    return corpus


def serialize_conllu(corpus: Corpus) -> str:
    return "".join("\n".join(sent.lines()) + "\n\n" for sent in corpus.sentences)


def read_conllu(path: str | os.PathLike, language: str = OTHER) -> Corpus:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_conllu(f.read(), language)


def write_conllu(corpus: Corpus, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(serialize_conllu(corpus))


def corpus_stats(corpus: Corpus) -> dict:
    """Sentence/token counts and annotation coverage of a corpus."""
    tokens = list(corpus.tokens())
    forms = Counter(t.form for t in tokens)
    return {
        "language": corpus.language,
        "sentences": len(corpus.sentences),
        "tokens": len(tokens),
        "types": len(forms),
        "with_lemma": sum(1 for t in tokens if t.lemma),
        "with_upos": sum(1 for t in tokens if t.upos),
        "with_feats": sum(1 for t in tokens if t.feats),
    }


def read_index_labels(text: str) -> dict[int, str]:
    """Parse externally predicted labels: one ``token-index<TAB>label`` per line.

    Token indices are 0-based and run over all word tokens of a corpus in
    order, ignoring sentence boundaries.
    """
    labels = {}
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        idx, tab, label = line.partition("\t")
        if not tab:
            raise ParseError("expected 2 tab-separated columns", line_no)
        try:
            key = int(idx)
        except ValueError:
            raise ParseError(f"non-integer token index {idx!r}", line_no) from None
        if key in labels:
            raise ParseError(f"duplicate token index {key}", line_no)
        labels[key] = label
    return labels
