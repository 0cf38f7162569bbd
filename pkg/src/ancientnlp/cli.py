"""Command line interface: ``ancientnlp <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus_io import read_conllu, read_index_labels, serialize_conllu
from .errors import AncientNLPError
from .evaluation import EvalReport, score_corpora, score_gap_lines
from .gapfill_char import CandidateVocab, build_candidate_vocab, check_applicable, fill_sentence_chars
from .gapfill_word import DecoderConfig, NGramScorer, PrecomputedScorer, fill_word_masks, train_ngram_from_text
from .lemma import LemmaModel, apply_rule_labels, lemmatize_corpus, train_lemmatizer
from .morphotag import TagModel, apply_tag_labels, tag_corpus, train_tagger
from .persist import read_text
from .service import AppConfig, serve
from .subword import (
    CoveragePolicy,
    EmbeddingMatrix,
    InitPolicy,
    SubwordModel,
    TokenizerConfig,
    coverage_report,
    needs_custom_tokenizer,
    train_tokenizer,
    transfer_embeddings,
)

log = logging.getLogger("ancientnlp")


def read_lines(path: str) -> list[str]:
    """Text lines of a plain file, or one space-joined line per sentence of a .conllu file."""
    if path.endswith(".conllu"):
        return [" ".join(s.forms) for s in read_conllu(path).sentences]
    return read_text(path).splitlines()


def write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_analyze_coverage(args):
    model = SubwordModel.load(args.tokenizer)
    report = coverage_report(model, read_lines(args.input))
    policy = CoveragePolicy(args.threshold, args.top_rank)
    doc = {
        "total_tokens": report.total_tokens,
        "unknown_count": report.unknown_count,
        "unknown_percent": round(report.unknown_percent, 2),
        "unk_rank": report.unk_rank,
        "needs_custom_tokenizer": needs_custom_tokenizer(report, policy),
    }
    print(json.dumps(doc, indent=2))


def cmd_train_tokenizer(args):
    config = TokenizerConfig(args.vocab_size) if args.vocab_size else TokenizerConfig.for_language(args.lang)
    model = train_tokenizer(read_lines(args.input), config)
    model.save(args.out)
    log.info("trained %d pieces (cap %d)", len(model), config.vocab_size)


def cmd_transfer_embeddings(args):
    init = InitPolicy(args.init, sigma=args.sigma, seed=args.seed)
    matrix = transfer_embeddings(
        SubwordModel.load(args.old_tokenizer),
        EmbeddingMatrix.load(args.old_embeddings),
        SubwordModel.load(args.new_tokenizer),
        init,
    )
    matrix.save(args.out)


def cmd_train_lemmatizer(args):
    mode = args.mode or ("dictionary" if args.lang == "lzh" else "rules")
    train_lemmatizer(read_conllu(args.train), mode).save(args.out)


def cmd_lemmatize(args):
    corpus = read_conllu(args.input)
    if args.rule_labels:
        lemmas = apply_rule_labels(corpus, read_index_labels(read_text(args.rule_labels)))
        for sent, row in zip(corpus.sentences, lemmas):
            for tok, lemma in zip(sent.tokens, row):
                tok.lemma = lemma
        out = corpus
    else:
        out = lemmatize_corpus(LemmaModel.load(args.model), corpus)
    write_output(serialize_conllu(out), args.out)


def cmd_train_tagger(args):
    train_tagger(read_conllu(args.train)).save(args.out)


def cmd_tag(args):
    corpus = read_conllu(args.input)
    if args.labels:
        out = apply_tag_labels(corpus, read_index_labels(read_text(args.labels)))
    else:
        out = tag_corpus(TagModel.load(args.model), corpus)
    write_output(serialize_conllu(out), args.out)


def cmd_build_char_vocab(args):
    build_candidate_vocab(read_lines(args.input)).save(args.out)


def cmd_fill_chars(args):
    if args.lang:
        check_applicable(args.lang)
    vocab = CandidateVocab.load(args.vocab)
    lines = read_text(args.input).splitlines()
    filled = [fill_sentence_chars(vocab, line, strict_split=args.strict_split) for line in lines]
    write_output("".join(line + "\n" for line in filled), args.out)


def cmd_train_ngram(args):
    model = SubwordModel.load(args.tokenizer)
    train_ngram_from_text(model, read_lines(args.input), args.order, args.alpha).save(args.out)


def cmd_fill_words(args):
    model = SubwordModel.load(args.tokenizer)
    scorer = PrecomputedScorer.load(args.precomputed) if args.precomputed else NGramScorer.load(args.scorer)
    config = DecoderConfig(args.k, single_token_mode=args.single_token or args.lang == "lzh")
    lines = read_text(args.input).splitlines()
    filled = [fill_word_masks(scorer, model, line, config) for line in lines]
    write_output("".join(line + "\n" for line in filled), args.out)


def cmd_evaluate(args):
    if args.task in ("char_fill", "word_fill"):
        if not args.masked:
            print("ancientnlp evaluate: error: --masked is required for gap-filling tasks", file=sys.stderr)
            return 2
        score = score_gap_lines(
            args.task,
            read_text(args.masked).splitlines(),
            read_text(args.gold).splitlines(),
            read_text(args.pred).splitlines(),
        )
    else:
        score = score_corpora(args.task, read_conllu(args.gold), read_conllu(args.pred))
    if args.json:
        report = EvalReport(args.lang)
        report.add(score)
        print(report.to_json())
    else:
        print(f"{score.task}\taccuracy={score.accuracy:.4f}\tcorrect={score.correct}\tcounted={score.counted}")


def cmd_serve(args):
    serve(AppConfig(model_dir=args.model_dir, languages=args.lang or None, k=args.k, host=args.host, port=args.port))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ancientnlp", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze-coverage", help="unknown-piece statistics and the custom-tokenizer decision")
    s.add_argument("--tokenizer", required=True)
    s.add_argument("--input", required=True, help="plain text or .conllu")
    s.add_argument("--threshold", type=float, default=5.0, help="unknown percentage threshold")
    s.add_argument("--top-rank", type=int, default=10)
    s.set_defaults(func=cmd_analyze_coverage)

    s = sub.add_parser("train-tokenizer")
    s.add_argument("--lang", default="other")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--vocab-size", type=int, help="default 3000, 10000 for lzh")
    s.set_defaults(func=cmd_train_tokenizer)

    s = sub.add_parser("transfer-embeddings")
    s.add_argument("--old-tokenizer", required=True)
    s.add_argument("--old-embeddings", required=True)
    s.add_argument("--new-tokenizer", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--init", choices=["zero", "gaussian"], default="zero")
    s.add_argument("--sigma", type=float, default=0.02)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_transfer_embeddings)

    s = sub.add_parser("train-lemmatizer")
    s.add_argument("--lang", default="other")
    s.add_argument("--train", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--mode", choices=["rules", "dictionary"], help="default: dictionary for lzh, rules otherwise")
    s.set_defaults(func=cmd_train_lemmatizer)

    s = sub.add_parser("lemmatize")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model")
    g.add_argument("--rule-labels", help="TSV of token-index and predicted rule label")
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lemmatize)

    s = sub.add_parser("train-tagger")
    s.add_argument("--train", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_tagger)

    s = sub.add_parser("tag")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model")
    g.add_argument("--labels", help="TSV of token-index and predicted label string")
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_tag)

    s = sub.add_parser("build-char-vocab")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_build_char_vocab)

    s = sub.add_parser("fill-chars")
    s.add_argument("--vocab", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.add_argument("--lang")
    s.add_argument("--strict-split", action="store_true", help="split only when both parts are known words")
    s.set_defaults(func=cmd_fill_chars)

    s = sub.add_parser("train-ngram")
    s.add_argument("--tokenizer", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--order", type=int, default=3)
    s.add_argument("--alpha", type=float, default=0.1)
    s.set_defaults(func=cmd_train_ngram)

    s = sub.add_parser("fill-words")
    s.add_argument("--tokenizer", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--scorer", help="n-gram scorer JSON")
    g.add_argument("--precomputed", help="JSON lines of precomputed mask distributions")
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.add_argument("--k", type=_nonnegative, default=1)
    s.add_argument("--lang")
    s.add_argument("--single-token", action="store_true")
    s.set_defaults(func=cmd_fill_words)

    s = sub.add_parser("evaluate")
    s.add_argument("--task", required=True, choices=["pos", "feats", "lemma", "char_fill", "word_fill"])
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--masked", help="masked input lines (gap-filling tasks)")
    s.add_argument("--lang", default="other")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("serve")
    s.add_argument("--model-dir", default="models")
    s.add_argument("--lang", action="append", help="language to load (repeatable); default: all")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--k", type=_nonnegative, default=1)
    s.set_defaults(func=cmd_serve)
    return p


def _nonnegative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return n


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args) or 0
    except (AncientNLPError, OSError, ValueError) as e:
        print(f"ancientnlp {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
