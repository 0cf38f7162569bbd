"""HTTP annotation service over read-only models.

Model directory layout, one subdirectory per language::

    <model_dir>/<lang>/tokenizer.json
                      /lemmatizer.json
                      /tagger.json
                      /charvocab.json
                      /ngram.json

Every file is optional; a task whose model is missing answers 404.
"""
from __future__ import annotations

import logging
import os
import socket
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .corpus_io import LANGUAGES
from .errors import AncientNLPError
from .gapfill_char import NOT_APPLICABLE, CandidateVocab, fill_sentence_chars
from .gapfill_word import DecoderConfig, NGramScorer, fill_word_masks
from .lemma import LemmaModel
from .morphotag import TagModel, predict_tags
from .subword import SubwordModel

logger = logging.getLogger(__name__)

MODEL_DIR_ENV = "ANCIENTNLP_MODEL_DIR"
MODEL_FILES = {
    "tokenizer": ("tokenizer.json", SubwordModel),
    "lemmatizer": ("lemmatizer.json", LemmaModel),
    "tagger": ("tagger.json", TagModel),
    "charvocab": ("charvocab.json", CandidateVocab),
    "ngram": ("ngram.json", NGramScorer),
}


@dataclass
class AppConfig:
    model_dir: str = "models"
    languages: list[str] | None = None  # None: every subdirectory
    k: int = 1
    host: str = "127.0.0.1"
    port: int = 8000

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    def resolved_model_dir(self) -> Path:
        return Path(os.environ.get(MODEL_DIR_ENV) or self.model_dir)


@dataclass
class LanguageModels:
    tokenizer: SubwordModel | None = None
    lemmatizer: LemmaModel | None = None
    tagger: TagModel | None = None
    charvocab: CandidateVocab | None = None
    ngram: NGramScorer | None = None


@dataclass
class ModelStore:
    languages: dict[str, LanguageModels] = field(default_factory=dict)

    @classmethod
    def load(cls, model_dir: str | os.PathLike, languages: list[str] | None = None) -> "ModelStore":
        root = Path(model_dir)
        if languages is None:
            languages = sorted(p.name for p in root.iterdir() if p.is_dir()) if root.is_dir() else []
        store = cls()
        for lang in languages:
            lang_dir = root / lang
            if not lang_dir.is_dir():
                raise FileNotFoundError(f"no model directory for {lang!r} under {root}")
            models = LanguageModels()
            for attr, (fname, kind) in MODEL_FILES.items():
                path = lang_dir / fname
                if path.exists():
                    setattr(models, attr, kind.load(path))
            if models.ngram is not None and models.tokenizer is not None:
                if models.ngram.vocab_size != len(models.tokenizer):
                    raise AncientNLPError(f"{lang}: n-gram scorer does not match the tokenizer vocabulary")
            store.languages[lang] = models
            logger.info("loaded models for %s", lang)
        return store


class SentencesRequest(BaseModel):
    sentences: list[str | list[str]]
    k: int | None = Field(default=None, ge=0)


def _tokens(sentence: str | list[str]) -> list[str]:
    return sentence.split() if isinstance(sentence, str) else list(sentence)


def _text(sentence: str | list[str]) -> str:
    return sentence if isinstance(sentence, str) else " ".join(sentence)


def create_app(store: ModelStore, config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    app = FastAPI(title="ancientnlp annotation service")

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request body"})

    @app.exception_handler(AncientNLPError)
    async def model_error(request: Request, exc: AncientNLPError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def need(lang: str, attr: str):
        models = store.languages.get(lang)
        if models is None:
            raise HTTPException(404, f"language {lang!r} is not loaded")
        model = getattr(models, attr)
        if model is None:
            raise HTTPException(404, f"no {attr} model loaded for {lang!r}")
        return model

    @app.get("/health", response_class=PlainTextResponse)
    def health():
        return "ok"

    @app.get("/v1/languages")
    def languages():
        return {
            "registry": [
                {
                    "code": info.code,
                    "name": info.name,
                    "train_sentences": info.train_sentences,
                    "valid_sentences": info.valid_sentences,
                    "test_sentences": info.test_sentences,
                    "gap_fill_only": info.gap_fill_only,
                }
                for info in LANGUAGES.values()
            ],
            "loaded": sorted(store.languages),
        }

    @app.post("/v1/{lang}/lemmatize")
    def lemmatize(lang: str, body: SentencesRequest):
        model = need(lang, "lemmatizer")
        return {"sentences": [[model.predict(f) for f in _tokens(s)] for s in body.sentences]}

    @app.post("/v1/{lang}/tag")
    def tag(lang: str, body: SentencesRequest):
        model = need(lang, "tagger")
        out = []
        for s in body.sentences:
            forms = _tokens(s)
            out.append(
                [
                    {"form": f, "upos": lab.upos, "feats": dict(lab.feats), "label": str(lab)}
                    for f, lab in zip(forms, predict_tags(model, forms))
                ]
            )
        return {"sentences": out}

    @app.post("/v1/{lang}/fill-chars")
    def fill_chars(lang: str, body: SentencesRequest):
        vocab = need(lang, "charvocab")
        if lang in NOT_APPLICABLE:
            raise HTTPException(422, f"character gap filling is not applicable to {lang!r}")
        return {"sentences": [fill_sentence_chars(vocab, _text(s)) for s in body.sentences]}

    @app.post("/v1/{lang}/fill-words")
    def fill_words(lang: str, body: SentencesRequest):
        scorer = need(lang, "ngram")
        tok = need(lang, "tokenizer")
        k = config.k if body.k is None else body.k
        dec = DecoderConfig.for_language(lang, k=k)
        return {"sentences": [fill_word_masks(scorer, tok, _text(s), dec) for s in body.sentences]}

    return app


def check_port(host: str, port: int) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        s.bind((host, port))


def serve(config: AppConfig) -> None:
    import uvicorn

    store = ModelStore.load(config.resolved_model_dir(), config.languages)
    check_port(config.host, config.port)
    uvicorn.run(create_app(store, config), host=config.host, port=config.port)
