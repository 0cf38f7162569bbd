"""Canonical JSON persistence shared by every model type."""
from __future__ import annotations

import json
import os

from .errors import ModelFormatError

FORMAT_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str, kind: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    if doc.get("kind") != kind:
        raise ModelFormatError(f"expected a {kind!r} document, got {doc.get('kind')!r}")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported {kind} version {doc.get('version')!r}")
    return doc


def header(kind: str) -> dict:
    return {"kind": kind, "version": FORMAT_VERSION}


def write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def read_text(path: str | os.PathLike) -> str:
    with open(path, encoding="utf-8", newline="") as f:
        return f.read()
