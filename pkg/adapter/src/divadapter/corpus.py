"""Minimal reader/writer for the corpus JSONL format.

Independent of divcurate on purpose: the exported file crossing the
format boundary is the whole point of this package, so serialization
here follows docs/formats.md in the main repository, not shared code.
Records are kept as plain dicts and written back with every input
field preserved.
"""

from __future__ import annotations

import json
import re
from typing import Any, Iterable

from .errors import CorpusError

SCHEMA_VERSION = 1
KIND_CORPUS = "corpus"

_WORD = re.compile(r"[a-z0-9']+")


def tokenize(text: str) -> list[str]:
    """The adapter's own token accounting: lowercase word tokens."""
    return _WORD.findall(text.lower())


def dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def read_corpus(path: str) -> list[dict]:
    """Strict read; any malformed line aborts with its line number."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise CorpusError(f"{path}: empty file, header line required")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}:1: header is not valid JSON") from exc
    if not isinstance(header, dict) or header.get("schema_version") != SCHEMA_VERSION \
            or header.get("kind") != KIND_CORPUS:
        raise CorpusError(f"{path}:1: expected corpus header with schema_version "
                          f"{SCHEMA_VERSION}, found {lines[0][:80]!r}")
    records = []
    seen: set[str] = set()
    for idx, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}:{idx}: invalid JSON: {exc.msg}") from exc
        _check_record(obj, f"{path}:{idx}")
        if obj["id"] in seen:
            raise CorpusError(f"{path}:{idx}: duplicate id {obj['id']!r}")
        seen.add(obj["id"])
        records.append(obj)
    return records


def _check_record(obj: Any, where: str) -> None:
    # only what the exporter itself relies on; full validation is the
    # consumer's job on ingest
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}: record must be an object")
    if not isinstance(obj.get("id"), str) or not obj["id"]:
        raise CorpusError(f"{where}: id must be a non-empty string")
    for side in ("first", "second"):
        resp = obj.get(side)
        if not isinstance(resp, dict):
            raise CorpusError(f"{where}: {side} response is required")
        text = resp.get("text")
        if not isinstance(text, str) or not text.strip():
            raise CorpusError(f"{where}: {side}.text must be a non-empty string")


def write_corpus(records: Iterable[dict], path: str) -> int:
    lines = [dumps({"schema_version": SCHEMA_VERSION, "kind": KIND_CORPUS})]
    count = 0
    for rec in records:
        lines.append(dumps(rec))
        count += 1
    _write_lines(path, lines)
    return count


def write_failures(failures: Iterable[dict], path: str) -> int:
    """Sidecar of records the export could not annotate, one reason each."""
    lines = [dumps(f) for f in failures]
    _write_lines(path, lines)
    return len(lines)


def _write_lines(path: str, lines: list[str]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in lines:
                fh.write(line)
                fh.write("\n")
    except OSError as exc:
        raise CorpusError(f"cannot write {path}: {exc}") from exc
