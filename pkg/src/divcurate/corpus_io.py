"""Line-delimited JSON readers and writers for every file the toolkit touches.

Every file starts with a header line {"schema_version": 1, "kind": ...}.
Readers reject unknown schema versions and wrong kinds up front. Writers
emit UTF-8 with '\n' line endings and compact separators so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import (
    DuplicateId,
    InvariantViolation,
    IoFailure,
    MissingFile,
    SchemaViolation,
)
from .records import GenerationRecord, Judgment, PairMethod, PreferencePair, TaggedText

SCHEMA_VERSION = 1

KIND_CORPUS = "corpus"
KIND_PAIRS = "pairs"
KIND_TAGGED = "tagged"
KIND_JUDGMENTS = "judgments"
KIND_DECILE_MAP = "decile_map"
KIND_EVAL_PAIRS = "eval_pairs"
KIND_REPORT = "report"


def dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _open_lines(path: str) -> list[str]:
    if not os.path.exists(path):
        raise MissingFile(f"no such file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IoFailure(f"{path} is not valid UTF-8: {exc}") from exc


def check_header(line: str, expect_kind: str, path: str = "") -> None:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: header line is not valid JSON", line=1) from exc
    if not isinstance(obj, dict):
        raise SchemaViolation(f"{path}: header must be an object", line=1)
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaViolation(
            f"{path}: unsupported schema_version {version!r} (supported: {SCHEMA_VERSION})",
            line=1, field="schema_version")
    kind = obj.get("kind")
    if kind != expect_kind:
        raise SchemaViolation(f"{path}: expected kind {expect_kind!r}, found {kind!r}",
                              line=1, field="kind")


def header_line(kind: str) -> str:
    return dumps({"schema_version": SCHEMA_VERSION, "kind": kind})


def _read_lines(path: str, kind: str, parse: Callable[[Any, int], Any],
                strict: bool) -> tuple[list, int]:
    lines = _open_lines(path)
    if not lines:
        raise SchemaViolation(f"{path}: empty file, header line required", line=1)
    check_header(lines[0], kind, path)
    out: list = []
    skipped = 0
    for idx, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            out.append(parse(obj, idx))
        except SchemaViolation:
            if strict:
                raise
            skipped += 1
        except json.JSONDecodeError as exc:
            if strict:
                raise SchemaViolation(f"invalid JSON: {exc.msg}", line=idx) from exc
            skipped += 1
    return out, skipped


@dataclass(frozen=True)
class CorpusReadResult:
    records: tuple[GenerationRecord, ...]
    skipped: int

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def read_corpus(path: str, strict: bool = True) -> CorpusReadResult:
    """Read a generation corpus.

    In strict mode the first malformed line (or duplicate id) aborts the
    read with a precise error. In lenient mode malformed lines are
    skipped and counted; a duplicate id counts as malformed and the
    earlier record wins.
    """
    seen: dict[str, int] = {}

    def parse(obj: Any, line: int) -> GenerationRecord:
        rec = GenerationRecord.from_dict(obj, line)
        if rec.id in seen:
            raise DuplicateId(
                f"id {rec.id!r} already used on line {seen[rec.id]}", line=line, field="id")
        seen[rec.id] = line
        return rec

    records, skipped = _read_lines(path, KIND_CORPUS, parse, strict)
    return CorpusReadResult(records=tuple(records), skipped=skipped)


def write_corpus(records: Iterable[GenerationRecord], path: str) -> int:
    lines = [header_line(KIND_CORPUS)]
    count = 0
    for rec in records:
        lines.append(dumps(rec.to_dict()))
        count += 1
    _write_text(path, lines)
    return count


def validate_pair(pair: PreferencePair, max_len_delta: int = 5) -> None:
    """Enforce the pair contract before a pair is persisted.

    Pairs from the length-controlled filters must keep the word-count
    gap within max_len_delta and carry strictly positive gains.
    """
    if pair.method in (PairMethod.DNS, PairMethod.DNS_LITE):
        delta = abs(pair.length_delta())
        if delta > max_len_delta:
            raise InvariantViolation(
                f"pair {pair.pair_id!r}: |word-count delta| = {delta} exceeds {max_len_delta}")
        if not pair.diversity_gain > 0:
            raise InvariantViolation(
                f"pair {pair.pair_id!r}: diversity_gain must be > 0, got {pair.diversity_gain}")
        if not pair.quality_gain > 0:
            raise InvariantViolation(
                f"pair {pair.pair_id!r}: quality_gain must be > 0, got {pair.quality_gain}")


def write_pairs(pairs: Sequence[PreferencePair], path: str,
                max_len_delta: int = 5) -> int:
    """Validate then write preference pairs; returns the count written."""
    for pair in pairs:
        validate_pair(pair, max_len_delta)
    lines = [header_line(KIND_PAIRS)]
    lines.extend(dumps(p.to_dict()) for p in pairs)
    _write_text(path, lines)
    return len(pairs)


def read_pairs(path: str, strict: bool = True) -> list[PreferencePair]:
    pairs, _ = _read_lines(path, KIND_PAIRS, PreferencePair.from_dict, strict)
    return pairs


def read_tagged(path: str, strict: bool = True) -> list[TaggedText]:
    docs, _ = _read_lines(path, KIND_TAGGED, TaggedText.from_dict, strict)
    return docs


def read_judgments(path: str, strict: bool = True) -> list[Judgment]:
    judgments, _ = _read_lines(path, KIND_JUDGMENTS, Judgment.from_dict, strict)
    return judgments


def _write_text(path: str, lines: Sequence[str]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in lines:
                fh.write(line)
                fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_report_lines(path: str, rows: Iterable[dict]) -> int:
    """Write a machine-readable report file (one JSON object per row)."""
    lines = [header_line(KIND_REPORT)]
    count = 0
    for row in rows:
        lines.append(dumps(row))
        count += 1
    _write_text(path, lines)
    return count
