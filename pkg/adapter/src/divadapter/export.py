"""The export pipeline: corpus in, annotated corpus + embedding store out.

Every input record is either fully annotated with the requested fields
or listed in the failures sidecar with a reason; nothing is silently
half-done. Outputs carry no timestamps, so re-running an export over
the same inputs produces byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import corpus as corpus_io
from .backends import ALL_FIELDS, FIELD_EMBEDDINGS, FIELD_LOGPROBS, FIELD_QUALITY, resolve_backend
from .corpus import tokenize
from .errors import AdapterError, TokenizationMismatch, UnsupportedField

SIDES = ("first", "second")


@dataclass(frozen=True)
class ExportJob:
    model: str
    corpus_path: str
    fields: frozenset
    out_corpus: str
    out_store: Optional[str] = None
    layer: int = 6
    batch_size: int = 32
    hidden_size: int = 64

    def validate(self) -> None:
        if not self.fields:
            raise AdapterError("no fields requested")
        unknown = set(self.fields) - ALL_FIELDS
        if unknown:
            raise AdapterError(f"unknown fields: {sorted(unknown)} "
                               f"(known: {sorted(ALL_FIELDS)})")
        if FIELD_EMBEDDINGS in self.fields and not self.out_store:
            raise AdapterError("embeddings requested but no store path given")
        if self.layer < 0:
            raise AdapterError(f"layer must be >= 0, got {self.layer}")
        if self.batch_size < 1:
            raise AdapterError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass
class ExportResult:
    annotated: int = 0
    failed: int = 0
    store_entries: int = 0
    failures_path: str = ""


def export(job: ExportJob, backend=None) -> ExportResult:
    job.validate()
    if backend is None:
        backend = resolve_backend(job.model, hidden_size=job.hidden_size)
    unsupported = set(job.fields) - set(backend.supported)
    if unsupported:
        raise UnsupportedField(
            f"model {job.model!r} cannot produce {sorted(unsupported)} "
            f"(supports {sorted(backend.supported)})")

    records = corpus_io.read_corpus(job.corpus_path)
    backend.prepare([rec[side]["text"] for rec in records for side in SIDES])

    annotated: list[dict] = []
    failures: list[dict] = []
    store_rows: list = []
    for start in range(0, len(records), job.batch_size):
        batch = records[start:start + job.batch_size]
        usable, batch_failures = _split_tokenizable(batch)
        failures.extend(batch_failures)
        if not usable:
            continue
        texts = [rec[side]["text"] for rec in usable for side in SIDES]

        logprobs = backend.token_logprobs(texts) if FIELD_LOGPROBS in job.fields else None
        qualities = backend.quality(texts) if FIELD_QUALITY in job.fields else None
        matrices = backend.embed(texts, job.layer) if FIELD_EMBEDDINGS in job.fields else None

        for i, rec in enumerate(usable):
            out = dict(rec)
            for j, side in enumerate(SIDES):
                resp = dict(rec[side])
                pos = 2 * i + j
                if logprobs is not None:
                    toks, lps = logprobs[pos]
                    own = len(tokenize(rec[side]["text"]))
                    if len(lps) != own:
                        raise TokenizationMismatch(
                            f"record {rec['id']!r} {side}: backend returned {len(lps)} "
                            f"logprobs for {own} tokens")
                    resp["token_logprobs"] = lps
                if qualities is not None:
                    resp["quality_score"] = qualities[pos]
                if matrices is not None:
                    key = f"{rec['id']}/{side}"
                    resp["embedding_ref"] = key
                    store_rows.append((key, matrices[pos]))
                out[side] = resp
            annotated.append(out)

    corpus_io.write_corpus(annotated, job.out_corpus)
    failures_path = job.out_corpus + ".failures.jsonl"
    corpus_io.write_failures(failures, failures_path)
    result = ExportResult(annotated=len(annotated), failed=len(failures),
                          failures_path=failures_path)
    if FIELD_EMBEDDINGS in job.fields:
        from .store import write_store
        result.store_entries = write_store(job.out_store, store_rows, backend.hidden_size)
    return result


def _split_tokenizable(batch: list[dict]) -> tuple[list[dict], list[dict]]:
    """Records with a token-free response can't be annotated at all."""
    usable, failures = [], []
    for rec in batch:
        empty = [side for side in SIDES if not tokenize(rec[side]["text"])]
        if empty:
            failures.append({"id": rec["id"],
                             "reason": f"no word tokens in {' and '.join(empty)}"})
        else:
            usable.append(rec)
    return usable, failures
