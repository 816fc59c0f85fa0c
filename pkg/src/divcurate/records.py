"""Record types for corpora, preference pairs, and evaluation inputs.

Everything here is an immutable value object with a from_dict/to_dict
pair. Parsing is strict by design: optional fields may be absent, but a
present field with the wrong shape is always an error. Nothing is ever
imputed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

from .errors import SchemaViolation
from .tokenizer import word_count


def _require(cond: bool, message: str, line: Optional[int], field_path: str):
    if not cond:
        raise SchemaViolation(message, line=line, field=field_path)


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class PairMethod(str, Enum):
    DNS = "DNS"
    DNS_LITE = "DNS_LITE"
    DIVPO = "DIVPO"


@dataclass(frozen=True)
class ResponseRecord:
    """One model response plus whatever per-response signals are known.

    token_logprobs, quality_score, embedding_ref and metrics are all
    optional; consumers that need an absent one must fail loudly.
    """

    text: str
    token_logprobs: Optional[tuple[float, ...]] = None
    quality_score: Optional[float] = None
    embedding_ref: Optional[str] = None
    metrics: Optional[dict[str, float]] = None

    @property
    def word_count(self) -> int:
        return word_count(self.text)

    @classmethod
    def from_dict(cls, obj: Any, line: Optional[int] = None, where: str = "response") -> "ResponseRecord":
        _require(isinstance(obj, Mapping), "response must be an object", line, where)
        text = obj.get("text")
        _require(isinstance(text, str), "text must be a string", line, f"{where}.text")
        _require(len(text.strip()) >= 1, "text must be non-empty", line, f"{where}.text")

        logprobs = obj.get("token_logprobs")
        if logprobs is not None:
            _require(isinstance(logprobs, Sequence) and not isinstance(logprobs, (str, bytes)),
                     "token_logprobs must be a list", line, f"{where}.token_logprobs")
            for i, lp in enumerate(logprobs):
                _require(_is_number(lp) and math.isfinite(lp) and lp <= 0.0,
                         "token_logprobs entries must be finite and <= 0",
                         line, f"{where}.token_logprobs[{i}]")
            logprobs = tuple(float(lp) for lp in logprobs)

        quality = obj.get("quality_score")
        if quality is not None:
            _require(_is_number(quality) and 0.0 <= quality <= 1.0,
                     "quality_score must lie in [0, 1]", line, f"{where}.quality_score")
            quality = float(quality)

        ref = obj.get("embedding_ref")
        if ref is not None:
            _require(isinstance(ref, str) and ref != "",
                     "embedding_ref must be a non-empty string", line, f"{where}.embedding_ref")

        metrics = obj.get("metrics")
        if metrics is not None:
            _require(isinstance(metrics, Mapping), "metrics must be an object", line, f"{where}.metrics")
            clean = {}
            for k, v in metrics.items():
                _require(isinstance(k, str), "metric names must be strings", line, f"{where}.metrics")
                _require(_is_number(v) and math.isfinite(v),
                         "metric values must be finite numbers", line, f"{where}.metrics.{k}")
                clean[k] = float(v)
            metrics = clean

        return cls(text=text, token_logprobs=logprobs, quality_score=quality,
                   embedding_ref=ref, metrics=metrics)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"text": self.text}
        if self.token_logprobs is not None:
            out["token_logprobs"] = list(self.token_logprobs)
        if self.quality_score is not None:
            out["quality_score"] = self.quality_score
        if self.embedding_ref is not None:
            out["embedding_ref"] = self.embedding_ref
        if self.metrics is not None:
            out["metrics"] = dict(self.metrics)
        return out

    def with_metrics(self, extra: Mapping[str, float]) -> "ResponseRecord":
        merged = dict(self.metrics or {})
        merged.update(extra)
        return ResponseRecord(self.text, self.token_logprobs, self.quality_score,
                              self.embedding_ref, merged)


@dataclass(frozen=True)
class GenerationRecord:
    """A prompt and the two responses generated for it."""

    id: str
    prompt_id: str
    prompt_text: str
    three_words: tuple[str, str, str]
    model_id: str
    first: ResponseRecord
    second: ResponseRecord

    @classmethod
    def from_dict(cls, obj: Any, line: Optional[int] = None) -> "GenerationRecord":
        _require(isinstance(obj, Mapping), "record must be an object", line, "")
        rid = obj.get("id")
        _require(isinstance(rid, str) and rid != "", "id must be a non-empty string", line, "id")
        pid = obj.get("prompt_id")
        _require(isinstance(pid, str) and pid != "", "prompt_id must be a non-empty string", line, "prompt_id")
        ptext = obj.get("prompt_text")
        _require(isinstance(ptext, str), "prompt_text must be a string", line, "prompt_text")
        words = obj.get("three_words")
        _require(isinstance(words, Sequence) and not isinstance(words, (str, bytes)) and len(words) == 3,
                 "three_words must hold exactly three entries", line, "three_words")
        for i, w in enumerate(words):
            _require(isinstance(w, str) and w != "", "three_words entries must be non-empty strings",
                     line, f"three_words[{i}]")
        model = obj.get("model_id")
        _require(isinstance(model, str) and model != "", "model_id must be a non-empty string", line, "model_id")
        _require("first" in obj, "first response is required", line, "first")
        _require("second" in obj, "second response is required", line, "second")
        first = ResponseRecord.from_dict(obj["first"], line, "first")
        second = ResponseRecord.from_dict(obj["second"], line, "second")
        return cls(id=rid, prompt_id=pid, prompt_text=ptext,
                   three_words=(words[0], words[1], words[2]),
                   model_id=model, first=first, second=second)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "prompt_id": self.prompt_id,
            "prompt_text": self.prompt_text,
            "three_words": list(self.three_words),
            "model_id": self.model_id,
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
        }

    def replace_responses(self, first: ResponseRecord, second: ResponseRecord) -> "GenerationRecord":
        return GenerationRecord(self.id, self.prompt_id, self.prompt_text,
                                self.three_words, self.model_id, first, second)


@dataclass(frozen=True)
class PreferencePair:
    """A chosen/rejected response pair produced by one of the filters.

    pair_id carries the source record id (per-record filters) or the
    prompt id (per-pool filters) so downstream ranking has a stable,
    deterministic tiebreak key.
    """

    pair_id: str
    prompt_id: str
    prompt_text: str
    chosen: ResponseRecord
    rejected: ResponseRecord
    diversity_gain: float
    quality_gain: float
    method: PairMethod

    @classmethod
    def from_dict(cls, obj: Any, line: Optional[int] = None) -> "PreferencePair":
        _require(isinstance(obj, Mapping), "pair must be an object", line, "")
        pair_id = obj.get("pair_id")
        _require(isinstance(pair_id, str) and pair_id != "", "pair_id must be a non-empty string", line, "pair_id")
        pid = obj.get("prompt_id")
        _require(isinstance(pid, str) and pid != "", "prompt_id must be a non-empty string", line, "prompt_id")
        ptext = obj.get("prompt_text")
        _require(isinstance(ptext, str), "prompt_text must be a string", line, "prompt_text")
        method_raw = obj.get("method")
        _require(method_raw in {m.value for m in PairMethod},
                 "method must be one of DNS, DNS_LITE, DIVPO", line, "method")
        for fname in ("diversity_gain", "quality_gain"):
            _require(_is_number(obj.get(fname)) and math.isfinite(obj[fname]),
                     f"{fname} must be a finite number", line, fname)
        _require("chosen" in obj, "chosen response is required", line, "chosen")
        _require("rejected" in obj, "rejected response is required", line, "rejected")
        return cls(
            pair_id=pair_id,
            prompt_id=pid,
            prompt_text=ptext,
            chosen=ResponseRecord.from_dict(obj["chosen"], line, "chosen"),
            rejected=ResponseRecord.from_dict(obj["rejected"], line, "rejected"),
            diversity_gain=float(obj["diversity_gain"]),
            quality_gain=float(obj["quality_gain"]),
            method=PairMethod(method_raw),
        )

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "prompt_id": self.prompt_id,
            "prompt_text": self.prompt_text,
            "chosen": self.chosen.to_dict(),
            "rejected": self.rejected.to_dict(),
            "diversity_gain": self.diversity_gain,
            "quality_gain": self.quality_gain,
            "method": self.method.value,
        }

    def length_delta(self) -> int:
        return self.chosen.word_count - self.rejected.word_count


@dataclass(frozen=True)
class TaggedText:
    """A document reduced to aligned token and POS-tag sequences."""

    doc_id: str
    tokens: tuple[str, ...]
    tags: tuple[str, ...]

    @classmethod
    def from_dict(cls, obj: Any, line: Optional[int] = None) -> "TaggedText":
        _require(isinstance(obj, Mapping), "tagged doc must be an object", line, "")
        did = obj.get("doc_id")
        _require(isinstance(did, str) and did != "", "doc_id must be a non-empty string", line, "doc_id")
        tokens = obj.get("tokens")
        tags = obj.get("tags")
        for name, seq in (("tokens", tokens), ("tags", tags)):
            _require(isinstance(seq, Sequence) and not isinstance(seq, (str, bytes)),
                     f"{name} must be a list of strings", line, name)
            for i, item in enumerate(seq):
                _require(isinstance(item, str), f"{name} entries must be strings", line, f"{name}[{i}]")
        _require(len(tokens) == len(tags), "tokens and tags must have equal length", line, "tags")
        return cls(doc_id=did, tokens=tuple(tokens), tags=tuple(tags))

    def to_dict(self) -> dict:
        return {"doc_id": self.doc_id, "tokens": list(self.tokens), "tags": list(self.tags)}


VALID_WINNERS = ("A", "B", "TIE")


@dataclass(frozen=True)
class Judgment:
    """One comparative judgment over a response pair."""

    pair_id: str
    winner: str

    @classmethod
    def from_dict(cls, obj: Any, line: Optional[int] = None) -> "Judgment":
        _require(isinstance(obj, Mapping), "judgment must be an object", line, "")
        pid = obj.get("pair_id")
        _require(isinstance(pid, str) and pid != "", "pair_id must be a non-empty string", line, "pair_id")
        winner = obj.get("winner")
        _require(winner in VALID_WINNERS, "winner must be A, B, or TIE", line, "winner")
        return cls(pair_id=pid, winner=winner)

    def to_dict(self) -> dict:
        return {"pair_id": self.pair_id, "winner": self.winner}
