"""Shared fixture builders for the test suite.

Synthetic corpora are generated from seeded RNGs so every run sees the
same bytes. Texts are space-joined alphabetic words, which keeps the
tokenizer's word count equal to the generating word count.
"""

import random

import pytest

from divcurate import corpus_io
from divcurate.records import GenerationRecord, ResponseRecord

WORDS = [
    "ash", "bend", "cliff", "dune", "ember", "fjord", "gale", "harbor",
    "inlet", "juniper", "knoll", "lagoon", "marsh", "nectar", "oasis",
    "pebble", "quartz", "ridge", "shale", "thicket", "umbra", "vale",
    "willow", "yonder", "zephyr", "basin", "crag", "delta", "eddy",
    "flint", "grove", "heath", "isle", "jetty", "kelp", "loch",
]


def make_text(rng: random.Random, n_words: int, vocab: int = len(WORDS)) -> str:
    vocab = min(vocab, len(WORDS))
    return " ".join(rng.choice(WORDS[:vocab]) for _ in range(n_words))


def make_response(rng: random.Random, n_words: int, *, quality=None,
                  metrics=None, logprobs=False, vocab: int = len(WORDS),
                  embedding_ref=None) -> ResponseRecord:
    lp = None
    if logprobs:
        lp = tuple(-rng.uniform(0.1, 6.0) for _ in range(n_words))
    return ResponseRecord(
        text=make_text(rng, n_words, vocab),
        token_logprobs=lp,
        quality_score=quality,
        embedding_ref=embedding_ref,
        metrics=metrics,
    )


def make_record(rng: random.Random, idx: int, first: ResponseRecord,
                second: ResponseRecord, prompt_id=None) -> GenerationRecord:
    return GenerationRecord(
        id=f"r{idx:05d}",
        prompt_id=prompt_id or f"p{idx // 10:04d}",
        prompt_text=f"write a story using three given words ({idx // 10})",
        three_words=("river", "lantern", "crow"),
        model_id="test-model",
        first=first,
        second=second,
    )


def write_corpus(tmp_path, records, name="corpus.jsonl"):
    path = str(tmp_path / name)
    corpus_io.write_corpus(records, path)
    return path


@pytest.fixture
def rng():
    return random.Random(20240817)
