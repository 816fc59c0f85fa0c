"""Fixture corpus builder.

Input corpora are written with plain json.dumps here, independent of
the package's own writer, so a serialization bug cannot hide behind
symmetric read/write code.
"""

import json
import random

import pytest

VOCAB = [
    "breeze", "cavern", "dapple", "ember", "frost", "gully", "harrow",
    "icicle", "jasper", "kelp", "lumen", "mire", "nettle", "onyx",
    "plume", "quill", "rustle", "sable", "tarn", "umber", "vesper",
    "wick", "yarrow", "zenith", "arbor", "bramble", "cinder", "drift",
]


def build_corpus(path, n_records=12, seed=7, words=(15, 30), mutate=None):
    rng = random.Random(seed)
    records = []
    for i in range(n_records):
        def text():
            return " ".join(rng.choice(VOCAB) for _ in range(rng.randint(*words)))
        records.append({
            "id": f"r{i:04d}",
            "prompt_id": f"p{i // 3:03d}",
            "prompt_text": "write a story using three given words",
            "three_words": ["river", "lantern", "crow"],
            "model_id": "fixture-model",
            "first": {"text": text()},
            "second": {"text": text()},
        })
    if mutate:
        mutate(records)
    lines = [json.dumps({"schema_version": 1, "kind": "corpus"}, separators=(",", ":"))]
    lines.extend(json.dumps(r, ensure_ascii=False, separators=(",", ":")) for r in records)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def corpus_path(tmp_path):
    return build_corpus(tmp_path / "corpus.jsonl")


def read_jsonl(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    return [json.loads(line) for line in lines]
