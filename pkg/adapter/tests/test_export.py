import json
import struct
import subprocess
import sys

import numpy as np
import pytest

from divadapter.backends import ALL_FIELDS
from divadapter.errors import AdapterError, CorpusError, TokenizationMismatch, UnsupportedField
from divadapter.export import ExportJob, export

from conftest import build_corpus, read_jsonl


def job_for(corpus_path, tmp_path, fields, **kw):
    return ExportJob(
        model=kw.pop("model", "offline:demo"),
        corpus_path=corpus_path,
        fields=frozenset(fields),
        out_corpus=str(tmp_path / kw.pop("out_name", "annotated.jsonl")),
        out_store=str(tmp_path / "emb.embs") if "embeddings" in fields else None,
        **kw)


def test_quality_export_populates_both_sides(corpus_path, tmp_path):
    job = job_for(corpus_path, tmp_path, {"quality"})
    result = export(job)
    assert result.annotated == 12 and result.failed == 0
    rows = read_jsonl(job.out_corpus)
    header, records = rows[0], rows[1:]
    assert header == {"schema_version": 1, "kind": "corpus"}
    for rec in records:
        for side in ("first", "second"):
            assert 0.0 < rec[side]["quality_score"] < 1.0
            assert "token_logprobs" not in rec[side]  # only what was asked


def test_store_header_carries_model_width(corpus_path, tmp_path):
    job = job_for(corpus_path, tmp_path, {"embeddings"}, hidden_size=48)
    result = export(job)
    raw = open(job.out_store, "rb").read()
    assert raw[:4] == b"EMBS"
    version, dims, count = struct.unpack_from("<III", raw, 4)
    assert (version, dims, count) == (1, 48, 24)
    assert result.store_entries == 24
    refs = [rec[side]["embedding_ref"]
            for rec in read_jsonl(job.out_corpus)[1:] for side in ("first", "second")]
    assert refs[0] == "r0000/first" and len(set(refs)) == 24


def test_export_is_idempotent(corpus_path, tmp_path):
    blobs = []
    for tag in ("one", "two"):
        d = tmp_path / tag
        d.mkdir()
        job = ExportJob(model="offline:demo", corpus_path=corpus_path,
                        fields=frozenset(ALL_FIELDS),
                        out_corpus=str(d / "out.jsonl"), out_store=str(d / "out.embs"))
        export(job)
        blobs.append(tuple(open(p, "rb").read() for p in
                           (job.out_corpus, job.out_store,
                            job.out_corpus + ".failures.jsonl")))
    assert blobs[0] == blobs[1]


def test_unannotatable_record_goes_to_sidecar(tmp_path):
    def mutate(records):
        records[3]["first"]["text"] = "!!! ???"
    path = build_corpus(tmp_path / "c.jsonl", mutate=mutate)
    job = job_for(path, tmp_path, {"quality", "logprobs"})
    result = export(job)
    assert result.annotated == 11 and result.failed == 1
    failures = read_jsonl(result.failures_path)
    assert failures == [{"id": "r0003", "reason": "no word tokens in first"}]
    ids = [rec["id"] for rec in read_jsonl(job.out_corpus)[1:]]
    assert "r0003" not in ids and len(ids) == 11


def test_clean_corpus_writes_empty_sidecar(corpus_path, tmp_path):
    job = job_for(corpus_path, tmp_path, {"quality"})
    result = export(job)
    assert open(result.failures_path, "rb").read() == b""


class _MiscountingBackend:
    scheme = "fake"
    name = "broken"
    supported = ALL_FIELDS
    hidden_size = 8

    def prepare(self, texts):
        pass

    def token_logprobs(self, texts):
        return [(text.split(), [-1.0]) for text in texts]


def test_backend_miscount_aborts_export(corpus_path, tmp_path):
    job = job_for(corpus_path, tmp_path, {"logprobs"})
    with pytest.raises(TokenizationMismatch, match="r0000"):
        export(job, backend=_MiscountingBackend())


class _QualityOnlyBackend(_MiscountingBackend):
    supported = frozenset({"quality"})


def test_unsupported_field_fails_before_work(corpus_path, tmp_path):
    job = job_for(corpus_path, tmp_path, {"logprobs", "quality"})
    with pytest.raises(UnsupportedField, match="logprobs"):
        export(job, backend=_QualityOnlyBackend())


def test_job_validation():
    with pytest.raises(AdapterError, match="no fields"):
        ExportJob("m", "c", frozenset(), "o").validate()
    with pytest.raises(AdapterError, match="unknown fields"):
        ExportJob("m", "c", frozenset({"logits"}), "o").validate()
    with pytest.raises(AdapterError, match="store path"):
        ExportJob("m", "c", frozenset({"embeddings"}), "o").validate()
    with pytest.raises(AdapterError, match="batch_size"):
        ExportJob("m", "c", frozenset({"quality"}), "o", batch_size=0).validate()


def test_bad_input_corpus_is_a_corpus_error(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"schema_version":1,"kind":"pairs"}\n', encoding="utf-8")
    job = ExportJob("offline:demo", str(bad), frozenset({"quality"}),
                    str(tmp_path / "o.jsonl"))
    with pytest.raises(CorpusError, match="corpus header"):
        export(job)


def test_cli_matches_library_and_respects_precedence(corpus_path, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"layer": 9, "hidden_size": 16}), encoding="utf-8")
    out_corpus = tmp_path / "cli_out.jsonl"
    out_store = tmp_path / "cli_out.embs"
    proc = subprocess.run(
        [sys.executable, "-m", "divadapter.cli", "export",
         "--input", corpus_path, "--out-corpus", str(out_corpus),
         "--out-store", str(out_store), "--fields", "quality,embeddings",
         "--model", "offline:demo", "--layer", "3", "--config", str(cfg)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "annotated 12 record(s)" in proc.stderr

    # flag --layer 3 must beat the config's 9; hidden_size 16 comes from config
    ref = ExportJob(model="offline:demo", corpus_path=corpus_path,
                    fields=frozenset({"quality", "embeddings"}),
                    out_corpus=str(tmp_path / "ref.jsonl"),
                    out_store=str(tmp_path / "ref.embs"), layer=3, hidden_size=16)
    export(ref)
    assert open(out_corpus, "rb").read() == open(ref.out_corpus, "rb").read()
    assert open(out_store, "rb").read() == open(ref.out_store, "rb").read()

    other = ExportJob(model="offline:demo", corpus_path=corpus_path,
                      fields=frozenset({"quality", "embeddings"}),
                      out_corpus=str(tmp_path / "l9.jsonl"),
                      out_store=str(tmp_path / "l9.embs"), layer=9, hidden_size=16)
    export(other)
    assert open(out_store, "rb").read() != open(other.out_store, "rb").read()


def test_batch_size_does_not_change_output(corpus_path, tmp_path):
    blobs = []
    for bs in (1, 5, 100):
        job = ExportJob(model="offline:demo", corpus_path=corpus_path,
                        fields=frozenset(ALL_FIELDS),
                        out_corpus=str(tmp_path / f"b{bs}.jsonl"),
                        out_store=str(tmp_path / f"b{bs}.embs"), batch_size=bs)
        export(job)
        blobs.append((open(job.out_corpus, "rb").read(),
                      open(job.out_store, "rb").read()))
    assert blobs[0] == blobs[1] == blobs[2]
