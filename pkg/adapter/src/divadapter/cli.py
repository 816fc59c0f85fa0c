"""Command line front end: `divadapter export`."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .errors import AdapterError, CorpusError
from .export import ExportJob, export

DEFAULTS = {"model": "offline:default", "layer": 6, "batch_size": 32,
            "hidden_size": 64}


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config {path}: {exc}", file=sys.stderr)
        raise SystemExit(1)
    except json.JSONDecodeError as exc:
        print(f"error: config {path} is not valid JSON: {exc.msg}", file=sys.stderr)
        raise SystemExit(2)
    if not isinstance(cfg, dict):
        print(f"error: config {path} must hold a JSON object", file=sys.stderr)
        raise SystemExit(2)
    return cfg


def _resolve(args: argparse.Namespace, cfg: dict, key: str):
    # flags win over the config file, which wins over defaults
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return DEFAULTS.get(key)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="divadapter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="annotate a corpus with model outputs")
    p.add_argument("--input", required=True, help="generation corpus (JSONL)")
    p.add_argument("--out-corpus", required=True, dest="out_corpus")
    p.add_argument("--out-store", dest="out_store",
                   help="embedding store path (required with embeddings)")
    p.add_argument("--fields", required=True,
                   help="comma list from: logprobs, quality, embeddings")
    p.add_argument("--model", help="model id; offline:<name> or hf:<name>")
    p.add_argument("--layer", type=int, help="embedding layer index (default 6)")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--hidden-size", type=int, dest="hidden_size",
                   help="offline embedder width (default 64)")
    p.add_argument("--config", help="JSON file supplying option defaults")

    args = parser.parse_args(argv)
    cfg = _load_config(args.config)

    job = ExportJob(
        model=_resolve(args, cfg, "model"),
        corpus_path=args.input,
        fields=frozenset(f.strip() for f in args.fields.split(",") if f.strip()),
        out_corpus=args.out_corpus,
        out_store=_resolve(args, cfg, "out_store"),
        layer=_resolve(args, cfg, "layer"),
        batch_size=_resolve(args, cfg, "batch_size"),
        hidden_size=_resolve(args, cfg, "hidden_size"),
    )
    try:
        result = export(job)
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"annotated {result.annotated} record(s), {result.failed} in "
          f"{result.failures_path}", file=sys.stderr)
    if result.store_entries:
        print(f"wrote {result.store_entries} embedding entries", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
