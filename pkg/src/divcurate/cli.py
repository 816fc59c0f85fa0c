"""Command-line interface.

Subcommands: score, build-map, filter, dd-report, correlate, ttest,
pairs-for-eval, pos-report, win-rate. Every command takes --input,
--output, --config and --workers; option precedence is flags, then
config file, then built-in defaults. Outputs are byte-identical across
reruns and worker counts. Exit codes: 0 success, 1 unreadable or
missing input, 2 validation failure, 3 internal fault.

No subcommand is stochastic today; --seed is accepted so future
sampling utilities have a single place to plug in, and passing it has
no effect on any current command.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import corpus_io, decile, lexical, pairing, semantic, stats
from .embed_store import EmbeddingStore
from .errors import (
    InputError,
    IoFailure,
    MetricAbsent,
    MetricInputError,
    MissingFile,
    MissingLogprobs,
    MissingScore,
    ToolkitError,
    ValidationError,
)
from .manifest import RunManifest, file_sha256, write_metrics_manifest
from .records import GenerationRecord, PairMethod, ResponseRecord
from .tokenizer import word_count

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3

DSI_METRIC = "dsi"
FIELD_CHOICES = ("first", "second", "both")


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise MissingFile(f"no such config file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    return obj


class Options:
    """Effective option values: flag, else config file, else default."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._config = _load_config_file(self._args.get("config"))

    def get(self, name: str, default=None):
        value = self._args.get(name)
        if value is not None:
            return value
        if name in self._config:
            return self._config[name]
        return default

    def snapshot(self, names: Sequence[str], defaults: dict) -> dict:
        return {n: self.get(n, defaults.get(n)) for n in names}


def _iter_fields(record: GenerationRecord, which: str):
    if which in ("first", "both"):
        yield "first", record.first
    if which in ("second", "both"):
        yield "second", record.second


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# --- score -------------------------------------------------------------------------

DEFAULT_SCORE_METRICS = "ttr,mattr,maas,hdd,mtld,mtld_ma,mtld_ma_bi,ngram_div,comp_ratio"


def _score_one(rec: GenerationRecord, single_cfgs: tuple[lexical.MetricConfig, ...]):
    """Score both responses of one record, one metric at a time; soft
    failures are returned, not raised, so a short text cannot sink a
    whole run."""
    failures = []
    annotated = {}
    for side in ("first", "second"):
        response: ResponseRecord = getattr(rec, side)
        values = {}
        for one in single_cfgs:
            try:
                values.update(lexical.score_response(response, one).values)
            except MetricInputError as exc:
                failures.append((rec.id, side, one.metrics[0], type(exc).__name__))
        annotated[side] = response.with_metrics(values)
    return rec.replace_responses(annotated["first"], annotated["second"]), failures


def cmd_score(opts: Options) -> int:
    defaults = {"metrics": DEFAULT_SCORE_METRICS, "workers": 1, "lenient": False,
                "mattr_window": 50, "hdd_sample_size": 42, "mtld_threshold": 0.72,
                "ngram_max_n": 4, "embeddings": None}
    input_path = opts.get("input")
    output_path = opts.get("output")
    metric_names = [m.strip() for m in str(opts.get("metrics", defaults["metrics"])).split(",") if m.strip()]
    workers = int(opts.get("workers", 1))
    lenient = bool(opts.get("lenient", False))
    embeddings_path = opts.get("embeddings")

    want_dsi = DSI_METRIC in metric_names
    lexical_names = tuple(n for n in metric_names if n != DSI_METRIC)
    params = dict(
        mattr_window=int(opts.get("mattr_window", 50)),
        hdd_sample_size=int(opts.get("hdd_sample_size", 42)),
        mtld_threshold=float(opts.get("mtld_threshold", 0.72)),
        ngram_max_n=int(opts.get("ngram_max_n", 4)),
    )
    lexical.MetricConfig(metrics=lexical_names, **params)  # validate names up front
    single_cfgs = tuple(lexical.MetricConfig(metrics=(n,), **params) for n in lexical_names)

    result = corpus_io.read_corpus(input_path, strict=not lenient)
    records = list(result.records)
    if result.skipped:
        _note(f"score: skipped {result.skipped} malformed line(s)")

    # hard preconditions checked up front so they fail with a named field
    if "entropy" in lexical_names:
        for rec in records:
            for side, resp in _iter_fields(rec, "both"):
                if resp.token_logprobs is None:
                    raise MissingLogprobs(
                        f"metric 'entropy' requires field '{side}.token_logprobs' "
                        f"(absent on record {rec.id!r})")
    store = None
    if want_dsi:
        if not embeddings_path:
            raise ValidationError("metric 'dsi' requires --embeddings")
        store = EmbeddingStore(embeddings_path)
        for rec in records:
            for side, resp in _iter_fields(rec, "both"):
                if resp.embedding_ref is None:
                    raise ValidationError(
                        f"metric 'dsi' requires field '{side}.embedding_ref' "
                        f"(absent on record {rec.id!r})")

    if workers > 1 and len(records) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            scored = list(pool.map(_score_one, records,
                                   [single_cfgs] * len(records), chunksize=64))
    else:
        scored = [_score_one(rec, single_cfgs) for rec in records]

    out_records = []
    soft_failures = 0
    for rec, failures in scored:
        soft_failures += len(failures)
        out_records.append(rec)

    if want_dsi:
        final = []
        try:
            for rec in out_records:
                sides = {}
                for side, resp in _iter_fields(rec, "both"):
                    matrix = store.load(resp.embedding_ref)
                    sides[side] = resp.with_metrics({DSI_METRIC: semantic.dsi(matrix)})
                final.append(rec.replace_responses(sides["first"], sides["second"]))
        finally:
            store.close()
        out_records = final

    count = corpus_io.write_corpus(out_records, output_path)
    write_metrics_manifest(os.path.dirname(os.path.abspath(output_path)),
                           {n: lexical.METRIC_PARAMS.get(n, {}) for n in metric_names})
    man = RunManifest("score", opts.snapshot(
        ("input", "output", "metrics", "workers", "lenient", "mattr_window",
         "hdd_sample_size", "mtld_threshold", "ngram_max_n", "embeddings"), defaults))
    man.add_input("corpus", input_path)
    if embeddings_path:
        man.add_input("embeddings", embeddings_path)
    man.write(output_path)
    _note(f"score: wrote {count} record(s) to {output_path}"
          + (f", {soft_failures} soft metric failure(s)" if soft_failures else ""))
    return EXIT_OK


# --- build-map ---------------------------------------------------------------------

def _metric_samples(records, metric: str, which: str, on_missing: str = "error"):
    """(word_count, value) samples for one metric; on_missing is either
    'error' or 'skip'."""
    samples = []
    missing = 0
    for rec in records:
        for side, resp in _iter_fields(rec, which):
            try:
                value = pairing.response_score(rec.id, resp, metric)
            except MissingScore:
                if on_missing == "error":
                    raise MetricAbsent(
                        f"record {rec.id!r} ({side}) lacks metric {metric!r}") from None
                missing += 1
                continue
            samples.append((resp.word_count, value))
    return samples, missing


def cmd_build_map(opts: Options) -> int:
    defaults = {"min_bucket": 20, "field": "both", "workers": 1}
    input_path = opts.get("input")
    output_path = opts.get("output")
    metric = opts.get("metric")
    if not metric:
        raise ValidationError("build-map requires --metric")
    which = str(opts.get("field", "both"))
    min_bucket = int(opts.get("min_bucket", 20))

    records = corpus_io.read_corpus(input_path, strict=True).records
    samples, _ = _metric_samples(records, metric, which, on_missing="error")
    fingerprint = file_sha256(input_path)
    map_ = decile.build_map(samples, metric, min_bucket=min_bucket, built_from=fingerprint)
    decile.save_map(map_, output_path)

    man = RunManifest("build-map", opts.snapshot(
        ("input", "output", "metric", "min_bucket", "field", "workers"), defaults))
    man.add_input("corpus", input_path)
    man.write(output_path)
    _note(f"build-map: {len(map_.buckets)} bucket(s) over {len(samples)} sample(s) "
          f"-> {output_path}")
    return EXIT_OK


# --- filter ------------------------------------------------------------------------

METHOD_FLAGS = {"dns": PairMethod.DNS, "dns_lite": PairMethod.DNS_LITE,
                "divpo": PairMethod.DIVPO}


def cmd_filter(opts: Options) -> int:
    defaults = {"method": "dns", "max_len_delta": 5, "top_k": 3000,
                "chosen_quantile": 75.0, "rejected_quantile": 25.0,
                "diversity_metric": None, "quality_metric": None,
                "gain_metric": None, "workers": 1}
    input_path = opts.get("input")
    output_path = opts.get("output")
    method_name = str(opts.get("method", "dns")).lower()
    if method_name not in METHOD_FLAGS:
        raise ValidationError(f"unknown filter method {method_name!r}")
    cfg = pairing.FilterConfig(
        method=METHOD_FLAGS[method_name],
        max_len_delta=int(opts.get("max_len_delta", 5)),
        top_k=int(opts.get("top_k", 3000)),
        chosen_quantile=float(opts.get("chosen_quantile", 75.0)),
        rejected_quantile=float(opts.get("rejected_quantile", 25.0)),
        diversity_metric=opts.get("diversity_metric"),
        quality_metric=opts.get("quality_metric"),
        gain_metric=opts.get("gain_metric"),
    )

    records = list(corpus_io.read_corpus(input_path, strict=True).records)
    # records missing a required score are dropped (and counted) before
    # any corpus-level statistic is computed
    needed = list(cfg.resolved_scores())
    usable = [rec for rec in records if pairing.has_scores(rec, needed)]
    dropped_unscored = len(records) - len(usable)
    if not usable:
        raise ValidationError("filter: no records carry the required scores "
                              f"({', '.join(needed)})")

    if cfg.method is PairMethod.DIVPO:
        pairs = pairing.divpo_filter_corpus(usable, cfg)
        summary = f"{len(pairs)} pool pair(s)"
    else:
        outcome = pairing.dns_filter(usable, cfg)
        pairs = outcome.pairs
        drops = ", ".join(f"{k}={v}" for k, v in outcome.rule_drops.items())
        summary = f"{len(pairs)} pair(s) kept; drops: {drops}"
    if cfg.top_k > 0:
        pairs = pairing.select_top_k(pairs, cfg)

    count = corpus_io.write_pairs(pairs, output_path, max_len_delta=cfg.max_len_delta)
    man = RunManifest("filter", opts.snapshot(
        ("input", "output", "method", "max_len_delta", "top_k", "chosen_quantile",
         "rejected_quantile", "diversity_metric", "quality_metric", "gain_metric",
         "workers"), defaults))
    man.add_input("corpus", input_path)
    man.write(output_path)
    if dropped_unscored:
        summary += f"; {dropped_unscored} unscored record(s) dropped"
    if pairs:
        deltas = pairing.length_delta_report(pairs)
        summary += f"; length delta mean={deltas.mean:.3f} std={deltas.std:.3f}"
    _note(f"filter[{method_name}]: wrote {count} pair(s) to {output_path}; {summary}")
    return EXIT_OK


# --- dd-report ---------------------------------------------------------------------

def cmd_dd_report(opts: Options) -> int:
    defaults = {"field": "both", "workers": 1, "plot_data": None}
    map_path = opts.get("map")
    if not map_path:
        raise ValidationError("dd-report requires --map")
    base_path = opts.get("input")
    tuned_path = opts.get("tuned")
    if not tuned_path:
        raise ValidationError("dd-report requires --tuned")
    output_path = opts.get("output")
    which = str(opts.get("field", "both"))

    map_ = decile.load_map(map_path)
    base_records = corpus_io.read_corpus(base_path, strict=True).records
    tuned_records = corpus_io.read_corpus(tuned_path, strict=True).records
    base_samples, _ = _metric_samples(base_records, map_.metric, which, on_missing="error")
    tuned_samples, _ = _metric_samples(tuned_records, map_.metric, which, on_missing="error")
    mean_base = decile.mean_dd(map_, base_samples)
    mean_tuned = decile.mean_dd(map_, tuned_samples)
    delta = decile.delta_dd(map_, base_samples, tuned_samples)

    row = {
        "metric": map_.metric,
        "mean_dd_base": mean_base,
        "mean_dd_tuned": mean_tuned,
        "delta_dd": delta,
        "n_base": len(base_samples),
        "n_tuned": len(tuned_samples),
    }
    corpus_io.write_report_lines(output_path, [row])

    plot_path = opts.get("plot_data")
    if plot_path:
        with open(plot_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("metric\tmean_dd_base\tmean_dd_tuned\tdelta_dd\n")
            fh.write(f"{map_.metric}\t{mean_base!r}\t{mean_tuned!r}\t{delta!r}\n")

    man = RunManifest("dd-report", opts.snapshot(
        ("map", "input", "tuned", "output", "field", "plot_data", "workers"), defaults))
    man.add_input("map", map_path)
    man.add_input("base", base_path)
    man.add_input("tuned", tuned_path)
    man.write(output_path)
    print(f"{map_.metric}: mean DD base={mean_base:.4f} tuned={mean_tuned:.4f} "
          f"delta={delta:+.4f} (n={len(base_samples)}/{len(tuned_samples)})")
    return EXIT_OK


# --- correlate -----------------------------------------------------------------------

def _response_value(rec: GenerationRecord, resp: ResponseRecord, name: str) -> Optional[float]:
    if name == "word_count":
        return float(resp.word_count)
    try:
        return pairing.response_score(rec.id, resp, name)
    except MissingScore:
        return None


def cmd_correlate(opts: Options) -> int:
    defaults = {"field": "both", "workers": 1}
    input_path = opts.get("input")
    output_path = opts.get("output")
    x_names = [m.strip() for m in str(opts.get("x", "")).split(",") if m.strip()]
    y_names = [m.strip() for m in str(opts.get("y", "")).split(",") if m.strip()]
    if not x_names or not y_names:
        raise ValidationError("correlate requires --x and --y metric lists")
    which = str(opts.get("field", "both"))

    records = corpus_io.read_corpus(input_path, strict=True).records
    rows = []
    for x_name in x_names:
        for y_name in y_names:
            xs, ys, dropped = [], [], 0
            for rec in records:
                for _, resp in _iter_fields(rec, which):
                    xv = _response_value(rec, resp, x_name)
                    yv = _response_value(rec, resp, y_name)
                    if xv is None or yv is None:
                        dropped += 1
                        continue
                    xs.append(xv)
                    ys.append(yv)
            result = stats.pearson(xs, ys, x_name=x_name, y_name=y_name)
            if dropped:
                _note(f"correlate: {x_name} vs {y_name}: dropped {dropped} "
                      f"response(s) lacking values")
            rows.append({"x": x_name, "y": y_name, "r": result.r, "p": result.p,
                         "n": result.n})
    corpus_io.write_report_lines(output_path, rows)
    man = RunManifest("correlate", opts.snapshot(("input", "output", "x", "y", "field", "workers"), defaults))
    man.add_input("corpus", input_path)
    man.write(output_path)
    for row in rows:
        print(f"{row['x']} vs {row['y']}: r={row['r']:+.4f} p={row['p']:.3g} n={row['n']}")
    return EXIT_OK


# --- ttest ---------------------------------------------------------------------------

def cmd_ttest(opts: Options) -> int:
    defaults = {"field": "both", "welch": False, "workers": 1}
    a_path = opts.get("input")
    b_path = opts.get("input_b")
    if not b_path:
        raise ValidationError("ttest requires --input-b")
    output_path = opts.get("output")
    metric = opts.get("metric")
    if not metric:
        raise ValidationError("ttest requires --metric")
    which = str(opts.get("field", "both"))
    welch = bool(opts.get("welch", False))

    def values(path: str) -> list[float]:
        records = corpus_io.read_corpus(path, strict=True).records
        out = []
        for rec in records:
            for _, resp in _iter_fields(rec, which):
                out.append(pairing.response_score(rec.id, resp, metric))
        return out

    a = values(a_path)
    b = values(b_path)
    result = stats.ttest_ind(a, b, equal_variance=not welch)
    row = {"metric": metric, "t": result.t, "p": result.p, "df": result.df,
           "n_a": result.n_a, "n_b": result.n_b, "welch": welch}
    corpus_io.write_report_lines(output_path, [row])
    man = RunManifest("ttest", opts.snapshot(
        ("input", "input_b", "output", "metric", "field", "welch", "workers"), defaults))
    man.add_input("a", a_path)
    man.add_input("b", b_path)
    man.write(output_path)
    print(f"{metric}: t={result.t:+.4f} p={result.p:.3g} "
          f"(n={result.n_a}/{result.n_b}, {'unequal' if welch else 'pooled'} variance)")
    return EXIT_OK


# --- pairs-for-eval --------------------------------------------------------------------

def _texts_by_prompt(records, which: str) -> tuple[list[str], dict[str, list[str]]]:
    order, texts = [], {}
    for rec in records:
        if rec.prompt_id not in texts:
            texts[rec.prompt_id] = []
            order.append(rec.prompt_id)
        for _, resp in _iter_fields(rec, which):
            texts[rec.prompt_id].append(resp.text)
    return order, texts


def cmd_pairs_for_eval(opts: Options) -> int:
    defaults = {"k": 20, "field": "first", "workers": 1}
    a_path = opts.get("input")
    b_path = opts.get("input_b")
    if not b_path:
        raise ValidationError("pairs-for-eval requires --input-b")
    output_path = opts.get("output")
    k = int(opts.get("k", 20))
    which = str(opts.get("field", "first"))

    a_records = corpus_io.read_corpus(a_path, strict=True).records
    b_records = corpus_io.read_corpus(b_path, strict=True).records
    order, a_texts = _texts_by_prompt(a_records, which)
    _, b_texts = _texts_by_prompt(b_records, which)

    lines = [corpus_io.header_line(corpus_io.KIND_EVAL_PAIRS)]
    skipped_prompts = 0
    total = 0
    for prompt_id in order:
        if prompt_id not in b_texts:
            skipped_prompts += 1
            continue
        for pair in stats.least_similar_pairs(a_texts[prompt_id], b_texts[prompt_id], k):
            lines.append(corpus_io.dumps({
                "pair_id": f"{prompt_id}#{pair.index_a}-{pair.index_b}",
                "prompt_id": prompt_id,
                "index_a": pair.index_a,
                "index_b": pair.index_b,
                "similarity": pair.similarity,
                "text_a": a_texts[prompt_id][pair.index_a],
                "text_b": b_texts[prompt_id][pair.index_b],
            }))
            total += 1
    corpus_io._write_text(output_path, lines)
    man = RunManifest("pairs-for-eval", opts.snapshot(
        ("input", "input_b", "output", "k", "field", "workers"), defaults))
    man.add_input("a", a_path)
    man.add_input("b", b_path)
    man.write(output_path)
    note = f"pairs-for-eval: wrote {total} pair(s) to {output_path}"
    if skipped_prompts:
        note += f"; {skipped_prompts} prompt(s) missing from --input-b"
    _note(note)
    return EXIT_OK


# --- pos-report ---------------------------------------------------------------------

def cmd_pos_report(opts: Options) -> int:
    defaults = {"top_n": 5, "workers": 1}
    input_path = opts.get("input")
    output_path = opts.get("output")
    top_n = int(opts.get("top_n", 5))

    docs = corpus_io.read_tagged(input_path, strict=True)
    rows = stats.pos_bigram_report(docs, top_n=top_n)
    corpus_io.write_report_lines(output_path, [
        {"bigram": list(row.bigram), "docs_present": row.docs_present,
         "pct_at_start": row.pct_at_start}
        for row in rows
    ])
    man = RunManifest("pos-report", opts.snapshot(("input", "output", "top_n", "workers"), defaults))
    man.add_input("tagged", input_path)
    man.write(output_path)
    for row in rows:
        print(f"{row.bigram[0]} {row.bigram[1]}: docs={row.docs_present} "
              f"at_start={row.pct_at_start:.2f}%")
    return EXIT_OK


# --- win-rate -----------------------------------------------------------------------

def cmd_win_rate(opts: Options) -> int:
    defaults = {"workers": 1}
    input_path = opts.get("input")
    output_path = opts.get("output")
    judgments = corpus_io.read_judgments(input_path, strict=True)
    rates = stats.win_rate(judgments)
    corpus_io.write_report_lines(output_path, [{
        "win_a": rates.win_a, "win_b": rates.win_b, "tie": rates.tie,
        "count": rates.count,
    }])
    man = RunManifest("win-rate", opts.snapshot(("input", "output", "workers"), defaults))
    man.add_input("judgments", input_path)
    man.write(output_path)
    print(f"A={rates.win_a:.2f}% B={rates.win_b:.2f}% tie={rates.tie:.2f}% "
          f"(n={rates.count})")
    return EXIT_OK


# --- parser / dispatch -----------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, output_required: bool = True) -> None:
    p.add_argument("--input", required=True, help="input file path")
    p.add_argument("--output", required=output_required, help="output file path")
    p.add_argument("--config", help="JSON config file supplying option defaults")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")
    p.add_argument("--seed", type=int, help="seed for stochastic subcommands (none today)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divcurate",
        description="Text-diversity scoring and preference-data curation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="annotate a corpus with diversity metrics")
    _add_common(p)
    p.add_argument("--metrics", help=f"comma list (default {DEFAULT_SCORE_METRICS})")
    p.add_argument("--embeddings", help="embedding store path (required for dsi)")
    p.add_argument("--lenient", action="store_const", const=True, default=None,
                   help="skip malformed corpus lines instead of aborting")
    p.add_argument("--mattr-window", type=int, dest="mattr_window")
    p.add_argument("--hdd-sample-size", type=int, dest="hdd_sample_size")
    p.add_argument("--mtld-threshold", type=float, dest="mtld_threshold")
    p.add_argument("--ngram-max-n", type=int, dest="ngram_max_n")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("build-map", help="build a per-length decile map from a scored corpus")
    _add_common(p)
    p.add_argument("--metric", help="metric the map ranks")
    p.add_argument("--min-bucket", type=int, dest="min_bucket",
                   help="minimum samples per length bucket (default 20)")
    p.add_argument("--field", choices=FIELD_CHOICES)
    p.set_defaults(func=cmd_build_map)

    p = sub.add_parser("filter", help="build preference pairs from a scored corpus")
    _add_common(p)
    p.add_argument("--method", choices=sorted(METHOD_FLAGS))
    p.add_argument("--max-len-delta", type=int, dest="max_len_delta")
    p.add_argument("--top-k", type=int, dest="top_k",
                   help="keep this many best pairs, 0 keeps all (default 3000)")
    p.add_argument("--diversity-metric", dest="diversity_metric")
    p.add_argument("--quality-metric", dest="quality_metric")
    p.add_argument("--gain-metric", dest="gain_metric",
                   help="metric used to rank pairs for --top-k (default: stored gain)")
    p.add_argument("--chosen-quantile", type=float, dest="chosen_quantile")
    p.add_argument("--rejected-quantile", type=float, dest="rejected_quantile")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("dd-report", help="mean diversity-decile shift between two corpora")
    _add_common(p)
    p.add_argument("--map", help="decile map file")
    p.add_argument("--tuned", help="tuned/model-B scored corpus (--input is the base)")
    p.add_argument("--field", choices=FIELD_CHOICES)
    p.add_argument("--plot-data", dest="plot_data", help="optional TSV of bar values")
    p.set_defaults(func=cmd_dd_report)

    p = sub.add_parser("correlate", help="pairwise metric correlations over a scored corpus")
    _add_common(p)
    p.add_argument("--x", help="comma list of x metrics (word_count allowed)")
    p.add_argument("--y", help="comma list of y metrics")
    p.add_argument("--field", choices=FIELD_CHOICES)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("ttest", help="two-sample t-test of one metric across two corpora")
    _add_common(p)
    p.add_argument("--input-b", dest="input_b", help="second corpus")
    p.add_argument("--metric")
    p.add_argument("--field", choices=FIELD_CHOICES)
    p.add_argument("--welch", action="store_const", const=True, default=None,
                   help="unequal-variance form")
    p.set_defaults(func=cmd_ttest)

    p = sub.add_parser("pairs-for-eval", help="mine least-similar cross-method response pairs")
    _add_common(p)
    p.add_argument("--input-b", dest="input_b", help="second corpus")
    p.add_argument("--k", type=int, help="pairs per prompt (default 20)")
    p.add_argument("--field", choices=FIELD_CHOICES)
    p.set_defaults(func=cmd_pairs_for_eval)

    p = sub.add_parser("pos-report", help="POS bigram repetition report over a tagged corpus")
    _add_common(p)
    p.add_argument("--top-n", type=int, dest="top_n")
    p.set_defaults(func=cmd_pos_report)

    p = sub.add_parser("win-rate", help="tabulate judge verdicts")
    _add_common(p)
    p.set_defaults(func=cmd_win_rate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(Options(args))
    except InputError as exc:
        _note(f"error: {exc}")
        return EXIT_IO
    except ValidationError as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION
    except ToolkitError as exc:
        _note(f"internal error: {exc}")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit code 3
        _note(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
