"""Length-normalized diversity deciles.

A decile map groups metric values by word count and stores, per word
count, the nine ascending decile thresholds (10th through 90th
percentile, linear interpolation between closest ranks). A query value
is then ranked against the thresholds of its own length bucket, so a
score of 7 means the same thing for a 40-word text as for a 200-word
one. Sparse length buckets are merged into their nearest neighbor until
every bucket holds at least min_bucket samples.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import corpus_io
from .errors import (
    EmptyInput,
    InsufficientSamples,
    IoFailure,
    MissingFile,
    SchemaViolation,
)

PERCENTILE_METHOD = "linear"
DECILE_QS = tuple(10.0 * k for k in range(1, 10))


def percentile(values: Sequence[float], q: float) -> float:
    """Percentile with linear interpolation between closest ranks.

    The rank of the q-th percentile over n sorted values is
    (n - 1) * q / 100; fractional ranks interpolate between the two
    bracketing order statistics.
    """
    if not 0.0 <= q <= 100.0:
        raise ValueError(f"q must lie in [0, 100], got {q}")
    if len(values) == 0:
        raise EmptyInput("percentile of an empty sequence")
    s = sorted(values)
    pos = (len(s) - 1) * q / 100.0
    lo = math.floor(pos)
    frac = pos - lo
    if frac == 0.0:
        return float(s[lo])
    return s[lo] + frac * (s[lo + 1] - s[lo])


def decile_thresholds(values: Sequence[float]) -> tuple[float, ...]:
    s = sorted(values)
    out = []
    n = len(s)
    for q in DECILE_QS:
        pos = (n - 1) * q / 100.0
        lo = math.floor(pos)
        frac = pos - lo
        out.append(float(s[lo]) if frac == 0.0 else s[lo] + frac * (s[lo + 1] - s[lo]))
    return tuple(out)


@dataclass(frozen=True)
class Bucket:
    thresholds: tuple[float, ...]  # 9 ascending values
    sample_count: int


@dataclass(frozen=True)
class DecileMap:
    metric: str
    buckets: dict[int, Bucket]  # word_count -> bucket
    min_bucket: int
    built_from: str = ""
    percentile_method: str = PERCENTILE_METHOD

    def word_counts(self) -> list[int]:
        return sorted(self.buckets)


def build_map(scores: Iterable[tuple[int, float]], metric: str,
              min_bucket: int = 20, built_from: str = "") -> DecileMap:
    """Build a decile map from (word_count, value) samples.

    Buckets below min_bucket are merged into the nearest remaining word
    count (ties to the smaller), smallest bucket first, until every
    bucket meets the minimum. Raises InsufficientSamples when the whole
    input cannot fill even one bucket.
    """
    if min_bucket < 1:
        raise ValueError(f"min_bucket must be >= 1, got {min_bucket}")
    groups: dict[int, list[float]] = {}
    total = 0
    for wc, value in scores:
        groups.setdefault(int(wc), []).append(float(value))
        total += 1
    if total == 0:
        raise EmptyInput("build_map needs at least one sample")
    if total < min_bucket:
        raise InsufficientSamples(
            f"{total} samples cannot fill a bucket of at least {min_bucket}")

    while len(groups) > 1:
        wc, n = min(((wc, len(vals)) for wc, vals in groups.items()),
                    key=lambda item: (item[1], item[0]))
        if n >= min_bucket:
            break
        target = min((t for t in groups if t != wc), key=lambda t: (abs(t - wc), t))
        groups[target].extend(groups.pop(wc))

    buckets = {}
    for wc in sorted(groups):
        vals = groups[wc]
        buckets[wc] = Bucket(thresholds=decile_thresholds(vals), sample_count=len(vals))
    return DecileMap(metric=metric, buckets=buckets, min_bucket=min_bucket,
                     built_from=built_from)


def _nearest_bucket(map_: DecileMap, wc: int) -> Bucket:
    if wc in map_.buckets:
        return map_.buckets[wc]
    best = min(map_.buckets, key=lambda t: (abs(t - wc), t))
    return map_.buckets[best]


def dd(map_: DecileMap, word_count: int, value: float) -> int:
    """Diversity decile: how many of the bucket's nine thresholds the
    value strictly exceeds. Queries at unseen lengths use the nearest
    bucket by word count (ties to the smaller). A value equal to a
    threshold does not exceed it, so ties fall to the lower decile.
    """
    if not map_.buckets:
        raise EmptyInput("decile map has no buckets")
    bucket = _nearest_bucket(map_, word_count)
    # thresholds ascend, so the count of thresholds strictly below the
    # value is its decile
    return bisect_left(bucket.thresholds, value)


def delta_dd(map_: DecileMap, base: Sequence[tuple[int, float]],
             tuned: Sequence[tuple[int, float]]) -> float:
    """Mean decile of tuned samples minus mean decile of base samples."""
    if len(base) == 0 or len(tuned) == 0:
        raise EmptyInput("delta_dd needs non-empty base and tuned samples")
    mean_base = sum(dd(map_, wc, v) for wc, v in base) / len(base)
    mean_tuned = sum(dd(map_, wc, v) for wc, v in tuned) / len(tuned)
    return mean_tuned - mean_base


def mean_dd(map_: DecileMap, samples: Sequence[tuple[int, float]]) -> float:
    if len(samples) == 0:
        raise EmptyInput("mean_dd needs at least one sample")
    return sum(dd(map_, wc, v) for wc, v in samples) / len(samples)


# --- persistence ----------------------------------------------------------------

def save_map(map_: DecileMap, path: str) -> None:
    lines = [corpus_io.header_line(corpus_io.KIND_DECILE_MAP)]
    lines.append(corpus_io.dumps({
        "metric": map_.metric,
        "percentile_method": map_.percentile_method,
        "min_bucket": map_.min_bucket,
        "built_from": map_.built_from,
    }))
    for wc in map_.word_counts():
        bucket = map_.buckets[wc]
        lines.append(corpus_io.dumps({
            "word_count": wc,
            "thresholds": list(bucket.thresholds),
            "sample_count": bucket.sample_count,
        }))
    corpus_io._write_text(path, lines)


def load_map(path: str) -> DecileMap:
    import os
    if not os.path.exists(path):
        raise MissingFile(f"no such file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if len(lines) < 2:
        raise SchemaViolation(f"{path}: decile map needs a header and a meta line", line=1)
    corpus_io.check_header(lines[0], corpus_io.KIND_DECILE_MAP, path)
    try:
        meta = json.loads(lines[1])
    except json.JSONDecodeError as exc:
        raise SchemaViolation("meta line is not valid JSON", line=2) from exc
    for key in ("metric", "percentile_method", "min_bucket", "built_from"):
        if key not in meta:
            raise SchemaViolation(f"meta line missing {key!r}", line=2, field=key)
    buckets: dict[int, Bucket] = {}
    for idx, raw in enumerate(lines[2:], start=3):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaViolation("bucket line is not valid JSON", line=idx) from exc
        try:
            wc = int(obj["word_count"])
            thresholds = tuple(float(x) for x in obj["thresholds"])
            count = int(obj["sample_count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"malformed bucket line: {exc}", line=idx) from exc
        if len(thresholds) != 9:
            raise SchemaViolation("bucket must carry exactly 9 thresholds",
                                  line=idx, field="thresholds")
        if any(b < a for a, b in zip(thresholds, thresholds[1:])):
            raise SchemaViolation("thresholds must be non-decreasing",
                                  line=idx, field="thresholds")
        if wc in buckets:
            raise SchemaViolation(f"duplicate bucket for word_count {wc}", line=idx)
        buckets[wc] = Bucket(thresholds=thresholds, sample_count=count)
    if not buckets:
        raise SchemaViolation(f"{path}: decile map has no buckets")
    return DecileMap(metric=meta["metric"], buckets=buckets,
                     min_bucket=int(meta["min_bucket"]),
                     built_from=meta["built_from"],
                     percentile_method=meta["percentile_method"])
