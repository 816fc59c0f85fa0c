"""Lexical diversity metrics over tokenized text.

All metrics share the tokenizer convention from tokenizer.py and accept
either a TokenizedText or a plain token sequence. Parameter defaults
follow the values most common in the lexical-diversity literature:
window 50 for the moving-average type-token ratio, sample size 42 for
the hypergeometric estimate, threshold 0.72 for the factor-based
measure, and headerless DEFLATE at level 6 for the compression ratio.
"""

from __future__ import annotations

import math
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import (
    EmptyList,
    EmptyText,
    MetricInputError,
    MissingLogprobs,
    PositiveLogprob,
    SingleToken,
    TextTooShort,
)
from .records import ResponseRecord
from .tokenizer import TokenizedText

TextLike = Union[TokenizedText, Sequence[str]]

# mode names accepted by mtld()
MTLD_MODES = ("plain", "ma", "ma_bi")


def _tokens(t: TextLike) -> tuple[str, ...]:
    if isinstance(t, TokenizedText):
        return t.tokens
    return tuple(t)


def ttr(t: TextLike) -> float:
    """Type-token ratio: distinct tokens over total tokens."""
    toks = _tokens(t)
    if not toks:
        raise EmptyText("ttr needs at least one token")
    return len(set(toks)) / len(toks)


def mattr(t: TextLike, window: int = 50) -> float:
    """Mean TTR over every contiguous window of the given size.

    Texts shorter than the window fall back to the plain TTR.
    """
    if window < 1:
        raise MetricInputError(f"window must be >= 1, got {window}")
    toks = _tokens(t)
    n = len(toks)
    if n == 0:
        raise EmptyText("mattr needs at least one token")
    if n <= window:
        return ttr(toks)
    counts: Counter = Counter(toks[:window])
    distinct = len(counts)
    total = distinct / window
    for i in range(window, n):
        out_tok = toks[i - window]
        counts[out_tok] -= 1
        if counts[out_tok] == 0:
            del counts[out_tok]
            distinct -= 1
        in_tok = toks[i]
        if counts[in_tok] == 0:
            distinct += 1
        counts[in_tok] += 1
        total += distinct / window
    return total / (n - window + 1)


def maas(t: TextLike) -> float:
    """Maas index (log N - log V) / (log N)^2, base 10.

    Lower values indicate richer vocabulary; unlike the other metrics
    here this one falls as diversity rises.
    """
    toks = _tokens(t)
    n = len(toks)
    if n == 0:
        raise EmptyText("maas needs at least one token")
    if n < 2:
        raise SingleToken("maas needs at least two tokens")
    v = len(set(toks))
    log_n = math.log10(n)
    return (log_n - math.log10(v)) / (log_n * log_n)


def hdd(t: TextLike, sample_size: int = 42) -> float:
    """Hypergeometric distribution diversity.

    Equals the expected type-token ratio of a random sample of
    sample_size tokens drawn without replacement: each type contributes
    P(type appears in sample) / sample_size, with
    P = 1 - C(N - f, s) / C(N, s).
    """
    if sample_size < 1:
        raise MetricInputError(f"sample_size must be >= 1, got {sample_size}")
    toks = _tokens(t)
    n = len(toks)
    if n == 0:
        raise EmptyText("hdd needs at least one token")
    if n < sample_size:
        raise TextTooShort(f"hdd needs at least {sample_size} tokens, got {n}")
    denom = math.comb(n, sample_size)
    contrib = []
    for freq in Counter(toks).values():
        p_absent = math.comb(n - freq, sample_size) / denom if n - freq >= sample_size else 0.0
        contrib.append((1.0 - p_absent) / sample_size)
    return math.fsum(contrib)


def _mtld_directional(toks: Sequence[str], threshold: float) -> Optional[float]:
    """One-direction factor count; None when degenerate (no factor, TTR 1)."""
    factors = 0
    types: set = set()
    count = 0
    final_ttr = 1.0
    for tok in toks:
        types.add(tok)
        count += 1
        final_ttr = len(types) / count
        if final_ttr < threshold:
            factors += 1
            types.clear()
            count = 0
            final_ttr = 1.0
    partial = (1.0 - final_ttr) / (1.0 - threshold) if count > 0 else 0.0
    total = factors + partial
    if total == 0.0:
        return None
    return len(toks) / total


def _mtld_ma_directional(toks: Sequence[str], threshold: float) -> Optional[float]:
    """Mean completed-factor length over factors started at every token.

    Starts whose factor never drops below the threshold before the text
    ends contribute nothing; None when no factor completes at all.
    """
    n = len(toks)
    lengths = []
    for start in range(n):
        types: set = set()
        for j in range(start, n):
            types.add(toks[j])
            if len(types) / (j - start + 1) < threshold:
                lengths.append(j - start + 1)
                break
    if not lengths:
        return None
    return sum(lengths) / len(lengths)


def mtld(t: TextLike, threshold: float = 0.72, mode: str = "plain") -> float:
    """Measure of textual lexical diversity.

    plain: mean of the forward and backward factor-based values, each
    computed as N / (completed factors + partial factor) where the
    partial factor is (1 - final TTR) / (1 - threshold). ma: factors are
    restarted at every token and their completed lengths averaged.
    ma_bi: the ma value averaged over forward and reversed order. A text
    whose running TTR never crosses the threshold and ends at TTR 1
    yields N by convention.
    """
    if not 0.0 < threshold < 1.0:
        raise MetricInputError(f"threshold must lie in (0, 1), got {threshold}")
    if mode not in MTLD_MODES:
        raise MetricInputError(f"unknown mtld mode {mode!r}")
    toks = _tokens(t)
    n = len(toks)
    if n == 0:
        raise EmptyText("mtld needs at least one token")
    if mode == "plain":
        fwd = _mtld_directional(toks, threshold)
        bwd = _mtld_directional(toks[::-1], threshold)
        if fwd is None or bwd is None:
            # all tokens distinct in one direction implies the same in the
            # other, so both are degenerate together
            return float(n)
        return (fwd + bwd) / 2.0
    if mode == "ma":
        value = _mtld_ma_directional(toks, threshold)
        return float(n) if value is None else value
    fwd = _mtld_ma_directional(toks, threshold)
    bwd = _mtld_ma_directional(toks[::-1], threshold)
    if fwd is None or bwd is None:
        return float(n)
    return (fwd + bwd) / 2.0


def entropy(logprobs: Sequence[float]) -> float:
    """Mean negated token log-probability, in nats."""
    if len(logprobs) == 0:
        raise EmptyList("entropy needs at least one logprob")
    for lp in logprobs:
        if lp > 0.0:
            raise PositiveLogprob(f"logprob {lp} is positive")
    return -math.fsum(logprobs) / len(logprobs)


def ngram_diversity(t: TextLike, max_n: int = 4) -> float:
    """Sum over n in 1..max_n of distinct-to-total n-gram ratios."""
    if max_n < 1:
        raise MetricInputError(f"max_n must be >= 1, got {max_n}")
    toks = _tokens(t)
    if not toks:
        raise EmptyText("ngram_diversity needs at least one token")
    if len(toks) < max_n:
        raise TextTooShort(f"ngram_diversity needs at least {max_n} tokens, got {len(toks)}")
    score = 0.0
    for n in range(1, max_n + 1):
        grams = [toks[i:i + n] for i in range(len(toks) - n + 1)]
        score += len({tuple(g) for g in grams}) / len(grams)
    return score


def compression_ratio(text: str) -> float:
    """UTF-8 byte length over headerless DEFLATE (level 6) byte length."""
    if len(text) == 0:
        raise EmptyText("compression_ratio needs a non-empty text")
    data = text.encode("utf-8")
    comp = zlib.compressobj(6, zlib.DEFLATED, -15)
    packed = comp.compress(data) + comp.flush()
    return len(data) / len(packed)


# --- per-response scoring -----------------------------------------------------

METRIC_NAMES = ("ttr", "mattr", "maas", "hdd", "mtld", "mtld_ma", "mtld_ma_bi",
                "entropy", "ngram_div", "comp_ratio")

# name -> parameter defaults, exposed verbatim in metrics.manifest
METRIC_PARAMS = {
    "ttr": {},
    "mattr": {"window": 50},
    "maas": {},
    "hdd": {"sample_size": 42},
    "mtld": {"threshold": 0.72},
    "mtld_ma": {"threshold": 0.72},
    "mtld_ma_bi": {"threshold": 0.72},
    "entropy": {},
    "ngram_div": {"max_n": 4},
    "comp_ratio": {"deflate_level": 6},
}


@dataclass(frozen=True)
class MetricConfig:
    """Metric selection plus tunable parameters for score_response."""

    metrics: tuple[str, ...] = METRIC_NAMES
    mattr_window: int = 50
    hdd_sample_size: int = 42
    mtld_threshold: float = 0.72
    ngram_max_n: int = 4

    def __post_init__(self):
        for name in self.metrics:
            if name not in METRIC_NAMES:
                raise MetricInputError(f"unknown metric {name!r}")


@dataclass(frozen=True)
class MetricVector:
    """Computed metric values keyed by metric name."""

    values: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return self.values[name]


def score_response(r: ResponseRecord, config: MetricConfig = MetricConfig()) -> MetricVector:
    """Compute the configured metrics for one response.

    Metric preconditions propagate as the metric's own error type with
    the metric name attached, so callers can report which selection
    failed on which record.
    """
    tt = TokenizedText(r.text)
    out: dict[str, float] = {}
    for name in config.metrics:
        try:
            if name == "ttr":
                out[name] = ttr(tt)
            elif name == "mattr":
                out[name] = mattr(tt, config.mattr_window)
            elif name == "maas":
                out[name] = maas(tt)
            elif name == "hdd":
                out[name] = hdd(tt, config.hdd_sample_size)
            elif name == "mtld":
                out[name] = mtld(tt, config.mtld_threshold, "plain")
            elif name == "mtld_ma":
                out[name] = mtld(tt, config.mtld_threshold, "ma")
            elif name == "mtld_ma_bi":
                out[name] = mtld(tt, config.mtld_threshold, "ma_bi")
            elif name == "entropy":
                if r.token_logprobs is None:
                    raise MissingLogprobs("entropy requires token_logprobs")
                out[name] = entropy(r.token_logprobs)
            elif name == "ngram_div":
                out[name] = ngram_diversity(tt, config.ngram_max_n)
            elif name == "comp_ratio":
                out[name] = compression_ratio(r.text)
        except MetricInputError as exc:
            exc.metric = name
            raise
    return MetricVector(values=out)
