"""Preference-pair construction with length-parity control.

Two families of filters are provided. The per-record filter turns a
(first, second) response pair into a chosen/rejected pair only when the
second response clears four rules, applied in order:

  1. its quality is at or above the 50th percentile of all first-response
     quality scores in the corpus,
  2. its quality strictly exceeds the first response's,
  3. its diversity strictly exceeds the first response's,
  4. the two responses differ by at most max_len_delta words.

The full variant reads diversity from the entropy metric and quality
from the ingested reward score; the lite variant needs no model in the
loop and uses the type-token ratio for diversity with the Maas index
standing in for quality (higher taken as better). The quartile filter
works per prompt pool instead: chosen is the most diverse response in
the top quality quartile, rejected the least diverse in the bottom
quartile, with no length control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Optional, Sequence

from .decile import percentile
from .errors import EmptyInput, MissingScore
from .records import GenerationRecord, PairMethod, PreferencePair, ResponseRecord

QUALITY_FIELD = "quality_score"

# per-method (diversity metric, quality metric) defaults
METHOD_SCORES = {
    PairMethod.DNS: ("entropy", QUALITY_FIELD),
    PairMethod.DNS_LITE: ("ttr", "maas"),
    PairMethod.DIVPO: ("entropy", QUALITY_FIELD),
}

RULE_NAMES = ("quality_floor", "quality_gain", "diversity_gain", "length_delta")


@dataclass(frozen=True)
class FilterConfig:
    method: PairMethod = PairMethod.DNS
    max_len_delta: int = 5
    top_k: int = 3000
    chosen_quantile: float = 75.0   # quartile boundary for the pool filter, inclusive
    rejected_quantile: float = 25.0
    diversity_metric: Optional[str] = None  # None -> method default
    quality_metric: Optional[str] = None
    gain_metric: Optional[str] = None  # ranking key for select_top_k; None -> stored gain

    def resolved_scores(self) -> tuple[str, str]:
        d_default, q_default = METHOD_SCORES[self.method]
        return (self.diversity_metric or d_default, self.quality_metric or q_default)


def response_score(record_id: str, r: ResponseRecord, name: str) -> float:
    """Fetch a named score from a response; absent scores are an error."""
    if name == QUALITY_FIELD:
        if r.quality_score is None:
            raise MissingScore(record_id, name)
        return r.quality_score
    if r.metrics is None or name not in r.metrics:
        raise MissingScore(record_id, name)
    return r.metrics[name]


def has_scores(record: GenerationRecord, names: Sequence[str]) -> bool:
    for r in (record.first, record.second):
        for name in names:
            if name == QUALITY_FIELD:
                if r.quality_score is None:
                    return False
            elif r.metrics is None or name not in r.metrics:
                return False
    return True


@dataclass
class FilterOutcome:
    pairs: list[PreferencePair] = field(default_factory=list)
    rule_drops: dict[str, int] = field(default_factory=lambda: {n: 0 for n in RULE_NAMES})
    quality_floor: float = 0.0

    @property
    def kept(self) -> int:
        return len(self.pairs)


def dns_filter(records: Sequence[GenerationRecord], cfg: FilterConfig) -> FilterOutcome:
    """Apply the four ordered rules to every record of a corpus.

    Records must already carry the configured diversity and quality
    scores on both responses. Output pairs preserve input order; the
    second response becomes chosen, the first rejected.
    """
    if len(records) == 0:
        raise EmptyInput("dns_filter needs at least one record")
    d_name, q_name = cfg.resolved_scores()
    q1_all = [response_score(rec.id, rec.first, q_name) for rec in records]
    # rule 1 floor: a whole-corpus statistic over first-response quality
    floor = percentile(q1_all, 50.0)
    out = FilterOutcome(quality_floor=floor)
    for rec in records:
        q1 = response_score(rec.id, rec.first, q_name)
        q2 = response_score(rec.id, rec.second, q_name)
        d1 = response_score(rec.id, rec.first, d_name)
        d2 = response_score(rec.id, rec.second, d_name)
        if not q2 >= floor:
            out.rule_drops["quality_floor"] += 1
            continue
        if not q2 > q1:
            out.rule_drops["quality_gain"] += 1
            continue
        if not d2 > d1:
            out.rule_drops["diversity_gain"] += 1
            continue
        if abs(rec.second.word_count - rec.first.word_count) > cfg.max_len_delta:
            out.rule_drops["length_delta"] += 1
            continue
        out.pairs.append(PreferencePair(
            pair_id=rec.id,
            prompt_id=rec.prompt_id,
            prompt_text=rec.prompt_text,
            chosen=rec.second,
            rejected=rec.first,
            diversity_gain=d2 - d1,
            quality_gain=q2 - q1,
            method=cfg.method,
        ))
    return out


def divpo_filter(prompt_id: str, prompt_text: str,
                 pool: Sequence[ResponseRecord], cfg: FilterConfig,
                 pool_ids: Optional[Sequence[str]] = None) -> Optional[PreferencePair]:
    """Quartile-based pair selection over one prompt's response pool.

    Pool membership boundaries are inclusive on both sides. Ties on
    diversity resolve to the lowest response index. Returns None when
    the two selections land on the same response.
    """
    if len(pool) == 0:
        raise EmptyInput(f"prompt {prompt_id!r}: empty response pool")
    if pool_ids is None:
        pool_ids = [f"{prompt_id}[{i}]" for i in range(len(pool))]
    d_name, q_name = cfg.resolved_scores()
    qualities = [response_score(pool_ids[i], r, q_name) for i, r in enumerate(pool)]
    diversities = [response_score(pool_ids[i], r, d_name) for i, r in enumerate(pool)]
    hi = percentile(qualities, cfg.chosen_quantile)
    lo = percentile(qualities, cfg.rejected_quantile)
    chosen_pool = [i for i, q in enumerate(qualities) if q >= hi]
    rejected_pool = [i for i, q in enumerate(qualities) if q <= lo]
    if not chosen_pool or not rejected_pool:
        return None
    chosen_idx = max(chosen_pool, key=lambda i: (diversities[i], -i))
    rejected_idx = min(rejected_pool, key=lambda i: (diversities[i], i))
    if chosen_idx == rejected_idx:
        return None
    return PreferencePair(
        pair_id=prompt_id,
        prompt_id=prompt_id,
        prompt_text=prompt_text,
        chosen=pool[chosen_idx],
        rejected=pool[rejected_idx],
        diversity_gain=diversities[chosen_idx] - diversities[rejected_idx],
        quality_gain=qualities[chosen_idx] - qualities[rejected_idx],
        method=PairMethod.DIVPO,
    )


def group_pools(records: Sequence[GenerationRecord]) -> list[tuple[str, str, list[ResponseRecord], list[str]]]:
    """Group a corpus into per-prompt pools, flattening first and second
    responses in input order. Returns (prompt_id, prompt_text, pool,
    per-response ids) tuples in first-appearance order."""
    order: list[str] = []
    pools: dict[str, tuple[str, list[ResponseRecord], list[str]]] = {}
    for rec in records:
        if rec.prompt_id not in pools:
            pools[rec.prompt_id] = (rec.prompt_text, [], [])
            order.append(rec.prompt_id)
        _, pool, ids = pools[rec.prompt_id]
        pool.append(rec.first)
        ids.append(f"{rec.id}:first")
        pool.append(rec.second)
        ids.append(f"{rec.id}:second")
    return [(pid, pools[pid][0], pools[pid][1], pools[pid][2]) for pid in order]


def divpo_filter_corpus(records: Sequence[GenerationRecord],
                        cfg: FilterConfig) -> list[PreferencePair]:
    if len(records) == 0:
        raise EmptyInput("divpo_filter needs at least one record")
    pairs = []
    for prompt_id, prompt_text, pool, ids in group_pools(records):
        pair = divpo_filter(prompt_id, prompt_text, pool, cfg, ids)
        if pair is not None:
            pairs.append(pair)
    return pairs


def _ranking_gain(pair: PreferencePair, gain_metric: Optional[str]) -> float:
    if gain_metric is None:
        return pair.diversity_gain
    chosen = response_score(pair.pair_id, pair.chosen, gain_metric)
    rejected = response_score(pair.pair_id, pair.rejected, gain_metric)
    return chosen - rejected


def select_top_k(pairs: Sequence[PreferencePair], cfg: FilterConfig) -> list[PreferencePair]:
    """Keep the top_k pairs by descending gain, ties by ascending pair id."""
    ranked = sorted(pairs, key=lambda p: (-_ranking_gain(p, cfg.gain_metric), p.pair_id))
    return ranked[:min(cfg.top_k, len(ranked))]


@dataclass(frozen=True)
class LengthDeltaStats:
    mean: float
    std: float  # population standard deviation
    count: int


def length_delta_report(pairs: Sequence[PreferencePair]) -> LengthDeltaStats:
    """Mean and population spread of chosen-minus-rejected word counts."""
    if len(pairs) == 0:
        raise EmptyInput("length_delta_report needs at least one pair")
    deltas = [p.length_delta() for p in pairs]
    mean = sum(deltas) / len(deltas)
    var = sum((d - mean) ** 2 for d in deltas) / len(deltas)
    return LengthDeltaStats(mean=mean, std=sqrt(var), count=len(deltas))


__all__ = [
    "FilterConfig", "FilterOutcome", "LengthDeltaStats",
    "dns_filter", "divpo_filter", "divpo_filter_corpus", "group_pools",
    "select_top_k", "length_delta_report", "response_score", "has_scores",
]
