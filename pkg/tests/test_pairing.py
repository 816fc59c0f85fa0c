import statistics
from dataclasses import replace

import pytest

from divcurate import pairing
from divcurate.errors import EmptyInput, MissingScore
from divcurate.pairing import FilterConfig
from divcurate.records import PairMethod, ResponseRecord

from conftest import make_record, make_response, make_text


def scored_response(rng, n_words, quality, entropy, **extra_metrics):
    metrics = {"entropy": entropy}
    metrics.update(extra_metrics)
    return make_response(rng, n_words, quality=quality, metrics=metrics)


def record(rng, idx, first, second, prompt_id=None):
    return make_record(rng, idx, first, second, prompt_id=prompt_id)


def passing_record(rng, idx, base_q=0.4, q_gain=0.2, d_gain=1.0, wc=30, delta=2):
    first = scored_response(rng, wc, base_q, 2.0)
    second = scored_response(rng, wc + delta, base_q + q_gain, 2.0 + d_gain)
    return record(rng, idx, first, second)


# --- dns_filter -------------------------------------------------------------


def test_all_rules_pass(rng):
    recs = [passing_record(rng, i) for i in range(4)]
    out = pairing.dns_filter(recs, FilterConfig())
    assert [p.pair_id for p in out.pairs] == [r.id for r in recs]
    pair = out.pairs[0]
    assert pair.chosen == recs[0].second
    assert pair.rejected == recs[0].first
    assert pair.method is PairMethod.DNS
    assert pair.diversity_gain > 0
    assert pair.quality_gain > 0


def test_identical_responses_dropped(rng):
    resp = scored_response(rng, 30, 0.5, 2.0)
    recs = [record(rng, 0, resp, resp)]
    out = pairing.dns_filter(recs, FilterConfig())
    assert out.pairs == []
    assert out.rule_drops["quality_gain"] == 1


def test_each_rule_drops(rng):
    # one record per failure mode, plus one clean record anchoring the floor
    clean = passing_record(rng, 0, base_q=0.5)
    below_floor = record(rng, 1,
                         scored_response(rng, 30, 0.9, 2.0),
                         scored_response(rng, 30, 0.1, 3.0))  # q2 under the median
    no_q_gain = record(rng, 2,
                       scored_response(rng, 30, 0.8, 2.0),
                       scored_response(rng, 30, 0.7, 3.0))
    no_d_gain = record(rng, 3,
                       scored_response(rng, 30, 0.5, 3.0),
                       scored_response(rng, 30, 0.8, 2.5))
    too_long = record(rng, 4,
                      scored_response(rng, 30, 0.5, 2.0),
                      scored_response(rng, 37, 0.8, 3.0))  # delta 7
    out = pairing.dns_filter([clean, below_floor, no_q_gain, no_d_gain, too_long],
                             FilterConfig())
    assert [p.pair_id for p in out.pairs] == [clean.id]
    assert out.rule_drops == {"quality_floor": 1, "quality_gain": 1,
                              "diversity_gain": 1, "length_delta": 1}


def test_rule_one_uses_whole_corpus_median(rng):
    # second responses all beat their own first response, but only those at
    # or above the median of *all* first-response qualities survive rule 1
    recs = []
    for i, (q1, q2) in enumerate([(0.1, 0.2), (0.3, 0.4), (0.5, 0.9), (0.7, 0.8)]):
        recs.append(record(rng, i,
                           scored_response(rng, 20, q1, 1.0),
                           scored_response(rng, 20, q2, 2.0)))
    out = pairing.dns_filter(recs, FilterConfig())
    # median of first qualities [0.1, 0.3, 0.5, 0.7] = 0.4
    assert out.quality_floor == statistics.quantiles(
        [0.1, 0.3, 0.5, 0.7], n=2, method="inclusive")[0]
    assert [p.pair_id for p in out.pairs] == [recs[1].id, recs[2].id, recs[3].id]


def test_floor_comparison_is_inclusive(rng):
    # a second-response quality exactly at the median passes rule 1
    recs = [
        record(rng, 0, scored_response(rng, 20, 0.2, 1.0),
               scored_response(rng, 20, 0.4, 2.0)),
        record(rng, 1, scored_response(rng, 20, 0.6, 1.0),
               scored_response(rng, 20, 0.7, 2.0)),
    ]
    out = pairing.dns_filter(recs, FilterConfig())
    assert out.quality_floor == 0.4
    assert len(out.pairs) == 2


def test_dns_lite_uses_ttr_and_maas(rng):
    # lite variant reads ttr (diversity) and maas (quality, higher better)
    first = make_response(rng, 20, metrics={"ttr": 0.5, "maas": 0.10})
    second = make_response(rng, 21, metrics={"ttr": 0.7, "maas": 0.20})
    out = pairing.dns_filter([record(rng, 0, first, second)],
                             FilterConfig(method=PairMethod.DNS_LITE))
    assert len(out.pairs) == 1
    assert out.pairs[0].method is PairMethod.DNS_LITE
    assert out.pairs[0].diversity_gain == pytest.approx(0.2)
    assert out.pairs[0].quality_gain == pytest.approx(0.1)


def test_missing_score_is_loud(rng):
    first = scored_response(rng, 20, 0.5, 2.0)
    second = make_response(rng, 20, quality=0.8)  # no entropy metric
    with pytest.raises(MissingScore):
        pairing.dns_filter([record(rng, 0, first, second)], FilterConfig())


def test_order_independence(rng):
    recs = []
    for i in range(60):
        q1, q2 = rng.random(), rng.random()
        d1, d2 = rng.uniform(1, 4), rng.uniform(1, 4)
        wc = rng.randint(10, 40)
        recs.append(record(rng, i,
                           scored_response(rng, wc, q1, d1),
                           scored_response(rng, wc + rng.randint(-7, 7), q2, d2)))
    ids = {p.pair_id for p in pairing.dns_filter(recs, FilterConfig()).pairs}
    shuffled = recs[:]
    rng.shuffle(shuffled)
    ids_shuffled = {p.pair_id for p in pairing.dns_filter(shuffled, FilterConfig()).pairs}
    assert ids == ids_shuffled


def test_empty_corpus():
    with pytest.raises(EmptyInput):
        pairing.dns_filter([], FilterConfig())


def test_against_brute_force_oracle(rng):
    # independent re-derivation: statistics.quantiles for the floor and a
    # plain predicate loop; odd corpus size keeps the median an exact
    # order statistic on both routes
    for _ in range(5):
        recs = []
        for i in range(75):
            wc = rng.randint(10, 40)
            recs.append(record(rng, i,
                               scored_response(rng, wc, rng.random(), rng.uniform(1, 4)),
                               scored_response(rng, wc + rng.randint(-8, 8),
                                               rng.random(), rng.uniform(1, 4))))
        got = pairing.dns_filter(recs, FilterConfig())
        floor = statistics.quantiles(
            [r.first.quality_score for r in recs], n=2, method="inclusive")[0]
        expected = []
        for r in recs:
            if (r.second.quality_score >= floor
                    and r.second.quality_score > r.first.quality_score
                    and r.second.metrics["entropy"] > r.first.metrics["entropy"]
                    and abs(r.second.word_count - r.first.word_count) <= 5):
                expected.append(r.id)
        assert [p.pair_id for p in got.pairs] == expected
        assert got.kept + sum(got.rule_drops.values()) == len(recs)


# --- divpo_filter ------------------------------------------------------------


def pool_response(rng, quality, entropy, n_words=15):
    return scored_response(rng, n_words, quality, entropy)


def test_divpo_four_response_pool(rng):
    qualities = [0.1, 0.2, 0.3, 0.4]
    diversities = [4.0, 3.0, 2.0, 1.0]
    pool = [pool_response(rng, q, d) for q, d in zip(qualities, diversities)]
    pair = pairing.divpo_filter("p1", "prompt", pool, FilterConfig(method=PairMethod.DIVPO))
    # 75th pct of qualities = 0.325 -> chosen pool holds only q=0.4;
    # 25th pct = 0.175 -> rejected pool holds only q=0.1 (diversity 4)
    assert pair is not None
    assert pair.chosen == pool[3]
    assert pair.rejected == pool[0]
    assert pair.method is PairMethod.DIVPO
    assert pair.quality_gain == pytest.approx(0.3)
    assert pair.diversity_gain == pytest.approx(-3.0)


def test_divpo_single_response_pool(rng):
    pool = [pool_response(rng, 0.5, 2.0)]
    assert pairing.divpo_filter("p1", "x", pool, FilterConfig()) is None


def test_divpo_identical_scores_yield_none(rng):
    pool = [pool_response(rng, 0.5, 2.0) for _ in range(4)]
    # every response is in both pools; argmax and argmin both resolve to
    # index 0, so no pair
    assert pairing.divpo_filter("p1", "x", pool, FilterConfig()) is None


def test_divpo_tie_breaks_to_lowest_index(rng):
    pool = [
        pool_response(rng, 0.9, 3.0),
        pool_response(rng, 0.9, 3.0),
        pool_response(rng, 0.1, 1.0),
        pool_response(rng, 0.1, 1.0),
    ]
    pair = pairing.divpo_filter("p1", "x", pool, FilterConfig())
    assert pair is not None
    assert pair.chosen is pool[0]
    assert pair.rejected is pool[2]


def test_divpo_inclusive_quartile_membership(rng):
    # five qualities 0.1..0.5: p75 = 0.4, p25 = 0.2, both inclusive
    qualities = [0.1, 0.2, 0.3, 0.4, 0.5]
    diversities = [1.0, 5.0, 3.0, 9.0, 2.0]
    pool = [pool_response(rng, q, d) for q, d in zip(qualities, diversities)]
    pair = pairing.divpo_filter("p1", "x", pool, FilterConfig())
    # chosen pool {0.4, 0.5} -> max diversity 9.0 (index 3)
    # rejected pool {0.1, 0.2} -> min diversity 1.0 (index 0)
    assert pair.chosen is pool[3]
    assert pair.rejected is pool[0]


def test_divpo_corpus_grouping(rng):
    recs = [
        record(rng, 0, pool_response(rng, 0.9, 5.0), pool_response(rng, 0.1, 1.0),
               prompt_id="pA"),
        record(rng, 1, pool_response(rng, 0.5, 3.0), pool_response(rng, 0.6, 4.0),
               prompt_id="pA"),
        record(rng, 2, pool_response(rng, 0.2, 2.0), pool_response(rng, 0.2, 2.0),
               prompt_id="pB"),
    ]
    pairs = pairing.divpo_filter_corpus(recs, FilterConfig())
    assert [p.pair_id for p in pairs] == ["pA"]  # pB pool collapses to none
    assert pairs[0].prompt_id == "pA"


# --- select_top_k ------------------------------------------------------------


def _gain_pair(pid, gain):
    return pairing.PreferencePair(
        pair_id=pid, prompt_id=pid, prompt_text="x",
        chosen=ResponseRecord(text="a b c"), rejected=ResponseRecord(text="a b d"),
        diversity_gain=gain, quality_gain=0.1, method=PairMethod.DNS)


def test_top_k_orders_by_gain():
    pairs = [_gain_pair(f"id{i}", g) for i, g in enumerate([3.0, 5.0, 1.0, 4.0, 2.0])]
    picked = pairing.select_top_k(pairs, FilterConfig(top_k=3))
    assert [p.pair_id for p in picked] == ["id1", "id3", "id0"]


def test_top_k_saturates():
    pairs = [_gain_pair(f"id{i}", float(i)) for i in range(3)]
    picked = pairing.select_top_k(pairs, FilterConfig(top_k=10))
    assert len(picked) == 3


def test_top_k_tie_breaks_by_pair_id():
    pairs = [_gain_pair(pid, 1.0) for pid in ("b", "a", "c")]
    picked = pairing.select_top_k(pairs, FilterConfig(top_k=2))
    assert [p.pair_id for p in picked] == ["a", "b"]


def test_top_k_gain_metric_override():
    a = replace(_gain_pair("a", 1.0),
                chosen=ResponseRecord(text="x", metrics={"hdd": 0.9}),
                rejected=ResponseRecord(text="y", metrics={"hdd": 0.1}))
    b = replace(_gain_pair("b", 5.0),
                chosen=ResponseRecord(text="x", metrics={"hdd": 0.2}),
                rejected=ResponseRecord(text="y", metrics={"hdd": 0.1}))
    picked = pairing.select_top_k([a, b], FilterConfig(top_k=1, gain_metric="hdd"))
    assert picked[0].pair_id == "a"


# --- length_delta_report --------------------------------------------------------


def _delta_pair(rng, pid, chosen_words, rejected_words):
    return pairing.PreferencePair(
        pair_id=pid, prompt_id=pid, prompt_text="x",
        chosen=ResponseRecord(text=make_text(rng, chosen_words)),
        rejected=ResponseRecord(text=make_text(rng, rejected_words)),
        diversity_gain=1.0, quality_gain=0.1, method=PairMethod.DNS)


def test_length_delta_zero(rng):
    pairs = [_delta_pair(rng, f"p{i}", 12, 12) for i in range(5)]
    report = pairing.length_delta_report(pairs)
    assert report.mean == 0.0
    assert report.std == 0.0


def test_length_delta_population_std(rng):
    pairs = [_delta_pair(rng, "a", 10, 12), _delta_pair(rng, "b", 12, 10)]
    report = pairing.length_delta_report(pairs)
    assert report.mean == 0.0
    assert report.std == 2.0


def test_length_delta_empty():
    with pytest.raises(EmptyInput):
        pairing.length_delta_report([])
