"""Statistical comparisons and evaluation-support routines.

The p-values for the correlation and t-test routines are computed here
from first principles via the regularized incomplete beta function
(continued-fraction evaluation, target accuracy 1e-10), so the package
carries no statistics-library dependency at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    BothEmpty,
    EmptyInput,
    LengthMismatch,
    TooFewSamples,
    ZeroVariance,
)
from .records import Judgment, TaggedText
from .tokenizer import tokenize

_BETA_EPS = 1e-15
_BETA_MAX_ITER = 500
_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    """Two-sided p-value for a t statistic with df degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return betainc_reg(df / 2.0, 0.5, x)


# --- correlation -----------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p: float
    n: int
    x_name: str = ""
    y_name: str = ""


def pearson(x: Sequence[float], y: Sequence[float],
            x_name: str = "", y_name: str = "") -> CorrelationResult:
    """Pearson correlation with a two-sided p-value from the t
    transform r * sqrt(n - 2) / sqrt(1 - r^2)."""
    if len(x) != len(y):
        raise LengthMismatch(f"x has {len(x)} values, y has {len(y)}")
    n = len(x)
    if n < 3:
        raise TooFewSamples(f"pearson needs at least 3 paired values, got {n}")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("pearson is undefined for a constant sequence")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = t_two_sided_p(t, n - 2)
    return CorrelationResult(r=r, p=p, n=n, x_name=x_name, y_name=y_name)


# --- two-sample t-test -------------------------------------------------------------

@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: float
    n_a: int
    n_b: int
    equal_variance: bool


def _mean_var(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var


def ttest_ind(a: Sequence[float], b: Sequence[float],
              equal_variance: bool = True) -> TTestResult:
    """Independent two-sample t-test, t = (mean(a) - mean(b)) / SE.

    Pooled-variance by default; equal_variance=False switches to the
    unequal-variance form with Welch-Satterthwaite degrees of freedom.
    """
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise TooFewSamples(f"each sample needs at least 2 values, got {na} and {nb}")
    ma, va = _mean_var(a)
    mb, vb = _mean_var(b)
    diff = ma - mb
    if equal_variance:
        df = float(na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se = math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    else:
        va_n = va / na
        vb_n = vb / nb
        se = math.sqrt(va_n + vb_n)
        if va_n + vb_n == 0.0:
            df = float(na + nb - 2)
        else:
            df = (va_n + vb_n) ** 2 / (va_n ** 2 / (na - 1) + vb_n ** 2 / (nb - 1))
    if se == 0.0:
        # degenerate: both samples constant
        t = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    else:
        t = diff / se
    return TTestResult(t=t, p=t_two_sided_p(t, df), df=df, n_a=na, n_b=nb,
                       equal_variance=equal_variance)


# --- token-overlap mining ------------------------------------------------------------

def jaccard(a: set, b: set) -> float:
    """Set overlap |a & b| / |a | b|."""
    if not a and not b:
        raise BothEmpty("jaccard of two empty sets is undefined")
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class EvalPair:
    index_a: int
    index_b: int
    similarity: float


def least_similar_pairs(responses_a: Sequence[str], responses_b: Sequence[str],
                        k: int) -> list[EvalPair]:
    """The k cross-method response pairs with the lowest Jaccard
    similarity over token sets, ties broken by (index_a, index_b)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(responses_a) == 0 or len(responses_b) == 0:
        raise EmptyInput("both response lists must be non-empty")
    sets_a = [set(tokenize(t)) for t in responses_a]
    sets_b = [set(tokenize(t)) for t in responses_b]
    scored = []
    for i, sa in enumerate(sets_a):
        for j, sb in enumerate(sets_b):
            scored.append(EvalPair(index_a=i, index_b=j, similarity=jaccard(sa, sb)))
    scored.sort(key=lambda p: (p.similarity, p.index_a, p.index_b))
    return scored[:min(k, len(scored))]


# --- POS bigram repetition -------------------------------------------------------------

@dataclass(frozen=True)
class BigramRow:
    bigram: tuple[str, str]
    docs_present: int
    pct_at_start: float  # share of occurrences sitting at token position 0


def pos_bigram_report(corpus: Sequence[TaggedText], top_n: int = 5) -> list[BigramRow]:
    """Most document-frequent POS tag bigrams and how often each one
    opens a document."""
    if len(corpus) == 0:
        raise EmptyInput("pos_bigram_report needs at least one document")
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    docs: dict[tuple[str, str], int] = {}
    occurrences: dict[tuple[str, str], int] = {}
    at_start: dict[tuple[str, str], int] = {}
    for doc in corpus:
        seen: set = set()
        for pos in range(len(doc.tags) - 1):
            bg = (doc.tags[pos], doc.tags[pos + 1])
            occurrences[bg] = occurrences.get(bg, 0) + 1
            if pos == 0:
                at_start[bg] = at_start.get(bg, 0) + 1
            if bg not in seen:
                seen.add(bg)
                docs[bg] = docs.get(bg, 0) + 1
    rows = [
        BigramRow(bigram=bg, docs_present=docs[bg],
                  pct_at_start=100.0 * at_start.get(bg, 0) / occurrences[bg])
        for bg in docs
    ]
    rows.sort(key=lambda row: (-row.docs_present, row.bigram))
    return rows[:min(top_n, len(rows))]


# --- win rates ----------------------------------------------------------------------

@dataclass(frozen=True)
class WinRate:
    win_a: float
    win_b: float
    tie: float
    count: int


def win_rate(judgments: Sequence[Judgment]) -> WinRate:
    """Percentage of A wins, B wins, and ties over all judgments."""
    if len(judgments) == 0:
        raise EmptyInput("win_rate needs at least one judgment")
    n = len(judgments)
    a = sum(1 for j in judgments if j.winner == "A")
    b = sum(1 for j in judgments if j.winner == "B")
    t = n - a - b
    return WinRate(win_a=100.0 * a / n, win_b=100.0 * b / n, tie=100.0 * t / n, count=n)
