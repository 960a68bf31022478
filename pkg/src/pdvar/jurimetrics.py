"""Descriptive statistics over fine corpora.

Money aggregation stays in exact decimal arithmetic; the quantile index is
computed in binary floating point, matching the linear interpolation between
closest ranks used by common dataframe tooling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

from .corpus import CorpusQuery, FineCorpus, filter_corpus


class EmptySampleError(ValueError):
    """A statistic was requested over an empty sample."""


@dataclass(frozen=True)
class HistoricalVaR:
    """An empirical quantile of fine amounts under a corpus query."""

    quantile_level: float
    value: Decimal
    corpus_size: int
    query: CorpusQuery

    def __post_init__(self) -> None:
        if not 0.0 < self.quantile_level < 1.0:
            raise ValueError(f"quantile level must be in (0,1), got {self.quantile_level}")
        if self.corpus_size < 1:
            raise ValueError("corpus_size must be >= 1")

    def to_json_dict(self) -> dict:
        return {
            "level": self.quantile_level,
            "value": float(self.value),
            "n": self.corpus_size,
            "query": self.query.to_json_dict(),
        }


@dataclass(frozen=True)
class DeltaReport:
    """Mean gap between counterfactual and actually-imposed fines."""

    mean_counterfactual: Decimal
    mean_actual: Decimal
    delta: Decimal
    n: int

    def __post_init__(self) -> None:
        if self.delta != self.mean_counterfactual - self.mean_actual:
            raise ValueError("delta must equal mean_counterfactual - mean_actual")


def country_mean(corpus: FineCorpus, country: str) -> Decimal:
    """Arithmetic mean of fine amounts for one country, in exact decimals."""
    amounts = [rec.fine for rec in corpus if rec.country == country]
    if not amounts:
        raise EmptySampleError(f"no records for country {country!r}")
    return sum(amounts, Decimal(0)) / len(amounts)


def quantile_index(level: float, n: int) -> tuple[int, float]:
    """(lower rank, fractional part) of the interpolation index level*(n-1)."""
    h = level * (n - 1)
    lo = math.floor(h)
    return lo, h - lo


def quantile_linear(sorted_values: Sequence[float], level: float) -> float:
    """Linear-interpolation quantile of an ascending float sample."""
    n = len(sorted_values)
    if n == 0:
        raise EmptySampleError("quantile of an empty sample")
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"level must be in [0,1], got {level}")
    lo, frac = quantile_index(level, n)
    if lo + 1 >= n:
        return float(sorted_values[-1])
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo])


def _quantile_decimal(sorted_values: Sequence[Decimal], level: float) -> Decimal:
    n = len(sorted_values)
    lo, frac = quantile_index(level, n)
    if lo + 1 >= n:
        return sorted_values[-1]
    return sorted_values[lo] + Decimal(frac) * (sorted_values[lo + 1] - sorted_values[lo])


def historical_var(corpus: FineCorpus, query: CorpusQuery, level: float) -> HistoricalVaR:
    """Empirical value-at-risk quantile of the queried fine amounts."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0,1), got {level}")
    selected = filter_corpus(corpus, query)
    if len(selected) == 0:
        raise EmptySampleError("query matched no records")
    amounts = sorted(selected.fines())
    return HistoricalVaR(
        quantile_level=level,
        value=_quantile_decimal(amounts, level),
        corpus_size=len(amounts),
        query=query,
    )


def seriousness_delta(pairs: Sequence[tuple[Decimal, Decimal]]) -> DeltaReport:
    """Column means of (actual, counterfactual) fine pairs and their gap.

    The counterfactual column holds what the fine would have been absent the
    aggravating or mitigating circumstance under study.
    """
    if not pairs:
        raise EmptySampleError("seriousness_delta needs at least one pair")
    n = len(pairs)
    mean_actual = sum((Decimal(a) for a, _ in pairs), Decimal(0)) / n
    mean_cf = sum((Decimal(c) for _, c in pairs), Decimal(0)) / n
    return DeltaReport(
        mean_counterfactual=mean_cf,
        mean_actual=mean_actual,
        delta=mean_cf - mean_actual,
        n=n,
    )
