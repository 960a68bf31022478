"""Frequentist fits and the fixed three-node breach network.

The network structure is dpia -> ext -> db (effective impact assessment,
external attack, data breach). Inputs are the five free conditional
probabilities; every other quantity is derived by total probability and
Bayes' rule, never accepted as an input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence


def _check_probability(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0,1], got {value}")


@dataclass(frozen=True)
class PoissonModel:
    """Event frequency model: expected events per year over a timeframe."""

    lam: float
    timeframe_years: float = 1.0

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.timeframe_years <= 0:
            raise ValueError("timeframe_years must be positive")


@dataclass(frozen=True)
class NormalModel:
    """Normal fit of fine magnitudes."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True)
class BreachNetworkParams:
    """Free parameters of the dpia -> ext -> db network."""

    p_dpia: float
    p_ext_given_dpia: float
    p_ext_given_not_dpia: float
    p_db_given_ext: float
    p_db_given_not_ext: float

    def __post_init__(self) -> None:
        for name in (
            "p_dpia",
            "p_ext_given_dpia",
            "p_ext_given_not_dpia",
            "p_db_given_ext",
            "p_db_given_not_ext",
        ):
            _check_probability(getattr(self, name), name)


@dataclass(frozen=True)
class BreachNetworkDerived:
    """All posteriors derivable from the network parameters."""

    p_ext: float
    p_db: float
    p_ext_given_db: float
    p_ext_given_not_db: float
    p_db_given_dpia: float
    p_db_given_not_dpia: float

    def to_json_dict(self) -> dict:
        return {
            "p_ext": self.p_ext,
            "p_db": self.p_db,
            "p_ext_given_db": self.p_ext_given_db,
            "p_ext_given_not_db": self.p_ext_given_not_db,
            "p_db_given_dpia": self.p_db_given_dpia,
            "p_db_given_not_dpia": self.p_db_given_not_dpia,
        }


@dataclass(frozen=True)
class IncidentMix:
    """Shares of confidentiality / integrity / availability incidents."""

    p_c: float
    p_i: float
    p_a: float

    def __post_init__(self) -> None:
        for name in ("p_c", "p_i", "p_a"):
            _check_probability(getattr(self, name), name)
        total = self.p_c + self.p_i + self.p_a
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"incident mix must sum to 1, got {total}")


@dataclass(frozen=True)
class FineGivenPrinciple:
    """Probability of a fine conditional on each breached security principle."""

    p_d_given_c: float
    p_d_given_i: float
    p_d_given_a: float

    def __post_init__(self) -> None:
        for name in ("p_d_given_c", "p_d_given_i", "p_d_given_a"):
            _check_probability(getattr(self, name), name)


class AttributionResult(NamedTuple):
    p_d: float
    posterior_c: float
    posterior_i: float
    posterior_a: float


def fit_poisson(counts: Sequence[int], timeframe_years: float = 1.0) -> PoissonModel:
    """Fit the annual event rate as the mean of per-year counts."""
    if not counts:
        raise ValueError("fit_poisson needs at least one yearly count")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    lam = sum(counts) / len(counts)
    if lam == 0:
        raise ValueError("all counts are zero; rate would be degenerate")
    return PoissonModel(lam=lam, timeframe_years=timeframe_years)


def poisson_pmf(model: PoissonModel, k: int) -> float:
    """P(K = k) for the fitted rate, evaluated in log space."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    lam = model.lam
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def fit_normal(amounts: Sequence[float]) -> NormalModel:
    """Sample mean and n-1 standard deviation of fine amounts."""
    n = len(amounts)
    if n < 2:
        raise ValueError(f"fit_normal needs at least two amounts, got {n}")
    values = [float(a) for a in amounts]
    mu = sum(values) / n
    var = sum((v - mu) ** 2 for v in values) / (n - 1)
    return NormalModel(mu=mu, sigma=math.sqrt(var))


def solve_breach_network(params: BreachNetworkParams) -> BreachNetworkDerived:
    """Derive every downstream probability of the dpia -> ext -> db chain.

    Raises when P(db) is 0 or 1, since the conditionals on db (and on ~db)
    would divide by a zero-probability event.
    """
    p_not_dpia = 1.0 - params.p_dpia
    p_ext = params.p_dpia * params.p_ext_given_dpia + p_not_dpia * params.p_ext_given_not_dpia
    p_db = p_ext * params.p_db_given_ext + (1.0 - p_ext) * params.p_db_given_not_ext

    if p_db == 0.0:
        raise ValueError("degenerate denominator P(db)=0: no breach event to condition on")
    if p_db == 1.0:
        raise ValueError("degenerate denominator P(~db)=0: breach is certain")

    p_ext_given_db = params.p_db_given_ext * p_ext / p_db
    p_ext_given_not_db = (1.0 - params.p_db_given_ext) * p_ext / (1.0 - p_db)
    p_db_given_dpia = (
        params.p_ext_given_dpia * params.p_db_given_ext
        + (1.0 - params.p_ext_given_dpia) * params.p_db_given_not_ext
    )
    p_db_given_not_dpia = (
        params.p_ext_given_not_dpia * params.p_db_given_ext
        + (1.0 - params.p_ext_given_not_dpia) * params.p_db_given_not_ext
    )
    return BreachNetworkDerived(
        p_ext=p_ext,
        p_db=p_db,
        p_ext_given_db=p_ext_given_db,
        p_ext_given_not_db=p_ext_given_not_db,
        p_db_given_dpia=p_db_given_dpia,
        p_db_given_not_dpia=p_db_given_not_dpia,
    )


def total_probability_attribution(
    mix: IncidentMix, fine_given: FineGivenPrinciple
) -> AttributionResult:
    """Fine probability by total probability over C/I/A, plus posteriors."""
    joint_c = mix.p_c * fine_given.p_d_given_c
    joint_i = mix.p_i * fine_given.p_d_given_i
    joint_a = mix.p_a * fine_given.p_d_given_a
    p_d = joint_c + joint_i + joint_a
    if p_d == 0.0:
        raise ValueError("degenerate denominator P(D)=0: a fine is impossible under this mix")
    return AttributionResult(
        p_d=p_d,
        posterior_c=joint_c / p_d,
        posterior_i=joint_i / p_d,
        posterior_a=joint_a / p_d,
    )
