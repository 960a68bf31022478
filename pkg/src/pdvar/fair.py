"""Monte Carlo loss engine: PERT inputs, event thinning, exceedance curves.

The supervisory authority is modeled as the threat community: threat events
arrive at a PERT-distributed yearly frequency, and each one becomes a loss
event when a fresh threat-capability draw beats a fresh resistance-strength
draw. Fines enter either as the primary loss magnitude or as part of the
secondary bucket, selected by ``fine_role``.

Every iteration draws from its own generator seeded by (seed, iteration
index), so results are a pure function of (scenario, iterations, seed) and
identical for any worker count.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import report
from .conformal import ConformalInterval
from .jurimetrics import HistoricalVaR, quantile_linear

FINE_ROLES = ("secondary_loss", "primary_loss")

DEFAULT_PERT_SHAPE = 4.0


@dataclass(frozen=True)
class PertParams:
    """Three-point estimate (min, most likely, max) with shape weight."""

    min: float
    mode: float
    max: float
    lam: float = DEFAULT_PERT_SHAPE

    def __post_init__(self) -> None:
        if not self.min <= self.mode <= self.max:
            raise ValueError(
                f"need min <= mode <= max, got ({self.min}, {self.mode}, {self.max})"
            )
        if self.lam <= 0:
            raise ValueError(f"shape weight must be positive, got {self.lam}")

    @property
    def mean(self) -> float:
        """Analytic mean (min + lam*mode + max) / (lam + 2)."""
        return (self.min + self.lam * self.mode + self.max) / (self.lam + 2.0)

    def to_json_dict(self) -> dict:
        d = {"min": self.min, "mode": self.mode, "max": self.max}
        if self.lam != DEFAULT_PERT_SHAPE:
            d["lambda"] = self.lam
        return d

    @classmethod
    def from_json_dict(cls, data: dict, field: str = "pert") -> "PertParams":
        try:
            return cls(
                min=float(data["min"]),
                mode=float(data["mode"]),
                max=float(data["max"]),
                lam=float(data.get("lambda", DEFAULT_PERT_SHAPE)),
            )
        except KeyError as exc:
            raise ValueError(f"scenario field {field!r} is missing key {exc}") from None


@dataclass(frozen=True)
class RiskScenario:
    """Inputs of the customized loss model for one data controller."""

    tef: PertParams  # threat events per year
    tcap: PertParams  # authority capability, 0-100 scale
    rs: PertParams  # controller resistance strength, 0-100 scale
    primary_magnitude: PertParams  # money per primary loss event
    slef: float  # fraction of primary events triggering secondary loss
    secondary_magnitude: PertParams  # money per secondary loss event
    fine_role: str = "secondary_loss"

    def __post_init__(self) -> None:
        if self.tef.min < 0:
            raise ValueError("threat event frequency cannot be negative")
        if not 0.0 <= self.slef <= 1.0:
            raise ValueError(f"slef must be in [0,1], got {self.slef}")
        if self.fine_role not in FINE_ROLES:
            raise ValueError(f"fine_role must be one of {FINE_ROLES}, got {self.fine_role!r}")

    def to_json_dict(self) -> dict:
        return {
            "tef": self.tef.to_json_dict(),
            "tcap": self.tcap.to_json_dict(),
            "rs": self.rs.to_json_dict(),
            "primary_magnitude": self.primary_magnitude.to_json_dict(),
            "slef": self.slef,
            "secondary_magnitude": self.secondary_magnitude.to_json_dict(),
            "fine_role": self.fine_role,
        }


@dataclass(frozen=True)
class RangeSummary:
    min: float
    avg: float
    max: float

    def __post_init__(self) -> None:
        tol = 1e-9 * max(1.0, abs(self.min), abs(self.max))
        if not (self.min <= self.avg + tol and self.avg <= self.max + tol):
            raise ValueError(f"summary not ordered: {self.min}, {self.avg}, {self.max}")

    def to_json_dict(self) -> dict:
        return {"min": self.min, "avg": self.avg, "max": self.max}


@dataclass(frozen=True)
class BucketSummary:
    """Per-bucket event frequency and per-event magnitude ranges."""

    loss_events_per_year: RangeSummary
    loss_magnitude: RangeSummary

    def to_json_dict(self) -> dict:
        return {
            "loss_events_per_year": self.loss_events_per_year.to_json_dict(),
            "loss_magnitude": self.loss_magnitude.to_json_dict(),
        }


@dataclass(frozen=True, eq=False)
class SimulationResult:
    iterations: int
    annualized_losses: np.ndarray
    primary_summary: BucketSummary
    secondary_summary: BucketSummary
    seed: int
    magnitude_source: str | None = None

    def summary_json_dict(self) -> dict:
        d = {
            "iterations": self.iterations,
            "seed": self.seed,
            "primary": self.primary_summary.to_json_dict(),
            "secondary": self.secondary_summary.to_json_dict(),
        }
        if self.magnitude_source is not None:
            d["magnitude_source"] = self.magnitude_source
        return d


@dataclass(frozen=True)
class LossExceedanceCurve:
    """P(annual loss >= threshold) at strictly increasing thresholds."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        thresholds = [p[0] for p in self.points]
        probs = [p[1] for p in self.points]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")
        if any(b > a for a, b in zip(probs, probs[1:])):
            raise ValueError("exceedance probabilities must be non-increasing")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("probabilities must lie in [0,1]")


@dataclass(frozen=True)
class PdVaRStatement:
    """A value-at-risk range at a confidence level over a timeframe."""

    confidence: float
    lower: float
    upper: float
    timeframe: str
    rendered: str

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    def to_json_dict(self) -> dict:
        return {
            "confidence": self.confidence,
            "lower": self.lower,
            "upper": self.upper,
            "timeframe": self.timeframe,
            "rendered": self.rendered,
        }


def _pert_draw(rng: np.random.Generator, params: PertParams, size: int) -> np.ndarray:
    if size == 0:
        return np.empty(0)
    span = params.max - params.min
    if span == 0.0:
        return np.full(size, float(params.min))
    alpha = 1.0 + params.lam * (params.mode - params.min) / span
    beta = 1.0 + params.lam * (params.max - params.mode) / span
    return params.min + span * rng.beta(alpha, beta, size)


def sample_pert(params: PertParams, n: int, seed: int) -> np.ndarray:
    """n PERT draws; a degenerate min=mode=max yields the constant min."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _pert_draw(np.random.default_rng(_check_seed(seed)), params, n)


def vulnerability(tcap: PertParams, rs: PertParams, n: int, seed: int) -> float:
    """Monte Carlo P(capability draw > resistance draw) over n paired draws."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(_check_seed(seed))
    cap = _pert_draw(rng, tcap, n)
    res = _pert_draw(rng, rs, n)
    return float(np.mean(cap > res))


def _check_seed(seed: int) -> int:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return seed


def _iteration_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


# Per-iteration record columns (magnitude mins/maxs are NaN when no event).
_COLS = 9
(_LOSS, _KP, _KS, _PMIN, _PMAX, _PSUM, _SMIN, _SMAX, _SSUM) = range(_COLS)


def _simulate_range(scenario: RiskScenario, seed: int, start: int, stop: int) -> np.ndarray:
    rows = np.empty((stop - start, _COLS))
    for offset, index in enumerate(range(start, stop)):
        rng = _iteration_rng(seed, index)

        tef_draw = float(_pert_draw(rng, scenario.tef, 1)[0])
        whole = math.floor(tef_draw)
        # Stochastic rounding keeps the mean of the integer event count.
        threat_events = whole + (1 if rng.random() < tef_draw - whole else 0)

        cap = _pert_draw(rng, scenario.tcap, threat_events)
        res = _pert_draw(rng, scenario.rs, threat_events)
        k_primary = int(np.sum(cap > res))

        primary_draws = _pert_draw(rng, scenario.primary_magnitude, k_primary)
        primary_loss = float(np.sum(primary_draws))

        k_secondary = int(rng.binomial(k_primary, scenario.slef)) if k_primary else 0
        secondary_draws = _pert_draw(rng, scenario.secondary_magnitude, k_secondary)
        secondary_loss = float(np.sum(secondary_draws))

        row = rows[offset]
        row[_LOSS] = primary_loss + secondary_loss
        row[_KP] = k_primary
        row[_KS] = k_secondary
        row[_PMIN] = primary_draws.min() if k_primary else np.nan
        row[_PMAX] = primary_draws.max() if k_primary else np.nan
        row[_PSUM] = primary_loss
        row[_SMIN] = secondary_draws.min() if k_secondary else np.nan
        row[_SMAX] = secondary_draws.max() if k_secondary else np.nan
        row[_SSUM] = secondary_loss
    return rows


def _simulate_chunk(args: tuple[RiskScenario, int, int, int]) -> np.ndarray:
    return _simulate_range(*args)


def _bucket_summary(rows: np.ndarray, k_col: int, cols: tuple[int, int, int]) -> BucketSummary:
    counts = rows[:, k_col]
    events = RangeSummary(
        min=float(counts.min()), avg=float(counts.mean()), max=float(counts.max())
    )
    total_events = counts.sum()
    if total_events == 0:
        magnitude = RangeSummary(0.0, 0.0, 0.0)
    else:
        mn, mx, sm = cols
        magnitude = RangeSummary(
            min=float(np.nanmin(rows[:, mn])),
            avg=float(rows[:, sm].sum() / total_events),
            max=float(np.nanmax(rows[:, mx])),
        )
    return BucketSummary(loss_events_per_year=events, loss_magnitude=magnitude)


def run_scenario(
    scenario: RiskScenario, iterations: int, seed: int, workers: int = 1
) -> SimulationResult:
    """Simulate annualized losses; bit-reproducible for a fixed seed.

    ``workers`` only splits the iteration range across processes; the output
    is identical for any worker count.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    _check_seed(seed)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    workers = min(workers, iterations)
    if workers == 1:
        rows = _simulate_range(scenario, seed, 0, iterations)
    else:
        bounds = np.linspace(0, iterations, workers + 1).astype(int)
        chunks = [
            (scenario, seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = np.vstack(list(pool.map(_simulate_chunk, chunks)))

    return SimulationResult(
        iterations=iterations,
        annualized_losses=rows[:, _LOSS].copy(),
        primary_summary=_bucket_summary(rows, _KP, (_PMIN, _PMAX, _PSUM)),
        secondary_summary=_bucket_summary(rows, _KS, (_SMIN, _SMAX, _SSUM)),
        seed=seed,
    )


def loss_exceedance(
    result: SimulationResult, thresholds: Sequence[float] | None = None
) -> LossExceedanceCurve:
    """P(loss >= x) per threshold; defaults to 50 evenly spaced quantiles."""
    return exceedance_from_losses(result.annualized_losses, thresholds)


def exceedance_from_losses(
    losses: Sequence[float], thresholds: Sequence[float] | None = None
) -> LossExceedanceCurve:
    losses = np.asarray(losses, dtype=float)
    if losses.size == 0:
        raise ValueError("simulation produced no iterations")
    if thresholds is None:
        ordered = np.sort(losses)
        candidates = [quantile_linear(ordered, lvl) for lvl in np.linspace(0.0, 1.0, 50)]
        thresholds = []
        for t in candidates:
            if not thresholds or t > thresholds[-1]:
                thresholds.append(t)
    else:
        thresholds = [float(t) for t in thresholds]
    points = tuple((t, float(np.mean(losses >= t))) for t in thresholds)
    return LossExceedanceCurve(points=points)


def pdvar_from_losses(
    result: SimulationResult, confidence: float, timeframe: str = "next year"
) -> PdVaRStatement:
    """Central interval of positive losses at the given confidence.

    Conditions on loss > 0: the statement describes the sanction amount
    given that a loss event happens at all.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0,1), got {confidence}")
    positive = np.sort(result.annualized_losses[result.annualized_losses > 0])
    if positive.size == 0:
        raise ValueError("no loss events simulated")
    tail = (1.0 - confidence) / 2.0
    lower = quantile_linear(positive, tail)
    upper = quantile_linear(positive, 1.0 - tail)
    return PdVaRStatement(
        confidence=confidence,
        lower=lower,
        upper=upper,
        timeframe=timeframe,
        rendered=report.render_template(confidence, lower, upper, timeframe),
    )


def compose_calibrated_pdvar(
    jurimetrical: ConformalInterval | Sequence[HistoricalVaR],
    scenario: RiskScenario,
    iterations: int,
    seed: int,
    workers: int = 1,
) -> SimulationResult:
    """Merge a historical fine envelope into the scenario's loss magnitude.

    With ``fine_role="primary_loss"`` the primary magnitude is replaced by
    PERT(lower, midpoint, upper) built from the jurimetrical interval;
    otherwise the scenario runs untouched and the interval is ignored with
    a warning.
    """
    if scenario.fine_role != "primary_loss":
        warnings.warn(
            "fine_role is 'secondary_loss'; jurimetrical interval ignored",
            stacklevel=2,
        )
        return run_scenario(scenario, iterations, seed, workers)

    lower, upper, source = _interval_bounds(jurimetrical)
    if lower == 0.0 and upper == 0.0:
        raise ValueError("jurimetrical interval is [0, 0]; nothing to calibrate against")
    envelope = PertParams(min=lower, mode=(lower + upper) / 2.0, max=upper)
    calibrated = replace(scenario, primary_magnitude=envelope)
    result = run_scenario(calibrated, iterations, seed, workers)
    return replace(result, magnitude_source=source)


def _interval_bounds(
    jurimetrical: ConformalInterval | Sequence[HistoricalVaR],
) -> tuple[float, float, str]:
    if isinstance(jurimetrical, ConformalInterval):
        return (
            jurimetrical.lower,
            jurimetrical.upper,
            f"conformal[{jurimetrical.lower:.2f}, {jurimetrical.upper:.2f}]",
        )
    pair = list(jurimetrical)
    if len(pair) != 2 or not all(isinstance(v, HistoricalVaR) for v in pair):
        raise ValueError("expected a ConformalInterval or a pair of HistoricalVaR")
    lo, hi = sorted(float(v.value) for v in pair)
    return lo, hi, f"historical_var[{lo:.2f}, {hi:.2f}]"


def load_scenario(source: str | dict) -> RiskScenario:
    """Build a scenario from its JSON document (text or parsed dict)."""
    data = json.loads(source) if isinstance(source, str) else source
    if not isinstance(data, dict):
        raise ValueError("scenario document must be a JSON object")
    for key in ("tef", "tcap", "rs", "primary_magnitude", "slef", "secondary_magnitude"):
        if key not in data:
            raise ValueError(f"scenario is missing field {key!r}")
    return RiskScenario(
        tef=PertParams.from_json_dict(data["tef"], "tef"),
        tcap=PertParams.from_json_dict(data["tcap"], "tcap"),
        rs=PertParams.from_json_dict(data["rs"], "rs"),
        primary_magnitude=PertParams.from_json_dict(
            data["primary_magnitude"], "primary_magnitude"
        ),
        slef=float(data["slef"]),
        secondary_magnitude=PertParams.from_json_dict(
            data["secondary_magnitude"], "secondary_magnitude"
        ),
        fine_role=data.get("fine_role", "secondary_loss"),
    )
