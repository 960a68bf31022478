"""Expert-opinion aggregation: Delphi rounds, lens regression, noise index."""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass

import numpy as np

DEFAULT_SCALE = (1.0, 5.0)
DEFAULT_CONVERGENCE_EPSILON = 0.25  # one quarter step on the 1-5 scale

ESTIMATES_CSV_COLUMNS = ("expert_id", "round", "factor", "scenario_id", "weight")


@dataclass(frozen=True)
class ExpertEstimate:
    """One expert's weight for one factor in one scenario and round."""

    expert_id: str
    round: int
    factor: str
    scenario_id: str
    weight: float
    scale: tuple[float, float] = DEFAULT_SCALE

    def __post_init__(self) -> None:
        if self.round < 1:
            raise ValueError(f"round must be >= 1, got {self.round}")
        lo, hi = self.scale
        if not lo <= self.weight <= hi:
            raise ValueError(f"weight {self.weight} outside scale [{lo}, {hi}]")


@dataclass(frozen=True)
class RoundConsensus:
    """Per-scenario mean/median for one round, plus the round-wide pool."""

    round: int
    scenario_mean: dict[str, float]
    scenario_median: dict[str, float]
    pooled_mean: float
    pooled_median: float


@dataclass(frozen=True)
class DelphiReport:
    rounds: tuple[RoundConsensus, ...]
    converged: bool
    final_shift: float

    def to_json_dict(self) -> dict:
        return {
            "rounds": [
                {
                    "round": r.round,
                    "scenario_mean": r.scenario_mean,
                    "scenario_median": r.scenario_median,
                    "pooled_mean": r.pooled_mean,
                    "pooled_median": r.pooled_median,
                }
                for r in self.rounds
            ],
            "converged": self.converged,
            "final_shift": self.final_shift,
        }


@dataclass(frozen=True)
class LensModel:
    """Ordinary-least-squares read of how factor weights drive expert scores."""

    coefficients: tuple[float, ...]
    intercept: float
    residuals: tuple[float, ...]
    r_squared: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise ValueError(f"r_squared out of [0,1]: {self.r_squared}")

    def predict(self, observations: np.ndarray) -> np.ndarray:
        x = np.asarray(observations, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return x @ np.asarray(self.coefficients) + self.intercept

    def to_json_dict(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_observations": len(self.residuals),
        }


@dataclass(frozen=True)
class NoiseReport:
    per_scenario_dispersion: dict[str, float]
    noise_index: float

    def to_json_dict(self) -> dict:
        return {
            "per_scenario_dispersion": self.per_scenario_dispersion,
            "noise_index": self.noise_index,
        }


def delphi_aggregate(
    estimates: list[ExpertEstimate],
    rounds: int,
    epsilon: float = DEFAULT_CONVERGENCE_EPSILON,
) -> DelphiReport:
    """Anonymous per-round consensus with an inter-round convergence flag.

    Convergence holds when the largest per-scenario shift of the mean between
    the last two rounds is below ``epsilon``; a single round is trivially
    converged.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not estimates:
        raise ValueError("no estimates supplied")
    by_round: dict[int, list[ExpertEstimate]] = {}
    for est in estimates:
        by_round.setdefault(est.round, []).append(est)
    present = sorted(by_round)
    if present[-1] > rounds:
        raise ValueError(f"estimate references round {present[-1]} beyond rounds={rounds}")
    for k in range(1, rounds + 1):
        if k not in by_round:
            raise ValueError(f"round {k} has no estimates (rounds must be gapless)")

    consensus: list[RoundConsensus] = []
    for k in range(1, rounds + 1):
        weights_by_scenario: dict[str, list[float]] = {}
        for est in by_round[k]:
            weights_by_scenario.setdefault(est.scenario_id, []).append(est.weight)
        pooled = [est.weight for est in by_round[k]]
        consensus.append(
            RoundConsensus(
                round=k,
                scenario_mean={s: statistics.fmean(w) for s, w in weights_by_scenario.items()},
                scenario_median={s: statistics.median(w) for s, w in weights_by_scenario.items()},
                pooled_mean=statistics.fmean(pooled),
                pooled_median=statistics.median(pooled),
            )
        )

    if rounds == 1:
        return DelphiReport(rounds=tuple(consensus), converged=True, final_shift=0.0)

    last, prev = consensus[-1], consensus[-2]
    shared = set(last.scenario_mean) & set(prev.scenario_mean)
    if shared:
        shift = max(abs(last.scenario_mean[s] - prev.scenario_mean[s]) for s in shared)
    else:
        shift = abs(last.pooled_mean - prev.pooled_mean)
    return DelphiReport(rounds=tuple(consensus), converged=shift < epsilon, final_shift=shift)


def lens_fit(observations: np.ndarray, targets: np.ndarray) -> LensModel:
    """OLS fit of expert scores on factor weights, with intercept.

    Raises on rank-deficient designs, naming the factor columns that add no
    independent information.
    """
    x = np.asarray(observations, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n_obs, n_factors = x.shape
    if y.shape != (n_obs,):
        raise ValueError(f"targets shape {y.shape} does not match {n_obs} observations")
    if n_obs < n_factors + 1:
        raise ValueError(f"need at least {n_factors + 1} observations, got {n_obs}")

    design = np.column_stack([np.ones(n_obs), x])
    rank = np.linalg.matrix_rank(design)
    if rank < design.shape[1]:
        collinear = _dependent_columns(design)
        raise ValueError(
            "design matrix is rank-deficient; collinear factor columns: "
            f"{sorted(collinear)}"
        )

    beta, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ beta
    residuals = y - fitted
    ss_res = float(residuals @ residuals)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 0.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return LensModel(
        coefficients=tuple(float(b) for b in beta[1:]),
        intercept=float(beta[0]),
        residuals=tuple(float(r) for r in residuals),
        r_squared=r_squared,
    )


def _dependent_columns(design: np.ndarray) -> list[int]:
    """Factor columns (0-based) that are linear combinations of earlier ones."""
    dependent = []
    rank_so_far = 0
    for j in range(design.shape[1]):
        rank_j = np.linalg.matrix_rank(design[:, : j + 1])
        if rank_j == rank_so_far and j > 0:
            dependent.append(j - 1)  # report without the intercept column
        rank_so_far = rank_j
    return dependent


def noise_report(estimates: list[ExpertEstimate]) -> NoiseReport:
    """Inter-expert dispersion per scenario and the scale-free noise index.

    Dispersion is the n-1 standard deviation of expert weights; the index is
    the mean dispersion divided by the mean of all weights.
    """
    by_scenario: dict[str, list[float]] = {}
    for est in estimates:
        by_scenario.setdefault(est.scenario_id, []).append(est.weight)
    dispersions = {
        s: statistics.stdev(w) for s, w in by_scenario.items() if len(w) >= 2
    }
    if not dispersions:
        raise ValueError("no scenario has estimates from two or more experts")
    mean_weight = statistics.fmean(est.weight for est in estimates)
    mean_dispersion = statistics.fmean(dispersions.values())
    return NoiseReport(
        per_scenario_dispersion=dispersions,
        noise_index=mean_dispersion / mean_weight if mean_weight != 0 else float("inf"),
    )


def parse_estimates_csv(source: str | io.TextIOBase) -> list[ExpertEstimate]:
    """Read estimates from the ``expert_id,round,factor,scenario_id,weight`` schema."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != ESTIMATES_CSV_COLUMNS:
        raise ValueError(f"expected header {','.join(ESTIMATES_CSV_COLUMNS)}")
    estimates = []
    for row_no, row in enumerate(reader, start=1):
        if not row or all(c.strip() == "" for c in row):
            continue
        if len(row) != 5:
            raise ValueError(f"row {row_no}: expected 5 cells, got {len(row)}")
        expert_id, rnd, factor, scenario_id, weight = (c.strip() for c in row)
        try:
            estimates.append(
                ExpertEstimate(
                    expert_id=expert_id,
                    round=int(rnd),
                    factor=factor,
                    scenario_id=scenario_id,
                    weight=float(weight),
                )
            )
        except ValueError as exc:
            raise ValueError(f"row {row_no}: {exc}") from None
    return estimates
