"""Distribution-free prediction intervals over fine amounts.

Two regimes: transductive conformal prediction for scarce corpora (a handful
of comparable precedents, no features) and inductive/split conformal for
larger samples where a calibration set can be spared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .calibration import lens_fit

# Guards against float dust when alpha*(n+1) lands on an integer.
_INDEX_TOLERANCE = 1e-9

Predictor = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ConformalInterval:
    """A prediction interval plus the precedent partition that produced it."""

    lower: float
    upper: float
    nominal_confidence: float
    method: str  # "transductive" | "inductive"
    retained: tuple[int, ...] = ()
    excluded: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")
        if self.method not in ("transductive", "inductive"):
            raise ValueError(f"unknown method {self.method!r}")
        if set(self.retained) & set(self.excluded):
            raise ValueError("retained and excluded overlap")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_json_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "confidence": self.nominal_confidence,
            "method": self.method,
            "excluded_ids": list(self.excluded),
        }


@dataclass(frozen=True)
class SplitConfig:
    """Fractions of a sample going to training and calibration; rest is test."""

    train_fraction: float = 0.5
    calibration_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("train_fraction", "calibration_fraction"):
            f = getattr(self, name)
            if not 0.0 < f < 1.0:
                raise ValueError(f"{name} must be in (0,1), got {f}")
        if self.train_fraction + self.calibration_fraction > 1.0:
            raise ValueError("train and calibration fractions exceed the sample")

    def split_indices(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        order = rng.permutation(n)
        n_train = int(round(self.train_fraction * n))
        n_calib = int(round(self.calibration_fraction * n))
        return (
            order[:n_train],
            order[n_train : n_train + n_calib],
            order[n_train + n_calib :],
        )


def transductive_exclusion_count(n: int, alpha: float) -> int:
    """floor(alpha * (n + 1)), the number of least-conforming points dropped."""
    return math.floor(alpha * (n + 1) + _INDEX_TOLERANCE)


def transductive_interval(amounts: Sequence[float], alpha: float) -> ConformalInterval:
    """Interval spanning the precedents that conform with the rest.

    Nonconformity of each point is its absolute deviation from the mean of
    the other points; the floor(alpha*(n+1)) least conforming are excluded.
    Points tied at the exclusion boundary are all retained, so with ties the
    excluded count can fall short of the nominal one.
    """
    values = [float(a) for a in amounts]
    n = len(values)
    if n < 2:
        raise ValueError(f"need at least 2 amounts, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")

    total = sum(values)
    scores = [abs(v - (total - v) / (n - 1)) for v in values]

    k = transductive_exclusion_count(n, alpha)
    if k >= n:
        raise ValueError(
            f"alpha={alpha} would exclude all {n} precedents; lower alpha or add data"
        )
    if k == 0:
        excluded: tuple[int, ...] = ()
    else:
        # Exclude scores strictly above the (k+1)-th largest; boundary ties stay.
        cutoff = sorted(scores, reverse=True)[k]
        excluded = tuple(i for i, s in enumerate(scores) if s > cutoff)
    retained = tuple(i for i in range(n) if i not in set(excluded))
    kept_values = [values[i] for i in retained]
    return ConformalInterval(
        lower=min(kept_values),
        upper=max(kept_values),
        nominal_confidence=1.0 - alpha,
        method="transductive",
        retained=retained,
        excluded=excluded,
    )


def minimum_calibration_size(alpha: float) -> int:
    """Smallest m with ceil((m+1)(1-alpha)) <= m."""
    m = 1
    while math.ceil((m + 1) * (1.0 - alpha) - _INDEX_TOLERANCE) > m:
        m += 1
    return m


def split_conformal(
    train: tuple[np.ndarray, np.ndarray],
    calibration: tuple[np.ndarray, np.ndarray],
    predict_points: np.ndarray,
    alpha: float,
    predictor: Predictor,
) -> list[ConformalInterval]:
    """Symmetric intervals around point predictions, one shared width.

    ``predictor`` must already be fitted on the training split only. The
    width is the ceil((m+1)(1-alpha))-th smallest absolute calibration
    residual, which carries the finite-sample coverage guarantee.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    calib_x, calib_y = (np.asarray(a, dtype=float) for a in calibration)
    m = len(calib_y)
    if m < 1:
        raise ValueError("calibration set is empty")
    rank = math.ceil((m + 1) * (1.0 - alpha) - _INDEX_TOLERANCE)
    if rank > m:
        raise ValueError(
            f"calibration set of {m} too small for alpha={alpha}; "
            f"need at least m={minimum_calibration_size(alpha)}"
        )
    scores = np.sort(np.abs(calib_y - np.asarray(predictor(calib_x), dtype=float)))
    width = float(scores[rank - 1])

    predictions = np.asarray(predictor(np.asarray(predict_points, dtype=float)), dtype=float)
    return [
        ConformalInterval(
            lower=float(y_hat - width),
            upper=float(y_hat + width),
            nominal_confidence=1.0 - alpha,
            method="inductive",
        )
        for y_hat in np.atleast_1d(predictions)
    ]


def empirical_coverage(
    intervals: Sequence[ConformalInterval], truths: Sequence[float]
) -> float:
    """Fraction of truths inside their interval, bounds inclusive."""
    if len(intervals) != len(truths):
        raise ValueError(
            f"{len(intervals)} intervals but {len(truths)} truths"
        )
    if not intervals:
        raise ValueError("empty coverage sample")
    hits = sum(1 for iv, y in zip(intervals, truths) if iv.contains(float(y)))
    return hits / len(truths)


def fit_mean_predictor(train_y: np.ndarray) -> Predictor:
    """Featureless baseline: predicts the training mean everywhere."""
    mean = float(np.mean(np.asarray(train_y, dtype=float)))

    def predict(x: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_1d(np.asarray(x)).shape[0], mean)

    return predict


def fit_linear_predictor(train_x: np.ndarray, train_y: np.ndarray) -> Predictor:
    """One-feature least-squares line, backed by the lens-model solver."""
    x = np.asarray(train_x, dtype=float).reshape(-1)
    model = lens_fit(x[:, None], np.asarray(train_y, dtype=float))

    def predict(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1)
        return model.predict(pts[:, None])

    return predict
