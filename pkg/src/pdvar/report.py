"""Statement rendering, run manifests, and machine-readable plot data."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Sequence

import numpy as np

ENGINE_VERSION = "0.1.0"

STATEMENT_RANGE = (
    "If an administrative fine (if controlled) happens {timeframe}, there is a "
    "{confidence}% chance that the sanctioning amount will be between "
    "€{lower} and €{upper}"
)
STATEMENT_EXACT = (
    "If an administrative fine (if controlled) happens {timeframe}, there is a "
    "{confidence}% chance that the sanctioning amount will be exactly €{amount}"
)


def format_money(value, grouping: bool = True) -> str:
    """EUR amount rounded to cents; thousands separated by spaces."""
    amount = value if isinstance(value, Decimal) else Decimal(repr(float(value)))
    cents = amount.quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN)
    sign = "-" if cents < 0 else ""
    cents = abs(cents)
    whole = int(cents)
    frac = (cents - whole) * 100
    digits = f"{whole:,}".replace(",", " ") if grouping else str(whole)
    if frac == 0:
        return sign + digits
    return f"{sign}{digits}.{int(frac):02d}"


def format_percent(confidence: float) -> str:
    pct = confidence * 100.0
    if abs(pct - round(pct)) < 1e-9:
        return str(int(round(pct)))
    return f"{pct:.4f}".rstrip("0").rstrip(".")


def render_template(
    confidence: float,
    lower,
    upper,
    timeframe: str,
    locale_grouping: bool = True,
) -> str:
    """Fill the Pd-VaR sentence; a degenerate range collapses to 'exactly'."""
    lo = format_money(lower, locale_grouping)
    hi = format_money(upper, locale_grouping)
    pct = format_percent(confidence)
    if lo == hi:
        return STATEMENT_EXACT.format(timeframe=timeframe, confidence=pct, amount=lo)
    return STATEMENT_RANGE.format(
        timeframe=timeframe, confidence=pct, lower=lo, upper=hi
    )


def render_statement(statement, locale_grouping: bool = True) -> str:
    """Render any object with confidence/lower/upper/timeframe fields."""
    return render_template(
        statement.confidence,
        statement.lower,
        statement.upper,
        statement.timeframe,
        locale_grouping,
    )


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written beside every emitted file."""

    subcommand: str
    inputs: tuple[str, ...]
    parameters: dict
    seed: int | None
    engine_version: str = ENGINE_VERSION
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def to_json(self) -> str:
        return json.dumps(
            {
                "subcommand": self.subcommand,
                "inputs": list(self.inputs),
                "parameters": self.parameters,
                "seed": self.seed,
                "engine_version": self.engine_version,
                "timestamp": self.timestamp,
            },
            indent=2,
            sort_keys=True,
        )

    def write_beside(self, out_path: Path) -> Path:
        """Write `<out>.manifest.json`; the data file itself stays deterministic."""
        manifest_path = Path(str(out_path) + ".manifest.json")
        manifest_path.write_text(self.to_json() + "\n", encoding="utf-8")
        return manifest_path


def histogram_rows(
    values: Sequence[float], bins: int = 50
) -> list[tuple[float, float, int]]:
    """(bin_lower, bin_upper, count) rows; counts sum to len(values)."""
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        raise ValueError("cannot histogram an empty sample")
    counts, edges = np.histogram(data, bins=bins)
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(len(counts))
    ]


def histogram_csv(values: Sequence[float], bins: int = 50) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bin_lower", "bin_upper", "count"])
    for lo, hi, count in histogram_rows(values, bins):
        writer.writerow([repr(lo), repr(hi), count])
    return out.getvalue()


def lec_csv(points: Sequence[tuple[float, float]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["threshold", "probability"])
    for threshold, probability in points:
        writer.writerow([repr(float(threshold)), repr(float(probability))])
    return out.getvalue()


def losses_csv(losses: Sequence[float]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["iteration", "annualized_loss"])
    for i, loss in enumerate(losses):
        writer.writerow([i, repr(float(loss))])
    return out.getvalue()


def svg_polyline(
    points: Sequence[tuple[float, float]],
    width: int = 640,
    height: int = 400,
    margin: int = 40,
) -> str:
    """Dependency-free polyline chart of (x, y) points."""
    if not points:
        raise ValueError("cannot plot an empty curve")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = x_hi - x_lo or 1.0
    y_span = y_hi - y_lo or 1.0

    def sx(x: float) -> float:
        return margin + (x - x_lo) / x_span * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / y_span * (height - 2 * margin)

    path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'  <rect width="{width}" height="{height}" fill="white"/>\n'
        f'  <polyline points="{path}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        f'  <line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="gray"/>\n'
        f'  <line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="gray"/>\n'
        f"</svg>\n"
    )
