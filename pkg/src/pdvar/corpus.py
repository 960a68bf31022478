"""Administrative-fines corpus: records, validation, filtering, CSV/JSON I/O.

All money is kept as exact :class:`~decimal.Decimal` EUR amounts with at most
two fractional digits. Corpora are immutable after parsing and safe to share
across threads.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from typing import Iterator

KNOWN_COUNTRIES = frozenset({"FR", "UK", "ES", "IE"})

SECURITY_PRINCIPLES = frozenset(
    {"confidentiality", "integrity", "availability", "none"}
)

# Canonical column order; parse/serialize round-trip is defined on this schema.
CSV_COLUMNS = (
    "id",
    "date",
    "year",
    "country",
    "controller",
    "fine_eur",
    "turnover_eur",
    "article",
    "security_principle",
    "records_affected",
    "cause",
)

_DATE_RE = re.compile(r"^(\d{4})-(0[1-9]|1[0-2])$")
_COUNTRY_RE = re.compile(r"^[A-Z]{2,3}$")


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus data.

    ``row`` is the 1-based data-row number (header excluded) and ``column``
    the offending field, when known.
    """

    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        ctx = ""
        if row is not None:
            ctx += f" (row {row}"
            ctx += f", field '{column}')" if column else ")"
        elif column:
            ctx += f" (field '{column}')"
        super().__init__(message + ctx)
        self.message = message
        self.row = row
        self.column = column


def _parse_money(text: str, column: str, row: int | None = None) -> Decimal:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise CorpusError(f"not a decimal amount: {text!r}", row=row, column=column) from None
    if not value.is_finite():
        raise CorpusError(f"non-finite amount: {text!r}", row=row, column=column)
    if -value.as_tuple().exponent > 2:
        raise CorpusError(
            f"amount {text!r} has more than two fractional digits", row=row, column=column
        )
    return value


@dataclass(frozen=True)
class FineRecord:
    """One administrative fine issued by a data protection authority."""

    id: str
    date: str  # YYYY-MM
    year: int
    country: str  # FR / UK / ES / IE or another uppercase code
    controller: str
    fine: Decimal  # EUR, >= 0
    turnover: Decimal | None = None  # annual turnover of the undertaking, EUR
    article: str | None = None  # GDPR article tag, e.g. "83(5)" or "32"
    security_principle: str | None = None
    records_affected: int | None = None
    cause: str | None = None

    def __post_init__(self) -> None:
        # Empty optional strings mean "absent": the CSV schema cannot tell
        # them apart, and round-tripping must be exact.
        for name in ("article", "security_principle", "cause"):
            if getattr(self, name) == "":
                object.__setattr__(self, name, None)
        if not self.id:
            raise CorpusError("record id must be non-empty", column="id")
        m = _DATE_RE.match(self.date)
        if m is None:
            raise CorpusError(f"date {self.date!r} is not YYYY-MM", column="date")
        if int(m.group(1)) != self.year:
            raise CorpusError(
                f"year {self.year} does not match date {self.date!r}", column="year"
            )
        if not _COUNTRY_RE.match(self.country):
            raise CorpusError(f"country code {self.country!r} is invalid", column="country")
        if self.fine < 0:
            raise CorpusError(f"fine must be non-negative, got {self.fine}", column="fine_eur")
        if self.turnover is not None and self.turnover <= 0:
            raise CorpusError(
                f"turnover must be positive when present, got {self.turnover}",
                column="turnover_eur",
            )
        if (
            self.security_principle is not None
            and self.security_principle not in SECURITY_PRINCIPLES
        ):
            raise CorpusError(
                f"unknown security principle {self.security_principle!r}",
                column="security_principle",
            )
        if self.records_affected is not None and self.records_affected < 0:
            raise CorpusError(
                "records_affected must be non-negative", column="records_affected"
            )


@dataclass(frozen=True)
class FineCorpus:
    """An ordered, id-unique collection of fine records."""

    records: tuple[FineRecord, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise CorpusError(f"duplicate record id {rec.id!r}", column="id")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[FineRecord]:
        return iter(self.records)

    def fines(self) -> list[Decimal]:
        return [rec.fine for rec in self.records]


@dataclass(frozen=True)
class CorpusQuery:
    """Conjunction of optional predicates over a corpus.

    Absent predicates match everything; turnover predicates never match a
    record with no recorded turnover.
    """

    countries: frozenset[str] | None = None
    turnover_range: tuple[Decimal, Decimal] | None = None
    articles: frozenset[str] | None = None
    year_range: tuple[int, int] | None = None
    security_principles: frozenset[str] | None = None

    def __post_init__(self) -> None:
        for name in ("turnover_range", "year_range"):
            rng = getattr(self, name)
            if rng is not None and rng[0] > rng[1]:
                raise CorpusError(f"{name} has min > max: {rng}", column=name)
        # Normalize plain iterables into frozensets so queries stay hashable.
        for name in ("countries", "articles", "security_principles"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))

    def matches(self, rec: FineRecord) -> bool:
        if self.countries is not None and rec.country not in self.countries:
            return False
        if self.turnover_range is not None:
            if rec.turnover is None:
                return False
            lo, hi = self.turnover_range
            if not lo <= rec.turnover <= hi:
                return False
        if self.articles is not None and rec.article not in self.articles:
            return False
        if self.year_range is not None:
            lo_y, hi_y = self.year_range
            if not lo_y <= rec.year <= hi_y:
                return False
        if (
            self.security_principles is not None
            and rec.security_principle not in self.security_principles
        ):
            return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "countries": sorted(self.countries) if self.countries is not None else None,
            "turnover_range": [str(v) for v in self.turnover_range]
            if self.turnover_range is not None
            else None,
            "articles": sorted(self.articles) if self.articles is not None else None,
            "year_range": list(self.year_range) if self.year_range is not None else None,
            "security_principles": sorted(self.security_principles)
            if self.security_principles is not None
            else None,
        }


def parse_corpus(source: str | io.TextIOBase, provenance: str = "") -> FineCorpus:
    """Parse the canonical CSV schema into a corpus.

    Raises :class:`CorpusError` carrying the 1-based data-row number and the
    offending field for malformed rows, duplicate ids, or invalid amounts.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusError("input is empty, expected a header row") from None
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise CorpusError(
            f"unexpected header {header!r}, expected {','.join(CSV_COLUMNS)}"
        )

    records: list[FineRecord] = []
    seen_ids: set[str] = set()
    for row_no, row in enumerate(reader, start=1):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != len(CSV_COLUMNS):
            raise CorpusError(
                f"expected {len(CSV_COLUMNS)} cells, got {len(row)}", row=row_no
            )
        cells = dict(zip(CSV_COLUMNS, (cell.strip() for cell in row)))
        try:
            year = _parse_int(cells["year"], "year", row_no)
            fine = _parse_money(cells["fine_eur"], "fine_eur", row_no)
            turnover = (
                _parse_money(cells["turnover_eur"], "turnover_eur", row_no)
                if cells["turnover_eur"]
                else None
            )
            records_affected = (
                _parse_int(cells["records_affected"], "records_affected", row_no)
                if cells["records_affected"]
                else None
            )
            record = FineRecord(
                id=cells["id"],
                date=cells["date"],
                year=year,
                country=cells["country"],
                controller=cells["controller"],
                fine=fine,
                turnover=turnover,
                article=cells["article"] or None,
                security_principle=cells["security_principle"] or None,
                records_affected=records_affected,
                cause=cells["cause"] or None,
            )
        except CorpusError as exc:
            if exc.row is None:
                raise CorpusError(exc.message, row=row_no, column=exc.column) from None
            raise
        if record.id in seen_ids:
            raise CorpusError(f"duplicate record id {record.id!r}", row=row_no, column="id")
        seen_ids.add(record.id)
        records.append(record)

    return FineCorpus(records=tuple(records), provenance=provenance)


def _parse_int(text: str, column: str, row: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise CorpusError(f"not an integer: {text!r}", row=row, column=column) from None


def serialize_corpus(corpus: FineCorpus) -> str:
    """Render a corpus back to the canonical CSV schema.

    parse_corpus(serialize_corpus(c)) reproduces ``c`` record for record.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in corpus:
        writer.writerow(
            [
                rec.id,
                rec.date,
                rec.year,
                rec.country,
                rec.controller,
                str(rec.fine),
                "" if rec.turnover is None else str(rec.turnover),
                rec.article or "",
                rec.security_principle or "",
                "" if rec.records_affected is None else rec.records_affected,
                rec.cause or "",
            ]
        )
    return out.getvalue()


def filter_corpus(corpus: FineCorpus, query: CorpusQuery) -> FineCorpus:
    """Records satisfying every present predicate, order preserved."""
    return replace(
        corpus, records=tuple(rec for rec in corpus if query.matches(rec))
    )


def corpus_to_json(corpus: FineCorpus) -> str:
    """Corpus as a JSON array of records with the canonical field names."""
    rows = []
    for rec in corpus:
        rows.append(
            {
                "id": rec.id,
                "date": rec.date,
                "year": rec.year,
                "country": rec.country,
                "controller": rec.controller,
                "fine_eur": float(rec.fine),
                "turnover_eur": None if rec.turnover is None else float(rec.turnover),
                "article": rec.article,
                "security_principle": rec.security_principle,
                "records_affected": rec.records_affected,
                "cause": rec.cause,
            }
        )
    return json.dumps(rows, indent=2, sort_keys=False)
