from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdvar.corpus import (
    CorpusError,
    CorpusQuery,
    FineCorpus,
    FineRecord,
    corpus_to_json,
    filter_corpus,
    parse_corpus,
    serialize_corpus,
)

HEADER = "id,date,year,country,controller,fine_eur,turnover_eur,article,security_principle,records_affected,cause\n"

FRANCE_ONLY_CSV = HEADER + (
    "1,2019-05,2019,FR,Sergic_SAS,400000.00,,,,,\n"
    "2,2019-11,2019,FR,Futura_International,500000.00,,,,,\n"
    "47,2021-07,2021,FR,AG2R_La_Mondiale,1750000.00,,,,,\n"
    "55,2022-04,2022,FR,Dedalus Biologie,1500000.00,,,,,\n"
    "61,2023-05,2023,FR,Doctissimo,380000.00,,,,,\n"
)


def test_parse_france_fixture():
    corpus = parse_corpus(FRANCE_ONLY_CSV)
    assert len(corpus) == 5
    assert all(rec.country == "FR" for rec in corpus)
    assert corpus.fines() == [
        Decimal("400000.00"),
        Decimal("500000.00"),
        Decimal("1750000.00"),
        Decimal("1500000.00"),
        Decimal("380000.00"),
    ]


def test_parse_header_only():
    corpus = parse_corpus(HEADER)
    assert len(corpus) == 0


def test_parse_negative_fine_names_row_and_field():
    text = HEADER + "1,2019-05,2019,FR,A,-5,,,,,\n"
    with pytest.raises(CorpusError) as err:
        parse_corpus(text)
    assert err.value.row == 1
    assert err.value.column == "fine_eur"


def test_parse_duplicate_id():
    text = HEADER + "1,2019-05,2019,FR,A,10,,,,,\n1,2020-01,2020,FR,B,20,,,,,\n"
    with pytest.raises(CorpusError, match="duplicate"):
        parse_corpus(text)


def test_parse_year_date_mismatch():
    text = HEADER + "1,2019-05,2020,FR,A,10,,,,,\n"
    with pytest.raises(CorpusError, match="does not match date"):
        parse_corpus(text)


def test_parse_bad_cell_count():
    text = HEADER + "1,2019-05,2019,FR\n"
    with pytest.raises(CorpusError, match="cells"):
        parse_corpus(text)


def test_parse_rejects_sub_cent_precision():
    text = HEADER + "1,2019-05,2019,FR,A,10.123,,,,,\n"
    with pytest.raises(CorpusError, match="fractional"):
        parse_corpus(text)


def test_parse_rejects_nonpositive_turnover():
    text = HEADER + "1,2019-05,2019,FR,A,10,0,,,,\n"
    with pytest.raises(CorpusError, match="turnover"):
        parse_corpus(text)


def test_parse_rejects_unknown_security_principle():
    text = HEADER + "1,2019-05,2019,FR,A,10,,,secrecy,,\n"
    with pytest.raises(CorpusError, match="security principle"):
        parse_corpus(text)


def test_filter_ireland(fixture_corpus):
    got = filter_corpus(fixture_corpus, CorpusQuery(countries=frozenset({"IE"})))
    assert len(got) == 3
    assert got.fines() == [Decimal("100000.00"), Decimal("15000.00"), Decimal("90000.00")]


def test_filter_empty_query_is_identity(fixture_corpus):
    assert filter_corpus(fixture_corpus, CorpusQuery()) == fixture_corpus


def test_filter_turnover_band_excludes_missing_turnover(fixture_corpus):
    query = CorpusQuery(turnover_range=(Decimal(10_000_000), Decimal(100_000_000)))
    assert len(filter_corpus(fixture_corpus, query)) == 0


def test_filter_year_and_article():
    text = HEADER + (
        "1,2019-05,2019,FR,A,10,,83(5),,,\n"
        "2,2021-05,2021,FR,B,20,,32,confidentiality,100,hacking\n"
    )
    corpus = parse_corpus(text)
    assert len(filter_corpus(corpus, CorpusQuery(year_range=(2020, 2022)))) == 1
    assert len(filter_corpus(corpus, CorpusQuery(articles=frozenset({"83(5)"})))) == 1
    assert (
        len(filter_corpus(corpus, CorpusQuery(security_principles=frozenset({"confidentiality"}))))
        == 1
    )


def test_query_range_validation():
    with pytest.raises(CorpusError, match="min > max"):
        CorpusQuery(year_range=(2022, 2020))
    with pytest.raises(CorpusError, match="min > max"):
        CorpusQuery(turnover_range=(Decimal(5), Decimal(1)))


def test_json_export_field_names(fixture_corpus):
    import json

    rows = json.loads(corpus_to_json(fixture_corpus))
    assert len(rows) == 11
    assert set(rows[0]) == {
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
    }
    assert rows[0]["fine_eur"] == 400000.0


# --- property tests -------------------------------------------------------

_money = st.decimals(
    min_value=Decimal("0.00"), max_value=Decimal("99999999.99"), places=2
)
_country = st.sampled_from(["FR", "UK", "ES", "IE", "DE", "LT"])


@st.composite
def corpora(draw):
    n = draw(st.integers(min_value=0, max_value=8))
    records = []
    for i in range(n):
        year = draw(st.integers(min_value=2018, max_value=2024))
        month = draw(st.integers(min_value=1, max_value=12))
        records.append(
            FineRecord(
                id=f"r{i}",
                date=f"{year}-{month:02d}",
                year=year,
                country=draw(_country),
                controller=draw(st.text(st.characters(categories=["L", "N"]), min_size=1, max_size=12)),
                fine=draw(_money),
                turnover=draw(st.none() | _money.filter(lambda d: d > 0)),
                article=draw(st.none() | st.sampled_from(["83(4)", "83(5)", "32", "5"])),
                security_principle=draw(
                    st.none()
                    | st.sampled_from(["confidentiality", "integrity", "availability", "none"])
                ),
                records_affected=draw(st.none() | st.integers(min_value=0, max_value=10**7)),
                cause=draw(st.none() | st.text(st.characters(categories=["L"]), max_size=20)),
            )
        )
    return FineCorpus(records=tuple(records), provenance="hypothesis")


@st.composite
def queries(draw):
    lo_y = draw(st.integers(min_value=2018, max_value=2024))
    hi_y = draw(st.integers(min_value=lo_y, max_value=2024))
    lo_t = draw(_money)
    hi_t = draw(_money.filter(lambda d: d >= 0))
    return CorpusQuery(
        countries=draw(st.none() | st.frozensets(_country, max_size=3)),
        turnover_range=draw(st.none() | st.just((min(lo_t, hi_t), max(lo_t, hi_t)))),
        articles=draw(st.none() | st.frozensets(st.sampled_from(["83(4)", "83(5)", "32"]), max_size=2)),
        year_range=draw(st.none() | st.just((lo_y, hi_y))),
        security_principles=draw(
            st.none() | st.frozensets(st.sampled_from(["confidentiality", "none"]), max_size=2)
        ),
    )


@given(corpora(), queries())
def test_filter_is_idempotent(corpus, query):
    once = filter_corpus(corpus, query)
    assert filter_corpus(once, query) == once


@given(corpora(), queries(), queries())
def test_filter_composition_commutes(corpus, q1, q2):
    ab = filter_corpus(filter_corpus(corpus, q1), q2)
    ba = filter_corpus(filter_corpus(corpus, q2), q1)
    assert ab == ba


@given(corpora())
def test_parse_serialize_round_trip(corpus):
    again = parse_corpus(serialize_corpus(corpus), provenance="hypothesis")
    assert again == corpus
