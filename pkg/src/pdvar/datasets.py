"""Embedded sample datasets used as evidence bases and regression fixtures.

``TURNOVER_BAND_FINES_CSV`` is a curated sample of GDPR administrative fines
against undertakings in the EUR 10M-100M annual-turnover band (France, UK,
Spain, Ireland, 2019-2023). The sparse per-country spreadsheet layout of the
original dump is normalized into one ``country`` plus one ``fine_eur`` column.
"""

from __future__ import annotations

from decimal import Decimal

from .calibration import ExpertEstimate
from .corpus import FineCorpus, parse_corpus

TURNOVER_BAND_FINES_CSV = """\
id,date,year,country,controller,fine_eur,turnover_eur,article,security_principle,records_affected,cause
1,2019-05,2019,FR,Sergic_SAS,400000.00,,,,,
2,2019-11,2019,FR,Futura_International,500000.00,,,,,
27,2021-01,2021,UK,Rancom Security Limited,1279000.00,,,,,
47,2021-07,2021,FR,AG2R_La_Mondiale,1750000.00,,,,,
52,2021-12,2021,ES,NBQ_technology,24000.00,,,,,
55,2022-04,2022,FR,Dedalus Biologie,1500000.00,,,,,
61,2023-05,2023,FR,Doctissimo,380000.00,,,,,
71,2022-10,2022,UK,EasyLife ltd,1567000.00,,,,,
95,2022-12,2022,IE,Virtue integrated Elder Care,100000.00,,,,,
96,2022-12,2022,IE,A&G couriers,15000.00,,,,,
106,2021-03,2021,IE,Irish Credit Bureau,90000.00,,,,,
"""

# ICO fines reduced during the COVID pandemic: (imposed fine, fine initially
# announced before reduction). Amounts in GBP, kept in their original currency.
COVID_REDUCTION_CURRENCY = "GBP"
COVID_REDUCTION_PAIRS: tuple[tuple[Decimal, Decimal], ...] = (
    (Decimal("18400000"), Decimal("24000000")),  # Marriott
    (Decimal("20000000"), Decimal("24000000")),  # British Airways
    (Decimal("1250000"), Decimal("1500000")),  # Ticketmaster
)

# Analyst weights (1-5 ordinal) for the art. 83(2)(a) impact criterion across
# ten sanction decisions, one scenario per decision.
_IMPACT_WEIGHT_CASES: tuple[tuple[str, int], ...] = (
    ("marriott_2020", 5),
    ("british_airways_2020", 5),
    ("karantinas_2021", 3),
    ("indecemi_2022", 3),
    ("bank_of_ireland_2023", 2),
    ("olavs_hospital_2021", 4),
    ("senaitc_2020", 1),
    ("ticketmaster_2020", 2),
    ("med_help_2021", 4),
    ("uk_cabinet_office_2021", 5),
)


def turnover_band_fines() -> FineCorpus:
    """The embedded 11-row turnover-band corpus."""
    return parse_corpus(
        TURNOVER_BAND_FINES_CSV, provenance="embedded: turnover band 10M-100M EUR"
    )


def covid_reduction_pairs() -> list[tuple[Decimal, Decimal]]:
    """(actual, pre-reduction) fine pairs for the COVID-era ICO reductions."""
    return list(COVID_REDUCTION_PAIRS)


def impact_factor_weights() -> list[ExpertEstimate]:
    """Single-round analyst weights for the art. 83(2)(a) impact criterion."""
    return [
        ExpertEstimate(
            expert_id="analyst",
            round=1,
            factor="a",
            scenario_id=case,
            weight=float(weight),
        )
        for case, weight in _IMPACT_WEIGHT_CASES
    ]
