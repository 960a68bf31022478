"""Personal Data Value at Risk: a quantitative engine over GDPR fines.

Pipeline: an administrative-fines corpus feeds jurimetrical statistics and
conformal intervals (the historical prior), which calibrate a Monte Carlo
loss model of a specific data controller (the scenario), yielding loss
exceedance curves and Pd-VaR statements.
"""

from .calibration import (
    DelphiReport,
    ExpertEstimate,
    LensModel,
    NoiseReport,
    delphi_aggregate,
    lens_fit,
    noise_report,
)
from .conformal import (
    ConformalInterval,
    SplitConfig,
    empirical_coverage,
    split_conformal,
    transductive_interval,
)
from .corpus import (
    CorpusError,
    CorpusQuery,
    FineCorpus,
    FineRecord,
    corpus_to_json,
    filter_corpus,
    parse_corpus,
    serialize_corpus,
)
from .fair import (
    LossExceedanceCurve,
    PdVaRStatement,
    PertParams,
    RiskScenario,
    SimulationResult,
    compose_calibrated_pdvar,
    load_scenario,
    loss_exceedance,
    pdvar_from_losses,
    run_scenario,
    sample_pert,
    vulnerability,
)
from .jurimetrics import (
    DeltaReport,
    EmptySampleError,
    HistoricalVaR,
    country_mean,
    historical_var,
    seriousness_delta,
)
from .probability import (
    BreachNetworkDerived,
    BreachNetworkParams,
    FineGivenPrinciple,
    IncidentMix,
    NormalModel,
    PoissonModel,
    fit_normal,
    fit_poisson,
    poisson_pmf,
    solve_breach_network,
    total_probability_attribution,
)
from .report import ENGINE_VERSION, RunManifest, render_statement

__version__ = ENGINE_VERSION

__all__ = [
    "BreachNetworkDerived",
    "BreachNetworkParams",
    "ConformalInterval",
    "CorpusError",
    "CorpusQuery",
    "DelphiReport",
    "DeltaReport",
    "EmptySampleError",
    "ExpertEstimate",
    "FineCorpus",
    "FineGivenPrinciple",
    "FineRecord",
    "HistoricalVaR",
    "IncidentMix",
    "LensModel",
    "LossExceedanceCurve",
    "NoiseReport",
    "NormalModel",
    "PdVaRStatement",
    "PertParams",
    "PoissonModel",
    "RiskScenario",
    "RunManifest",
    "SimulationResult",
    "SplitConfig",
    "compose_calibrated_pdvar",
    "corpus_to_json",
    "country_mean",
    "delphi_aggregate",
    "empirical_coverage",
    "filter_corpus",
    "fit_normal",
    "fit_poisson",
    "historical_var",
    "lens_fit",
    "load_scenario",
    "loss_exceedance",
    "noise_report",
    "parse_corpus",
    "pdvar_from_losses",
    "poisson_pmf",
    "render_statement",
    "run_scenario",
    "sample_pert",
    "seriousness_delta",
    "serialize_corpus",
    "solve_breach_network",
    "split_conformal",
    "total_probability_attribution",
    "transductive_interval",
    "vulnerability",
]
