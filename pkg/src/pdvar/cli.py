"""pdvar command line: reproducible runs from corpus and scenario files.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error. Diagnostics go
to stderr; data goes to ``--out`` (a sidecar ``*.manifest.json`` records the
run) or to stdout when no path is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import calibration, conformal, fair, jurimetrics, probability, report
from .corpus import CorpusQuery, FineCorpus, corpus_to_json, filter_corpus, parse_corpus


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; the contract here is 1.
    def error(self, message: str) -> None:
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> _Parser:
    parser = _Parser(prog="pdvar", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="validate a fines CSV and emit it as JSON")
    _corpus_flags(p)
    _out_flag(p)

    p = sub.add_parser("stats", help="per-country mean fine amounts")
    _corpus_flags(p)
    _out_flag(p)

    p = sub.add_parser("var", help="historical value-at-risk quantile")
    _corpus_flags(p)
    p.add_argument("--level", type=float, required=True, help="quantile level in (0,1)")
    _out_flag(p)

    p = sub.add_parser("bayes", help="solve the dpia/attack/breach network")
    p.add_argument("--params", required=True, help="JSON file with the five conditionals")
    _out_flag(p)

    p = sub.add_parser("attribute", help="fine attribution over C/I/A principles")
    p.add_argument("--params", required=True, help="JSON file with mix and fine_given")
    _out_flag(p)

    p = sub.add_parser("calibrate", help="Delphi consensus and noise over expert estimates")
    p.add_argument("--estimates", required=True, help="CSV of expert estimates")
    p.add_argument("--rounds", type=int, default=None, help="number of rounds (default: max seen)")
    p.add_argument("--epsilon", type=float, default=calibration.DEFAULT_CONVERGENCE_EPSILON)
    p.add_argument("--targets", default=None, help="optional scenario_id,score CSV for the lens fit")
    _out_flag(p)

    p = sub.add_parser("conformal", help="conformal prediction interval over fine amounts")
    _corpus_flags(p)
    p.add_argument("--method", choices=("tcp", "icp"), default="tcp")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=None, help="split seed for icp")
    _out_flag(p)

    p = sub.add_parser("simulate", help="Monte Carlo run of a scenario file")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("lec", help="loss exceedance curve from per-iteration losses")
    p.add_argument("--losses", required=True, help="losses CSV produced by simulate")
    p.add_argument("--svg", action="store_true", help="also emit an SVG polyline")
    _out_flag(p)

    p = sub.add_parser("report", help="corpus + scenario to a full Pd-VaR report")
    _corpus_flags(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--alpha", type=float, default=0.1, help="conformal exclusion rate")
    p.add_argument("--level", type=float, default=0.9, help="statement confidence")
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    return parser


def _corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="fines CSV in the canonical schema")
    p.add_argument("--country", default=None, help="restrict to one country code")


def _out_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("PDVAR_SEED")
    return int(env) if env else 0


def _load_corpus(args: argparse.Namespace) -> FineCorpus:
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = parse_corpus(fh, provenance=args.corpus)
    if args.country:
        corpus = filter_corpus(corpus, CorpusQuery(countries=frozenset({args.country})))
    return corpus


def _emit(
    text: str,
    args: argparse.Namespace,
    manifest: report.RunManifest,
    suffixes: dict[str, str] | None = None,
) -> None:
    """Write `text` to --out (manifest beside it) or to stdout."""
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    for suffix, payload in (suffixes or {}).items():
        out.with_suffix(suffix).write_text(payload, encoding="utf-8")
    manifest.write_beside(out)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _manifest(args: argparse.Namespace, seed: int | None, **params) -> report.RunManifest:
    inputs = tuple(
        str(getattr(args, name))
        for name in ("corpus", "scenario", "params", "estimates", "losses", "targets")
        if getattr(args, name, None)
    )
    return report.RunManifest(
        subcommand=args.subcommand, inputs=inputs, parameters=params, seed=seed
    )


def _cmd_ingest(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args)
    _emit(corpus_to_json(corpus) + "\n", args, _manifest(args, None, country=args.country))
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args)
    if args.country:
        mean = jurimetrics.country_mean(corpus, args.country)
        n = sum(1 for rec in corpus if rec.country == args.country)
        payload = {"country": args.country, "mean": float(mean), "n": n}
    else:
        countries = sorted({rec.country for rec in corpus})
        payload = {
            "means": {
                c: {
                    "mean": float(jurimetrics.country_mean(corpus, c)),
                    "n": sum(1 for rec in corpus if rec.country == c),
                }
                for c in countries
            }
        }
    _emit(_json_text(payload), args, _manifest(args, None, country=args.country))
    return 0


def _cmd_var(args: argparse.Namespace) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = parse_corpus(fh, provenance=args.corpus)
    query = CorpusQuery(
        countries=frozenset({args.country}) if args.country else None
    )
    result = jurimetrics.historical_var(corpus, query, args.level)
    _emit(
        _json_text(result.to_json_dict()),
        args,
        _manifest(args, None, country=args.country, level=args.level),
    )
    return 0


def _cmd_bayes(args: argparse.Namespace) -> int:
    with open(args.params, encoding="utf-8") as fh:
        data = json.load(fh)
    params = probability.BreachNetworkParams(
        p_dpia=float(data["p_dpia"]),
        p_ext_given_dpia=float(data["p_ext_given_dpia"]),
        p_ext_given_not_dpia=float(data["p_ext_given_not_dpia"]),
        p_db_given_ext=float(data["p_db_given_ext"]),
        p_db_given_not_ext=float(data["p_db_given_not_ext"]),
    )
    derived = probability.solve_breach_network(params)
    _emit(_json_text(derived.to_json_dict()), args, _manifest(args, None))
    return 0


def _cmd_attribute(args: argparse.Namespace) -> int:
    with open(args.params, encoding="utf-8") as fh:
        data = json.load(fh)
    mix = probability.IncidentMix(**{k: float(v) for k, v in data["mix"].items()})
    fine_given = probability.FineGivenPrinciple(
        **{k: float(v) for k, v in data["fine_given"].items()}
    )
    result = probability.total_probability_attribution(mix, fine_given)
    payload = {
        "p_d": result.p_d,
        "posterior_c": result.posterior_c,
        "posterior_i": result.posterior_i,
        "posterior_a": result.posterior_a,
    }
    _emit(_json_text(payload), args, _manifest(args, None))
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    with open(args.estimates, encoding="utf-8") as fh:
        estimates = calibration.parse_estimates_csv(fh)
    if not estimates:
        raise ValueError("no estimates in input")
    rounds = args.rounds if args.rounds is not None else max(e.round for e in estimates)
    payload = {
        "delphi": calibration.delphi_aggregate(estimates, rounds, args.epsilon).to_json_dict(),
        "noise": calibration.noise_report(estimates).to_json_dict(),
    }
    if args.targets:
        payload["lens"] = _lens_from_files(estimates, args.targets).to_json_dict()
    _emit(
        _json_text(payload),
        args,
        _manifest(args, None, rounds=rounds, epsilon=args.epsilon),
    )
    return 0


def _lens_from_files(
    estimates: list[calibration.ExpertEstimate], targets_path: str
) -> calibration.LensModel:
    """Fit scores on per-scenario mean factor weights."""
    import csv as _csv

    with open(targets_path, encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != ("scenario_id", "score"):
            raise ValueError("targets CSV must have header scenario_id,score")
        targets = {row[0].strip(): float(row[1]) for row in reader if row}

    factors = sorted({e.factor for e in estimates})
    scenarios = sorted(targets)
    matrix = []
    for s in scenarios:
        row = []
        for f in factors:
            weights = [e.weight for e in estimates if e.scenario_id == s and e.factor == f]
            if not weights:
                raise ValueError(f"scenario {s!r} has no weight for factor {f!r}")
            row.append(sum(weights) / len(weights))
        matrix.append(row)
    y = np.array([targets[s] for s in scenarios])
    return calibration.lens_fit(np.array(matrix), y)


def _cmd_conformal(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args)
    amounts = [float(f) for f in corpus.fines()]
    if args.method == "tcp":
        interval = conformal.transductive_interval(amounts, args.alpha)
        payload = interval.to_json_dict()
        payload["excluded_ids"] = [corpus.records[i].id for i in interval.excluded]
    else:
        seed = _resolve_seed(args.seed)
        config = conformal.SplitConfig(seed=seed)
        idx_train, idx_calib, idx_test = config.split_indices(len(amounts))
        if len(idx_train) == 0 or len(idx_calib) == 0:
            raise ValueError(f"corpus of {len(amounts)} is too small to split")
        y = np.asarray(amounts)
        predictor = conformal.fit_mean_predictor(y[idx_train])
        intervals = conformal.split_conformal(
            train=(np.zeros(len(idx_train)), y[idx_train]),
            calibration=(np.zeros(len(idx_calib)), y[idx_calib]),
            predict_points=np.zeros(1),
            alpha=args.alpha,
            predictor=predictor,
        )
        payload = intervals[0].to_json_dict()
    _emit(
        _json_text(payload),
        args,
        _manifest(args, getattr(args, "seed", None), method=args.method, alpha=args.alpha),
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load_scenario_file(args.scenario)
    seed = _resolve_seed(args.seed)
    result = fair.run_scenario(scenario, args.iterations, seed, workers=args.workers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.json").write_text(
        _json_text(result.summary_json_dict()), encoding="utf-8"
    )
    (out_dir / "losses.csv").write_text(
        report.losses_csv(result.annualized_losses), encoding="utf-8"
    )
    (out_dir / "histogram.csv").write_text(
        report.histogram_csv(result.annualized_losses), encoding="utf-8"
    )
    manifest = _manifest(args, seed, iterations=args.iterations, workers=args.workers)
    (out_dir / "manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
    return 0


def _cmd_lec(args: argparse.Namespace) -> int:
    losses = _read_losses_csv(args.losses)
    curve = fair.exceedance_from_losses(losses)
    svg = report.svg_polyline(curve.points) if args.svg else None
    _emit(
        report.lec_csv(curve.points),
        args,
        _manifest(args, None, svg=args.svg),
        suffixes={".svg": svg} if svg and args.out else None,
    )
    if svg and args.out is None:
        sys.stdout.write(svg)
    return 0


def _read_losses_csv(path: str) -> list[float]:
    import csv as _csv

    with open(path, encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != (
            "iteration",
            "annualized_loss",
        ):
            raise ValueError("losses CSV must have header iteration,annualized_loss")
        return [float(row[1]) for row in reader if row]


def _cmd_report(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args)
    amounts = [float(f) for f in corpus.fines()]
    interval = conformal.transductive_interval(amounts, args.alpha)
    scenario = _load_scenario_file(args.scenario)
    seed = _resolve_seed(args.seed)

    result = fair.compose_calibrated_pdvar(
        interval, scenario, args.iterations, seed, workers=args.workers
    )
    statement = fair.pdvar_from_losses(result, confidence=args.level)
    curve = fair.loss_exceedance(result)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "corpus": {"path": args.corpus, "n": len(corpus), "country": args.country},
        "jurimetrical_interval": {
            **interval.to_json_dict(),
            "excluded_ids": [corpus.records[i].id for i in interval.excluded],
        },
        "simulation": result.summary_json_dict(),
        "statement": statement.to_json_dict(),
    }
    (out_dir / "report.json").write_text(_json_text(payload), encoding="utf-8")
    (out_dir / "losses.csv").write_text(
        report.losses_csv(result.annualized_losses), encoding="utf-8"
    )
    (out_dir / "lec.csv").write_text(report.lec_csv(curve.points), encoding="utf-8")
    manifest = _manifest(
        args,
        seed,
        alpha=args.alpha,
        level=args.level,
        iterations=args.iterations,
        workers=args.workers,
    )
    (out_dir / "manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
    return 0


def _load_scenario_file(path: str) -> fair.RiskScenario:
    with open(path, encoding="utf-8") as fh:
        return fair.load_scenario(json.load(fh))


_HANDLERS = {
    "ingest": _cmd_ingest,
    "stats": _cmd_stats,
    "var": _cmd_var,
    "bayes": _cmd_bayes,
    "attribute": _cmd_attribute,
    "calibrate": _cmd_calibrate,
    "conformal": _cmd_conformal,
    "simulate": _cmd_simulate,
    "lec": _cmd_lec,
    "report": _cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.subcommand](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
