"""Command-line pipeline: ingest, classify, baseline, score, simulate, verify, report.

Stages communicate only through files and each stage re-validates its inputs.
Exit codes: 0 success, 1 validation or pipeline failure (single `error: ...`
line on stderr), 2 usage error. Report-writing commands also render figures
next to their delimited/JSON outputs unless --no-figures is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Mapping

from . import baseline as baseline_mod
from . import classify as classify_mod
from . import corpus as corpus_mod
from . import figures as figures_mod
from . import report as report_mod
from . import simulate as simulate_mod
from .errors import CitenormError, ConfigError
from .exact import exact, format_fixed
from .indicators import score as compute_score

DEFAULT_OUTPUT_DIR = "out"
DEFAULT_WINDOW = "open"
DEFAULT_DELIMITER = "\t"
DEFAULT_CITABLE = "Article,Letter,Review"


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def encode_delimiter(delimiter: str) -> str:
    return "tab" if delimiter == "\t" else delimiter


def decode_delimiter(text: str) -> str:
    return "\t" if text == "tab" else text


def read_config_file(path: Path | str) -> dict[str, str]:
    """Parse a `key = value` config file; '#' starts a comment line."""
    values: dict[str, str] = {}
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {line_number}: expected key = value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


class Settings:
    """Flag values with config-file fallback; flags always win."""

    def __init__(self, args: argparse.Namespace, config: Mapping[str, str]):
        self._args = args
        self._config = config

    def get(self, name: str, default: Any = None, convert: Callable[[str], Any] = str) -> Any:
        value = getattr(self._args, name, None)
        if value is not None:
            return value
        if name in self._config:
            return convert(self._config[name])
        return default

    def require(self, name: str) -> Any:
        value = self.get(name)
        if value is None:
            raise ConfigError(f"missing required setting: --{name.replace('_', '-')}")
        return value


def _out_dir(settings: Settings) -> Path:
    out = Path(settings.get("output", DEFAULT_OUTPUT_DIR))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _say(settings: Settings, message: str) -> None:
    if not settings.get("quiet", False, parse_bool):
        print(message)


def _load_corpus(settings: Settings, path: str) -> tuple[corpus_mod.Corpus, corpus_mod.IngestReport]:
    window = corpus_mod.CitationWindow.parse(settings.get("window", DEFAULT_WINDOW))
    delimiter = decode_delimiter(settings.get("delimiter", DEFAULT_DELIMITER))
    year_range = (
        settings.get("min_year", corpus_mod.DEFAULT_YEAR_RANGE[0], int),
        settings.get("max_year", corpus_mod.DEFAULT_YEAR_RANGE[1], int),
    )
    raw, ingest_report = corpus_mod.read_publication_file(
        path, window, delimiter=delimiter, year_range=year_range
    )
    for rejected in ingest_report.rejected:
        print(f"warning: line {rejected.line_number} rejected: {rejected.reason}", file=sys.stderr)
    return corpus_mod.freeze(raw), ingest_report


def _reclassify_params(settings: Settings) -> classify_mod.ReclassifyParams:
    return classify_mod.ReclassifyParams(
        min_refs=settings.get("min_refs", classify_mod.DEFAULT_MIN_REFS, int),
        min_share=exact(settings.get("min_share", classify_mod.DEFAULT_MIN_SHARE)),
    )


def _citable(settings: Settings) -> frozenset:
    return corpus_mod.parse_citable_types(settings.get("citable_types", DEFAULT_CITABLE))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_ingest(settings: Settings) -> int:
    corpus_path = settings.require("corpus")
    corpus, ingest_report = _load_corpus(settings, corpus_path)
    out = _out_dir(settings)
    delimiter = decode_delimiter(settings.get("delimiter", DEFAULT_DELIMITER))
    corpus_mod.write_publication_file(out / "corpus_accepted.tsv", corpus, delimiter=delimiter)
    rejection_lines = [delimiter.join(row) for row in ingest_report.rows()]
    (out / "ingest_rejections.tsv").write_text("\n".join(rejection_lines) + "\n", encoding="utf-8")
    _say(settings, f"accepted {ingest_report.accepted} publications, rejected {len(ingest_report.rejected)} rows")
    _say(settings, f"wrote {out / 'corpus_accepted.tsv'} and {out / 'ingest_rejections.tsv'}")
    return 0


def cmd_classify(settings: Settings) -> int:
    corpus, _ = _load_corpus(settings, settings.require("corpus"))
    category_map = classify_mod.read_category_map_file(settings.require("categories"))
    assignments, coverage = classify_mod.classify_corpus(corpus, category_map, _reclassify_params(settings))
    out = _out_dir(settings)
    classify_mod.write_assignment_file(out / "assignments.tsv", assignments)
    coverage_lines = ["\t".join(row) for row in coverage.rows()]
    (out / "coverage.tsv").write_text("\n".join(coverage_lines) + "\n", encoding="utf-8")
    counts = ", ".join(f"{method}={count}" for method, count in coverage.counts.items())
    _say(settings, f"classified corpus: {counts}")
    _say(settings, f"wrote {out / 'assignments.tsv'} and {out / 'coverage.tsv'}")
    return 0


def cmd_baseline(settings: Settings) -> int:
    corpus, _ = _load_corpus(settings, settings.require("corpus"))
    category_map = classify_mod.read_category_map_file(settings.require("categories"))
    assignments, _coverage = classify_mod.classify_corpus(corpus, category_map, _reclassify_params(settings))
    table = baseline_mod.build_baselines(corpus, assignments, _citable(settings))
    out = _out_dir(settings)
    baseline_mod.write_baseline_file(out / "baselines.tsv", table)
    _say(settings, f"built {len(table.rates)} baseline cells, fingerprint {table.corpus_fingerprint}")
    _say(settings, f"wrote {out / 'baselines.tsv'}")
    return 0


def _build_meta(
    settings: Settings,
    corpus: corpus_mod.Corpus,
    ingest_report: corpus_mod.IngestReport,
    table: baseline_mod.BaselineTable,
    params: classify_mod.ReclassifyParams,
    digests: Mapping[str, str],
) -> report_mod.ReportMeta:
    parameters = {
        "citable_types": ",".join(sorted(t.value for t in table.citable_types)),
        "min_refs": str(params.min_refs),
        "min_share": str(params.min_share),
        "zero_expected": settings.get("zero_expected", "convention"),
        "window": settings.get("window", DEFAULT_WINDOW),
        "delimiter": encode_delimiter(settings.get("delimiter", DEFAULT_DELIMITER)),
        "year_range": (
            f"{settings.get('min_year', corpus_mod.DEFAULT_YEAR_RANGE[0], int)}"
            f":{settings.get('max_year', corpus_mod.DEFAULT_YEAR_RANGE[1], int)}"
        ),
    }
    excluded_text = "; ".join(f"{reason}={count}" for reason, count in sorted(table.exclusions.items()))
    corpus_summary = {
        "publications": len(corpus),
        "rejected_rows": len(ingest_report.rejected),
        "window": corpus.window.describe(),
        "baseline_cells": len(table.rates),
        "baseline_excluded": excluded_text or "none",
    }
    return report_mod.ReportMeta(
        baseline_fingerprint=table.corpus_fingerprint,
        corpus_summary=corpus_summary,
        parameters=parameters,
        input_digests=dict(digests),
    )


def cmd_score(settings: Settings) -> int:
    corpus_path = settings.require("corpus")
    categories_path = settings.require("categories")
    oeuvre_path = settings.require("oeuvre")
    corpus, ingest_report = _load_corpus(settings, corpus_path)
    category_map = classify_mod.read_category_map_file(categories_path)
    params = _reclassify_params(settings)
    assignments, _coverage = classify_mod.classify_corpus(corpus, category_map, params)
    table = baseline_mod.build_baselines(corpus, assignments, _citable(settings))

    group_id = settings.get("group_id", Path(oeuvre_path).stem)
    oeuvre, missing = corpus_mod.select_oeuvre(corpus, group_id, corpus_mod.read_oeuvre_ids(oeuvre_path))
    for pub_id in missing:
        print(f"warning: oeuvre id not in corpus: {pub_id}", file=sys.stderr)

    result = compute_score(
        oeuvre,
        corpus,
        assignments,
        table,
        citable_types=_citable(settings),
        zero_expected=settings.get("zero_expected", "convention"),
    )
    digests = {
        "corpus": report_mod.file_digest(corpus_path),
        "category_map": report_mod.file_digest(categories_path),
        "oeuvre": report_mod.file_digest(oeuvre_path),
    }
    bundle = report_mod.render(result, _build_meta(settings, corpus, ingest_report, table, params, digests))

    out = _out_dir(settings)
    (out / "score.json").write_text(bundle.machine, encoding="utf-8")
    (out / "score.txt").write_text(bundle.human, encoding="utf-8")
    written = [out / "score.json", out / "score.txt"]
    if not settings.get("no_figures", False, parse_bool):
        written += figures_mod.render_score_figures(bundle.document, out)
    averaged = format_fixed(result.averaged) if result.averaged is not None else "undefined"
    _say(settings, f"group {group_id}: globalized {format_fixed(result.globalized)}, averaged {averaged}")
    _say(settings, "wrote " + ", ".join(str(p) for p in written))
    return 0


def cmd_simulate(settings: Settings) -> int:
    size_text = settings.get("oeuvre_size", "5:20")
    try:
        lo, hi = (int(part) for part in str(size_text).split(":"))
    except ValueError:
        raise ConfigError(f"bad oeuvre size range: '{size_text}' (expected LO:HI)") from None
    mixture_text = settings.get("field_mixture")
    mixture = None
    if mixture_text:
        try:
            mixture = tuple(float(part) for part in str(mixture_text).split(","))
        except ValueError:
            raise ConfigError(f"bad field mixture: '{mixture_text}' (expected comma-joined shares)") from None
    config = simulate_mod.SimConfig(
        seed=settings.get("seed", 1, int),
        n_groups=settings.get("n_groups", 20, int),
        oeuvre_size=(lo, hi),
        skew=simulate_mod.SkewModel.parse(settings.get("skew_model", "powerlaw:2.5")),
        n_fields=settings.get("n_fields", 2, int),
        field_rate_spread=settings.get("field_rate_spread", 4.0, float),
        replicates=settings.get("replicates", 5, int),
        papers_per_field=settings.get("papers_per_field", 200, int),
        field_mixture=mixture,
    )
    stats = simulate_mod.run_divergence(config)
    out = _out_dir(settings)
    stats_path = out / "divergence.tsv"
    summary_path = out / "divergence_summary.tsv"
    simulate_mod.write_divergence_files(stats, stats_path, summary_path)
    written = [stats_path, summary_path]
    if not settings.get("no_figures", False, parse_bool):
        rows = simulate_mod.read_stats_file(stats_path)
        written += figures_mod.render_divergence_figures(rows, out)
    _say(settings, f"simulated {stats.summary['n_records']} group scores ({config.label()})")
    _say(settings, "wrote " + ", ".join(str(p) for p in written))
    return 0


def cmd_verify(settings: Settings) -> int:
    document = report_mod.load_report(settings.require("report"))
    parameters = document.get("meta", {}).get("parameters", {})

    # Re-read inputs exactly the way the original run declared it read them.
    proxy = argparse.Namespace()
    window = parameters.get("window", DEFAULT_WINDOW)
    delimiter = decode_delimiter(parameters.get("delimiter", DEFAULT_DELIMITER))
    year_lo, _, year_hi = parameters.get(
        "year_range", f"{corpus_mod.DEFAULT_YEAR_RANGE[0]}:{corpus_mod.DEFAULT_YEAR_RANGE[1]}"
    ).partition(":")
    reread = Settings(
        proxy,
        {
            "window": window,
            "delimiter": delimiter,
            "min_year": year_lo,
            "max_year": year_hi,
            "quiet": "1",
        },
    )
    corpus_path = settings.require("corpus")
    categories_path = settings.require("categories")
    corpus, _ = _load_corpus(reread, corpus_path)
    category_map = classify_mod.read_category_map_file(categories_path)
    citable = corpus_mod.parse_citable_types(parameters.get("citable_types", DEFAULT_CITABLE))
    reclassify = classify_mod.ReclassifyParams(
        min_refs=int(parameters.get("min_refs", classify_mod.DEFAULT_MIN_REFS)),
        min_share=exact(parameters.get("min_share", classify_mod.DEFAULT_MIN_SHARE)),
    )
    assignments, _coverage = classify_mod.classify_corpus(corpus, category_map, reclassify)
    table = baseline_mod.build_baselines(corpus, assignments, citable)

    digests = {
        "corpus": report_mod.file_digest(corpus_path),
        "category_map": report_mod.file_digest(categories_path),
    }
    oeuvre_path = settings.get("oeuvre")
    if oeuvre_path is not None:
        digests["oeuvre"] = report_mod.file_digest(oeuvre_path)

    result = report_mod.verify_bundle(
        document, corpus, category_map, table, current_input_digests=digests
    )
    if not result.ok:
        raise CitenormError(f"verification failed: {result.detail}")
    _say(settings, "verification passed")
    return 0


def cmd_report(settings: Settings) -> int:
    document = report_mod.load_report(settings.require("report"))
    out = _out_dir(settings)
    human = report_mod.render_human(document)
    (out / "score.txt").write_text(human, encoding="utf-8")
    written = [out / "score.txt"]
    if not settings.get("no_figures", False, parse_bool):
        written += figures_mod.render_score_figures(document, out)
    _say(settings, "wrote " + ", ".join(str(p) for p in written))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file; flags override it")
    parser.add_argument("--output", help=f"output directory (default: {DEFAULT_OUTPUT_DIR})")
    parser.add_argument("--quiet", action="store_true", default=None, help="suppress status output")


def _add_corpus_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="publication file (delimited, header required)")
    parser.add_argument("--delimiter", help="column delimiter (default: tab)")
    parser.add_argument("--window", help="citation window: open or fixed:N (default: open)")
    parser.add_argument("--min-year", dest="min_year", type=int, help="lowest acceptable publication year")
    parser.add_argument("--max-year", dest="max_year", type=int, help="highest acceptable publication year")


def _add_classify_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--categories", help="category map file")
    parser.add_argument("--min-refs", dest="min_refs", type=int, help="reference-analysis minimum usable references")
    parser.add_argument("--min-share", dest="min_share", help="reference-analysis minimum category share")


def _add_scoring_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--citable-types", dest="citable_types", help=f"comma list (default: {DEFAULT_CITABLE})")
    parser.add_argument(
        "--zero-expected",
        dest="zero_expected",
        choices=["convention", "strict"],
        help="zero-expected-rate handling (default: convention)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citenorm",
        description="Field-normalized citation impact indicators over a publication corpus.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_ingest = subparsers.add_parser("ingest", help="validate a publication file into a corpus")
    _add_common(p_ingest)
    _add_corpus_options(p_ingest)
    p_ingest.set_defaults(handler=cmd_ingest)

    p_classify = subparsers.add_parser("classify", help="assign categories to every publication")
    _add_common(p_classify)
    _add_corpus_options(p_classify)
    _add_classify_options(p_classify)
    p_classify.set_defaults(handler=cmd_classify)

    p_baseline = subparsers.add_parser("baseline", help="build expected citation rates per cell")
    _add_common(p_baseline)
    _add_corpus_options(p_baseline)
    _add_classify_options(p_baseline)
    _add_scoring_options(p_baseline)
    p_baseline.set_defaults(handler=cmd_baseline)

    p_score = subparsers.add_parser("score", help="score an oeuvre and write reports plus figures")
    _add_common(p_score)
    _add_corpus_options(p_score)
    _add_classify_options(p_score)
    _add_scoring_options(p_score)
    p_score.add_argument("--oeuvre", help="oeuvre file: one publication id per line")
    p_score.add_argument("--group-id", dest="group_id", help="group label (default: oeuvre file stem)")
    p_score.add_argument("--no-figures", dest="no_figures", action="store_true", default=None)
    p_score.set_defaults(handler=cmd_score)

    p_simulate = subparsers.add_parser("simulate", help="run the divergence Monte-Carlo harness")
    _add_common(p_simulate)
    p_simulate.add_argument("--seed", type=int)
    p_simulate.add_argument("--n-groups", dest="n_groups", type=int)
    p_simulate.add_argument("--oeuvre-size", dest="oeuvre_size", help="LO:HI papers per group")
    p_simulate.add_argument("--skew-model", dest="skew_model", help="powerlaw:A | lognormal:MU,SIGMA | uniform:MAX")
    p_simulate.add_argument("--n-fields", dest="n_fields", type=int)
    p_simulate.add_argument("--field-rate-spread", dest="field_rate_spread", type=float)
    p_simulate.add_argument("--replicates", type=int)
    p_simulate.add_argument("--papers-per-field", dest="papers_per_field", type=int)
    p_simulate.add_argument("--field-mixture", dest="field_mixture", help="comma-joined oeuvre sampling shares per field")
    p_simulate.add_argument("--no-figures", dest="no_figures", action="store_true", default=None)
    p_simulate.set_defaults(handler=cmd_simulate)

    p_verify = subparsers.add_parser("verify", help="recompute a score report and compare every value")
    _add_common(p_verify)
    p_verify.add_argument("--report", help="machine score report (JSON)")
    p_verify.add_argument("--corpus", help="original corpus file")
    p_verify.add_argument("--categories", help="original category map file")
    p_verify.add_argument("--oeuvre", help="original oeuvre file (optional, digest check only)")
    p_verify.set_defaults(handler=cmd_verify)

    p_report = subparsers.add_parser("report", help="re-render human report and figures from a machine report")
    _add_common(p_report)
    p_report.add_argument("--report", help="machine score report (JSON)")
    p_report.add_argument("--no-figures", dest="no_figures", action="store_true", default=None)
    p_report.set_defaults(handler=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = read_config_file(args.config) if args.config else {}
        settings = Settings(args, config)
        return args.handler(settings)
    except FileNotFoundError as err:
        print(f"error: missing input file: {err.filename}", file=sys.stderr)
        return 1
    except CitenormError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
