"""Traceable assessment reports: machine document, human text, verification.

The machine report is the authority: a JSON document with stable key order in
which every aggregate decomposes into per-paper trace entries. The human
report is rendered from that document, so the two cannot drift apart.
Verification recomputes the score from the original inputs and diffs the
resulting document against the stored one, naming the first mismatch.
Timestamps are excluded from all content comparisons.
"""

from __future__ import annotations

import hashlib
import json
import textwrap
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping

from .baseline import BaselineTable
from .classify import CategoryMap, ReclassifyParams, classify_corpus
from .corpus import Corpus, parse_citable_types, select_oeuvre
from .errors import ReportError
from .exact import exact, format_fixed
from .indicators import OeuvreScore, score as compute_score

REPORT_FORMAT = "oeuvre-score-report/1"
DIGEST_ALGORITHM = "sha256"
HUMAN_WIDTH = 100

DEFAULT_CAVEAT = (
    "This report presents citation-based indicators as one source of information among others. "
    "They are meaningful only alongside expert knowledge of the work, were computed over the "
    "declared corpus and citation window, and should support judgement rather than replace it. "
    "The per-paper trace below exists so the assessed group can check every underlying number."
)


@dataclass(frozen=True)
class ReportMeta:
    baseline_fingerprint: str
    corpus_summary: Mapping[str, Any]
    parameters: Mapping[str, str]
    input_digests: Mapping[str, str]
    caveat: str = DEFAULT_CAVEAT
    timestamp: str | None = None  # ISO-8601 UTC; filled at render time when None

    def __post_init__(self) -> None:
        if not self.caveat.strip():
            raise ReportError("caveat header must not be empty")


@dataclass(frozen=True)
class ReportBundle:
    score: OeuvreScore
    machine: str
    human: str
    document: Mapping[str, Any]


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    detail: str | None = None


def file_digest(path: Path | str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ---------------------------------------------------------------------------
# Machine document
# ---------------------------------------------------------------------------


def score_document(score: OeuvreScore) -> dict[str, Any]:
    """Serialize an OeuvreScore with 12-decimal ratios and full decomposition."""
    trace = []
    for line in score.trace:
        per_category = {
            category: {
                "weight": format_fixed(line.weights[category]),
                "expected": format_fixed(line.expected_by_category[category]),
            }
            for category in sorted(line.weights)
        }
        trace.append(
            {
                "id": line.publication_id,
                "citations": line.citations,
                "expected": format_fixed(line.expected),
                "ratio": format_fixed(line.ratio) if line.ratio is not None else None,
                "flag": line.flag,
                "per_category": per_category,
            }
        )
    per_field = []
    for fs in score.per_field:
        per_field.append(
            {
                "category": fs.category,
                "paper_weight": format_fixed(fs.paper_weight),
                "sum_citations": format_fixed(fs.sum_citations),
                "sum_expected": format_fixed(fs.sum_expected),
                "globalized": format_fixed(fs.globalized) if fs.globalized is not None else None,
                "averaged": format_fixed(fs.averaged) if fs.averaged is not None else None,
                "flags": list(fs.flags),
            }
        )
    return {
        "group_id": score.group_id,
        "n_papers": score.n_papers,
        "n_scored": score.n_scored,
        "n_averaged": score.n_averaged,
        "sum_citations": score.sum_citations,
        "sum_expected": format_fixed(score.sum_expected),
        "globalized": format_fixed(score.globalized),
        "averaged": format_fixed(score.averaged) if score.averaged is not None else None,
        "flags": list(score.flags),
        "per_field": per_field,
        "trace": trace,
        "excluded": [{"id": e.publication_id, "reason": e.reason} for e in score.excluded],
    }


def build_document(score: OeuvreScore, meta: ReportMeta) -> dict[str, Any]:
    return {
        "format": REPORT_FORMAT,
        "caveat": meta.caveat,
        "meta": {
            "baseline_fingerprint": meta.baseline_fingerprint,
            "corpus_summary": dict(meta.corpus_summary),
            "digest_algorithm": DIGEST_ALGORITHM,
            "generated": meta.timestamp or _utc_now(),
            "input_digests": dict(meta.input_digests),
            "parameters": dict(meta.parameters),
        },
        "score": score_document(score),
    }


def machine_text(document: Mapping[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_report(text: str) -> dict[str, Any]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise ReportError(f"unreadable report document: {err}") from err
    if document.get("format") != REPORT_FORMAT:
        raise ReportError(f"unknown report format: {document.get('format')!r}")
    return document


def load_report(path: Path | str) -> dict[str, Any]:
    return parse_report(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Human rendering (built from the machine document, never from live objects)
# ---------------------------------------------------------------------------


def _rule(char: str = "-") -> str:
    return char * HUMAN_WIDTH


def _table(rows: list[list[str]], indent: str = "  ") -> list[str]:
    if not rows:
        return []
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for row in rows:
        cells = [cell.ljust(widths[i]) for i, cell in enumerate(row)]
        out.append((indent + "  ".join(cells)).rstrip())
    return out


def render_human(document: Mapping[str, Any]) -> str:
    meta = document["meta"]
    sc = document["score"]
    lines: list[str] = []
    lines.append(_rule("="))
    lines.append("FIELD-NORMALIZED CITATION IMPACT REPORT".center(HUMAN_WIDTH).rstrip())
    lines.append(_rule("="))
    lines.extend(textwrap.wrap(document["caveat"], width=HUMAN_WIDTH))
    lines.append(_rule())
    info_rows = [
        ["group:", str(sc["group_id"])],
        ["generated:", str(meta["generated"])],
        ["digest algorithm:", str(meta["digest_algorithm"])],
        ["baseline fingerprint:", str(meta["baseline_fingerprint"])],
    ]
    for name, digest in sorted(meta["input_digests"].items()):
        info_rows.append([f"input {name}:", digest])
    for key, value in sorted(meta["corpus_summary"].items()):
        info_rows.append([f"corpus {key}:", str(value)])
    for key, value in sorted(meta["parameters"].items()):
        info_rows.append([f"parameter {key}:", str(value)])
    lines.extend(_table(info_rows))
    lines.append(_rule())
    lines.append("indicators")
    lines.extend(
        _table(
            [
                ["papers in oeuvre:", str(sc["n_papers"])],
                ["papers scored:", str(sc["n_scored"])],
                ["papers in averaged mean:", str(sc["n_averaged"])],
                ["total citations:", str(sc["sum_citations"])],
                ["total expected:", sc["sum_expected"]],
                ["globalized ratio:", sc["globalized"]],
                ["averaged ratio:", sc["averaged"] if sc["averaged"] is not None else "undefined"],
            ]
        )
    )
    for flag in sc["flags"]:
        lines.append(f"  note: {flag}")
    if sc["per_field"]:
        lines.append(_rule())
        lines.append("per-field breakdown")
        rows = [["category", "papers", "citations", "expected", "globalized", "averaged"]]
        for fs in sc["per_field"]:
            rows.append(
                [
                    fs["category"],
                    fs["paper_weight"],
                    fs["sum_citations"],
                    fs["sum_expected"],
                    fs["globalized"] if fs["globalized"] is not None else "undefined",
                    fs["averaged"] if fs["averaged"] is not None else "undefined",
                ]
            )
        lines.extend(_table(rows))
        for fs in sc["per_field"]:
            for flag in fs["flags"]:
                lines.append(f"  note [{fs['category']}]: {flag}")
    lines.append(_rule())
    lines.append("per-paper trace")
    rows = [["id", "citations", "expected", "ratio"]]
    for line in sc["trace"]:
        ratio = line["ratio"] if line["ratio"] is not None else "-"
        rows.append([line["id"], str(line["citations"]), line["expected"], ratio])
    lines.extend(_table(rows))
    for line in sc["trace"]:
        if line["flag"]:
            lines.append(f"  note [{line['id']}]: {line['flag']}")
    if sc["excluded"]:
        lines.append(_rule())
        lines.append("excluded publications")
        lines.extend(_table([[e["id"], e["reason"]] for e in sc["excluded"]]))
    lines.append(_rule("="))
    text = "\n".join(lines) + "\n"
    overlong = [ln for ln in text.splitlines() if len(ln) > HUMAN_WIDTH]
    if overlong:
        raise ReportError(f"human report line exceeds {HUMAN_WIDTH} columns: {overlong[0]!r}")
    return text


def render(score: OeuvreScore, meta: ReportMeta) -> ReportBundle:
    """Produce the machine and human renderings of one score.

    Both renderings agree on every value because the human text is generated
    from the machine document.
    """
    document = build_document(score, meta)
    return ReportBundle(
        score=score,
        machine=machine_text(document),
        human=render_human(document),
        document=document,
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def _diff(a: Any, b: Any, path: str) -> str | None:
    """First differing path between two report trees; 'generated' keys skipped."""
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b)):
            if key == "generated":
                continue
            if key not in a or key not in b:
                return f"{path}.{key}"
            found = _diff(a[key], b[key], f"{path}.{key}")
            if found:
                return found
        return None
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return f"{path}.length"
        for index, (left, right) in enumerate(zip(a, b)):
            label = str(index)
            if isinstance(left, dict):
                label = str(left.get("id") or left.get("category") or index)
            found = _diff(left, right, f"{path}[{label}]")
            if found:
                return found
        return None
    if a != b:
        return path
    return None


def _params_from_document(parameters: Mapping[str, str]) -> tuple[frozenset, ReclassifyParams, str]:
    try:
        citable = parse_citable_types(parameters["citable_types"])
        reclassify = ReclassifyParams(
            min_refs=int(parameters["min_refs"]),
            min_share=exact(parameters["min_share"]),
        )
        zero_expected = parameters["zero_expected"]
    except KeyError as err:
        raise ReportError(f"report parameters incomplete: missing {err.args[0]!r}") from None
    return citable, reclassify, zero_expected


def verify_bundle(
    bundle: ReportBundle | Mapping[str, Any],
    corpus: Corpus,
    category_map: CategoryMap,
    table: BaselineTable,
    *,
    current_input_digests: Mapping[str, str] | None = None,
) -> VerificationResult:
    """Recompute the score from the inputs and compare field by field.

    Checks, in order: baseline fingerprint (mismatch means the normalization
    universe changed), optional input-file digests, then a full value diff of
    the recomputed machine document against the stored one.
    """
    document = bundle.document if isinstance(bundle, ReportBundle) else bundle
    meta = document.get("meta", {})
    if meta.get("baseline_fingerprint") != table.corpus_fingerprint:
        return VerificationResult(False, "baseline universe changed")
    if current_input_digests is not None:
        recorded = meta.get("input_digests", {})
        for name in sorted(current_input_digests):
            if recorded.get(name) != current_input_digests[name]:
                return VerificationResult(False, f"input digest mismatch: {name}")

    citable, reclassify, zero_expected = _params_from_document(meta.get("parameters", {}))
    assignments, _coverage = classify_corpus(corpus, category_map, reclassify)

    stored_score = document.get("score", {})
    requested = [entry["id"] for entry in stored_score.get("trace", [])]
    requested += [entry["id"] for entry in stored_score.get("excluded", [])]
    if not requested:
        return VerificationResult(False, "score.trace and score.excluded are both empty")
    try:
        oeuvre, missing = select_oeuvre(corpus, stored_score.get("group_id", ""), requested)
    except Exception as err:  # noqa: BLE001 - any resolution failure is a finding
        return VerificationResult(False, f"oeuvre does not resolve: {err}")
    if missing:
        return VerificationResult(False, f"publication(s) missing from corpus: {', '.join(missing)}")

    recomputed = compute_score(
        oeuvre,
        corpus,
        assignments,
        table,
        citable_types=citable,
        zero_expected=zero_expected,
    )
    fresh = build_document(
        recomputed,
        ReportMeta(
            baseline_fingerprint=table.corpus_fingerprint,
            corpus_summary=meta.get("corpus_summary", {}),
            parameters=meta.get("parameters", {}),
            input_digests=meta.get("input_digests", {}),
            caveat=document.get("caveat", DEFAULT_CAVEAT),
            timestamp=meta.get("generated"),
        ),
    )
    mismatch = _diff(dict(document), fresh, "")
    if mismatch:
        return VerificationResult(False, f"mismatch at {mismatch.lstrip('.')}")
    return VerificationResult(True, None)
