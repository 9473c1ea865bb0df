"""Globalized and averaged field-normalized citation impact for an oeuvre.

Two ways to divide actual by expected citations over a paper set:

* globalized ratio: total citations over total expected citations. Under this
  ratio it does not matter how citations are spread among the papers of the
  set; only the totals count.
* averaged ratio: mean over papers of each paper's own citations-over-expected
  ratio. This one is sensitive to which papers carry the citations whenever
  expected rates differ within the set.

Both are always computed and reported side by side; the engine takes no
position on which one an evaluation should use.

Zero-expected conventions (loud, never hidden): a paper with zero expected
and zero actual citations counts as ratio 1 and is flagged; a paper with zero
expected but positive actual citations stays in the globalized sums but is
omitted from the averaged mean, flagged; an oeuvre whose expected total is
zero while its citation total is positive has no defined globalized ratio and
is an error, never coerced to infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .baseline import BaselineTable, Cell
from .errors import IndicatorError, UncoveredCellError
from .classify import Assignment
from .corpus import DEFAULT_CITABLE_TYPES, Corpus, DocType, Oeuvre, Publication

FLAG_ZERO_EXPECTED_UNCITED = "zero expected, uncited; ratio 1 by convention"
FLAG_ZERO_EXPECTED_CITED = "zero expected, cited; omitted from averaged ratio"
FLAG_ALL_ZERO = "zero expected and zero actual; globalized ratio 1 by convention"
ERROR_ZERO_EXPECTED = "zero expected, positive actual"

ZERO_EXPECTED_POLICIES = ("convention", "strict")


@dataclass(frozen=True)
class Exclusion:
    publication_id: str
    reason: str


@dataclass(frozen=True)
class TraceLine:
    """One scored paper: everything needed to recheck the aggregates by hand."""

    publication_id: str
    citations: int
    expected: Fraction
    ratio: Fraction | None
    flag: str | None
    weights: Mapping[str, Fraction]
    expected_by_category: Mapping[str, Fraction]


@dataclass(frozen=True)
class FieldScore:
    category: str
    paper_weight: Fraction  # summed category weights of the scored papers
    sum_citations: Fraction  # weighted citation contributions
    sum_expected: Fraction  # weighted expected contributions
    globalized: Fraction | None
    averaged: Fraction | None
    flags: tuple[str, ...]


@dataclass(frozen=True)
class OeuvreScore:
    group_id: str
    n_papers: int
    n_scored: int
    n_averaged: int
    sum_citations: int
    sum_expected: Fraction
    globalized: Fraction
    averaged: Fraction | None
    flags: tuple[str, ...]
    per_field: tuple[FieldScore, ...]
    trace: tuple[TraceLine, ...]
    excluded: tuple[Exclusion, ...]


@dataclass(frozen=True)
class _ScoredPaper:
    publication: Publication
    weights: Mapping[str, Fraction]
    expected_by_category: Mapping[str, Fraction]
    expected: Fraction


@dataclass(frozen=True)
class _Computation:
    scored: tuple[_ScoredPaper, ...]
    excluded: tuple[Exclusion, ...]
    sum_citations: int
    sum_expected: Fraction
    globalized: Fraction | None
    globalized_error: str | None
    averaged: Fraction | None
    n_averaged: int
    flags: tuple[str, ...]
    trace: tuple[TraceLine, ...]


def _resolve(
    oeuvre: Oeuvre,
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    table: BaselineTable,
    citable_types: frozenset[DocType],
    zero_expected: str,
) -> tuple[list[_ScoredPaper], list[Exclusion]]:
    """Route each oeuvre paper to the scored set or to the exclusion list."""
    corpus.require_frozen("scoring")
    scored: list[_ScoredPaper] = []
    excluded: list[Exclusion] = []
    for pub_id in sorted(oeuvre.publication_ids):
        pub = corpus.get(pub_id)
        if pub.doc_type not in citable_types:
            excluded.append(Exclusion(pub_id, f"non-citable doc type ({pub.doc_type.value})"))
            continue
        assignment = assignments.get(pub_id)
        if assignment is None or not assignment.classified:
            excluded.append(Exclusion(pub_id, "unclassified"))
            continue
        try:
            per_category = {
                category: weight * table.rate(Cell(category, pub.doc_type, pub.year))
                for category, weight in sorted(assignment.weights.items())
            }
        except UncoveredCellError as err:
            excluded.append(Exclusion(pub_id, str(err)))
            continue
        expected = sum(per_category.values(), Fraction(0))
        if zero_expected == "strict" and expected == 0:
            excluded.append(Exclusion(pub_id, "zero expected rate (strict policy)"))
            continue
        scored.append(
            _ScoredPaper(
                publication=pub,
                weights=dict(sorted(assignment.weights.items())),
                expected_by_category=per_category,
                expected=expected,
            )
        )
    return scored, excluded


def _compute(
    oeuvre: Oeuvre,
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    table: BaselineTable,
    citable_types: frozenset[DocType],
    zero_expected: str,
) -> _Computation:
    if zero_expected not in ZERO_EXPECTED_POLICIES:
        raise IndicatorError(f"unknown zero-expected policy: '{zero_expected}'")
    scored, excluded = _resolve(oeuvre, corpus, assignments, table, citable_types, zero_expected)
    if not scored:
        raise IndicatorError("no scorable publications in oeuvre")

    sum_citations = sum(paper.publication.citations for paper in scored)
    sum_expected = sum((paper.expected for paper in scored), Fraction(0))

    flags: list[str] = []
    globalized: Fraction | None
    globalized_error: str | None = None
    if sum_expected > 0:
        globalized = Fraction(sum_citations) / sum_expected
    elif sum_citations == 0:
        globalized = Fraction(1)
        flags.append(FLAG_ALL_ZERO)
    else:
        globalized = None
        globalized_error = ERROR_ZERO_EXPECTED

    trace: list[TraceLine] = []
    ratio_sum = Fraction(0)
    n_averaged = 0
    omitted_from_averaged = 0
    for paper in scored:
        citations = paper.publication.citations
        ratio: Fraction | None
        flag: str | None = None
        if paper.expected > 0:
            ratio = Fraction(citations) / paper.expected
            ratio_sum += ratio
            n_averaged += 1
        elif citations == 0:
            ratio = Fraction(1)
            flag = FLAG_ZERO_EXPECTED_UNCITED
            ratio_sum += ratio
            n_averaged += 1
        else:
            ratio = None
            flag = FLAG_ZERO_EXPECTED_CITED
            omitted_from_averaged += 1
        trace.append(
            TraceLine(
                publication_id=paper.publication.id,
                citations=citations,
                expected=paper.expected,
                ratio=ratio,
                flag=flag,
                weights=paper.weights,
                expected_by_category=paper.expected_by_category,
            )
        )
    averaged = ratio_sum / n_averaged if n_averaged > 0 else None
    if omitted_from_averaged:
        flags.append(f"{omitted_from_averaged} paper(s) omitted from averaged ratio (zero expected, cited)")

    return _Computation(
        scored=tuple(scored),
        excluded=tuple(excluded),
        sum_citations=sum_citations,
        sum_expected=sum_expected,
        globalized=globalized,
        globalized_error=globalized_error,
        averaged=averaged,
        n_averaged=n_averaged,
        flags=tuple(flags),
        trace=tuple(trace),
    )


def _field_breakdown(scored: Sequence[_ScoredPaper], table: BaselineTable) -> tuple[FieldScore, ...]:
    """Per-category restriction: contributions weighted by category weight.

    A multi-category paper's citations split fractionally across its
    categories with the same weights the baselines used, so field numerators
    and denominators reconcile exactly with the overall sums.
    """
    accum: dict[str, dict[str, Fraction]] = {}
    field_flags: dict[str, set[str]] = {}
    for paper in scored:
        citations = paper.publication.citations
        for category, weight in paper.weights.items():
            cell_rate = table.rate(Cell(category, paper.publication.doc_type, paper.publication.year))
            entry = accum.setdefault(
                category,
                {
                    "weight": Fraction(0),
                    "citations": Fraction(0),
                    "expected": Fraction(0),
                    "ratio_weight": Fraction(0),
                    "ratio_sum": Fraction(0),
                },
            )
            flags = field_flags.setdefault(category, set())
            entry["weight"] += weight
            entry["citations"] += weight * citations
            entry["expected"] += weight * cell_rate
            if cell_rate > 0:
                entry["ratio_weight"] += weight
                entry["ratio_sum"] += weight * (Fraction(citations) / cell_rate)
            elif citations == 0:
                entry["ratio_weight"] += weight
                entry["ratio_sum"] += weight  # ratio 1 by convention
                flags.add(FLAG_ZERO_EXPECTED_UNCITED)
            else:
                flags.add(FLAG_ZERO_EXPECTED_CITED)

    scores: list[FieldScore] = []
    for category in sorted(accum):
        entry = accum[category]
        flags = field_flags[category]
        globalized: Fraction | None
        if entry["expected"] > 0:
            globalized = entry["citations"] / entry["expected"]
        elif entry["citations"] == 0:
            globalized = Fraction(1)
            flags.add(FLAG_ALL_ZERO)
        else:
            globalized = None
            flags.add(ERROR_ZERO_EXPECTED + " (globalized undefined for this field)")
        averaged = entry["ratio_sum"] / entry["ratio_weight"] if entry["ratio_weight"] > 0 else None
        scores.append(
            FieldScore(
                category=category,
                paper_weight=entry["weight"],
                sum_citations=entry["citations"],
                sum_expected=entry["expected"],
                globalized=globalized,
                averaged=averaged,
                flags=tuple(sorted(flags)),
            )
        )
    return tuple(scores)


def globalized_ratio(
    oeuvre: Oeuvre,
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    table: BaselineTable,
    *,
    citable_types: frozenset[DocType] = DEFAULT_CITABLE_TYPES,
    zero_expected: str = "convention",
) -> Fraction:
    """Total citations over total expected citations (ratio of sums).

    The paper-count denominators cancel, so this equals the ratio of the two
    means as well; redistributing citations among the papers never changes it.
    """
    result = _compute(oeuvre, corpus, assignments, table, citable_types, zero_expected)
    if result.globalized_error is not None:
        raise IndicatorError(result.globalized_error)
    assert result.globalized is not None
    return result.globalized


def averaged_ratio(
    oeuvre: Oeuvre,
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    table: BaselineTable,
    *,
    citable_types: frozenset[DocType] = DEFAULT_CITABLE_TYPES,
    zero_expected: str = "convention",
) -> Fraction | None:
    """Mean of the per-paper citation-over-expected ratios.

    Returns None when no paper contributes a defined ratio; never 0.
    """
    result = _compute(oeuvre, corpus, assignments, table, citable_types, zero_expected)
    return result.averaged


def per_field_breakdown(
    oeuvre: Oeuvre,
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    table: BaselineTable,
    *,
    citable_types: frozenset[DocType] = DEFAULT_CITABLE_TYPES,
    zero_expected: str = "convention",
) -> dict[str, FieldScore]:
    """Both ratios per category with positive oeuvre weight."""
    result = _compute(oeuvre, corpus, assignments, table, citable_types, zero_expected)
    return {fs.category: fs for fs in _field_breakdown(result.scored, table)}


def score(
    oeuvre: Oeuvre,
    corpus: Corpus,
    assignments: Mapping[str, Assignment],
    table: BaselineTable,
    *,
    citable_types: frozenset[DocType] = DEFAULT_CITABLE_TYPES,
    zero_expected: str = "convention",
) -> OeuvreScore:
    """Full assessment: both ratios, field breakdown, per-paper trace, exclusions.

    Every oeuvre paper appears in exactly one of trace or excluded.
    """
    result = _compute(oeuvre, corpus, assignments, table, citable_types, zero_expected)
    if result.globalized_error is not None:
        raise IndicatorError(result.globalized_error)
    assert result.globalized is not None
    return OeuvreScore(
        group_id=oeuvre.group_id,
        n_papers=len(oeuvre.publication_ids),
        n_scored=len(result.scored),
        n_averaged=result.n_averaged,
        sum_citations=result.sum_citations,
        sum_expected=result.sum_expected,
        globalized=result.globalized,
        averaged=result.averaged,
        flags=result.flags,
        per_field=_field_breakdown(result.scored, table),
        trace=result.trace,
        excluded=tuple(sorted(result.excluded, key=lambda e: e.publication_id)),
    )


__all__ = [
    "Exclusion",
    "FieldScore",
    "OeuvreScore",
    "TraceLine",
    "averaged_ratio",
    "globalized_ratio",
    "per_field_breakdown",
    "score",
]
